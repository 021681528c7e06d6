#pragma once

#include <algorithm>
#include <deque>
#include <functional>

#include "qcaf/common.hpp"

namespace qcaf {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 1000;
  double energy_tol = 1e-6;  // stop when an accepted step changes f by less
  double grad_tol = 1e-7;    // or the gradient sup-norm falls below this
  // the energy-stall stop additionally requires a not-too-large gradient,
  // or the stall to persist over consecutive accepted steps
  double stall_grad_tol = 1e-4;
  int stall_steps = 3;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 30;
  Vec lower, upper;  // optional simple bounds; empty means unbounded
};

struct LbfgsResult {
  Vec x;
  double f = 0.0;
  Vec grad;
  int iterations = 0;
  int n_evals = 0;
  bool converged = false;
  std::vector<double> trace;  // accepted objective values
  std::string message;
};

/// Limited-memory quasi-Newton minimizer with a strong-Wolfe line search and
/// optional simple bounds (trial points are clipped to the box).
/// The callback evaluates f and its gradient together.
inline LbfgsResult lbfgs_minimize(
    const std::function<double(const Vec&, Vec&)>& fg, Vec x0,
    const LbfgsOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  const bool bounded = opt.lower.size() == n && opt.upper.size() == n;
  auto clip = [&](Vec v) {
    if (bounded) v = v.cwiseMax(opt.lower).cwiseMin(opt.upper);
    return v;
  };

  LbfgsResult res;
  res.x = clip(std::move(x0));
  res.grad.resize(n);
  res.f = fg(res.x, res.grad);
  res.n_evals = 1;
  res.trace.push_back(res.f);

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  int stall = 0;

  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    if (res.grad.cwiseAbs().maxCoeff() < opt.grad_tol) {
      res.converged = true;
      res.message = "gradient below tolerance";
      break;
    }

    // two-loop recursion
    Vec q = res.grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      double yy = y_hist.back().squaredNorm();
      if (yy > 0) gamma = s_hist.back().dot(y_hist.back()) / yy;
    }
    Vec d = -gamma * q;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    double dg = d.dot(res.grad);
    if (dg >= 0) {  // not a descent direction; restart from steepest descent
      d = -res.grad;
      dg = -res.grad.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // strong Wolfe line search (bracket and zoom)
    double f0 = res.f, dphi0 = dg;
    double step = (it == 0) ? std::min(1.0, 1.0 / std::max(1e-12, res.grad.norm()))
                            : 1.0;
    double lo = 0.0, hi = 0.0;
    double f_lo = f0, dphi_lo = dphi0;
    bool bracketed = false, ok = false;
    double step_prev = 0.0, f_prev = f0, dphi_prev = dphi0;
    Vec x_trial, g_trial(n);
    double f_trial = f0;
    for (int ls = 0; ls < opt.max_line_search; ++ls) {
      x_trial = clip(res.x + step * d);
      f_trial = fg(x_trial, g_trial);
      ++res.n_evals;
      double dphi = g_trial.dot(d);
      if (!bracketed) {
        if (f_trial > f0 + opt.wolfe_c1 * step * dphi0 ||
            (ls > 0 && f_trial >= f_prev)) {
          lo = step_prev;
          f_lo = f_prev;
          dphi_lo = dphi_prev;
          hi = step;
          bracketed = true;
        } else if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) {
          ok = true;
          break;
        } else if (dphi >= 0) {
          lo = step;
          f_lo = f_trial;
          dphi_lo = dphi;
          hi = step_prev;
          bracketed = true;
        } else {
          step_prev = step;
          f_prev = f_trial;
          dphi_prev = dphi;
          step *= 2.0;
          continue;
        }
      } else {
        if (f_trial > f0 + opt.wolfe_c1 * step * dphi0 || f_trial >= f_lo) {
          hi = step;
        } else if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) {
          ok = true;
          break;
        } else {
          if (dphi * (hi - lo) >= 0) hi = lo;
          lo = step;
          f_lo = f_trial;
          dphi_lo = dphi;
        }
      }
      step = bracketed ? 0.5 * (lo + hi) : step;
      if (bracketed && std::abs(hi - lo) < 1e-14) break;
    }
    if (!ok && f_trial >= f0) {
      res.message = "line search failure";
      break;
    }

    Vec s = x_trial - res.x;
    Vec y = g_trial - res.grad;
    double sy = s.dot(y);
    double df = f0 - f_trial;
    res.x = std::move(x_trial);
    res.f = f_trial;
    res.grad = g_trial;
    res.trace.push_back(res.f);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (std::abs(df) < opt.energy_tol) {
      ++stall;
      if (res.grad.cwiseAbs().maxCoeff() < opt.stall_grad_tol ||
          stall >= opt.stall_steps) {
        res.converged = true;
        res.message = "energy change below tolerance";
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (res.message.empty()) res.message = "iteration limit reached";
  return res;
}

}  // namespace qcaf

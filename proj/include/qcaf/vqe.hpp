#pragma once

#include <functional>
#include <memory>

#include "qcaf/exactdiag.hpp"
#include "qcaf/lbfgs.hpp"
#include "qcaf/sector_engine.hpp"

namespace qcaf {

/// <psi|H|psi> evaluated by applying the Hamiltonian term-wise to the
/// statevector; the imaginary residue must vanish for a Hermitian operator.
inline double energy(const Statevector& state, const PauliOperator& hamiltonian) {
  cplx e = expectation_pauli(state, hamiltonian);
  require(std::abs(e.imag()) < 1e-10, "energy: non-real expectation value");
  double n2 = 0.0;
  for (const auto& a : state.amps) n2 += std::norm(a);
  return e.real() / n2;
}

/// Shared state for variational optimization over one integral set/sector.
struct VqeProblem {
  SpinBlockedIntegrals ints;
  SectorBasis basis;
  std::shared_ptr<SectorHamiltonian> h;
  mutable std::shared_ptr<PauliOperator> jw;  // built on demand

  VqeProblem(SpinBlockedIntegrals i, int n_alpha, int n_beta)
      : ints(std::move(i)), basis(ints.n_orbitals, n_alpha, n_beta) {
    // warm the lazily built excitation tables before any parallel use
    basis.alpha_excitations();
    basis.beta_excitations();
    h = std::make_shared<SectorHamiltonian>(ints, basis);
  }

  const PauliOperator& pauli_hamiltonian() const {
    if (!jw) jw = std::make_shared<PauliOperator>(jordan_wigner(ints));
    return *jw;
  }
};

/// Reusable circuit-energy evaluator: sector-space evaluation with
/// precompiled excitation pair tables for particle-conserving gate sets,
/// dense Pauli-sum evaluation otherwise. The two routes agree by the
/// cross-representation identity (tested). Thread-safe once constructed.
class CircuitEnergy {
 public:
  CircuitEnergy(const VqeProblem& prob, const AnsatzCircuit& circ)
      : prob_(&prob), circ_(&circ), eng_(&prob.basis) {
    sector_ = circ.sector_safe();
    if (sector_) cc_ = eng_.compile(circ);
  }

  double operator()(const Vec& params) const {
    if (sector_) {
      VecC v;
      eng_.run_compiled(v, cc_, params);
      return prob_->h->expectation(v);
    }
    Statevector sv = evaluate_dense(*circ_, params);
    return energy(sv, prob_->pauli_hamiltonian());
  }

  VecC state(const Vec& params) const {
    if (sector_) {
      VecC v;
      eng_.run_compiled(v, cc_, params);
      return v;
    }
    Statevector sv = evaluate_dense(*circ_, params);
    return gather_sector(sv, prob_->basis);
  }

 private:
  const VqeProblem* prob_;
  const AnsatzCircuit* circ_;
  SectorEngine eng_;
  SectorEngine::CompiledCircuit cc_;
  bool sector_ = false;
};

inline double circuit_energy(const VqeProblem& prob, const AnsatzCircuit& circ,
                             const Vec& params) {
  return CircuitEnergy(prob, circ)(params);
}

/// Central finite-difference gradient; components are independent and
/// evaluated in parallel.
inline Vec gradient_fd(const std::function<double(const Vec&)>& f, const Vec& params,
                       double eps = 1e-3) {
  require(eps > 0, "gradient_fd: eps must be positive");
  Vec g(params.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < params.size(); ++i) {
    Vec p = params;
    p(i) = params(i) + eps;
    double fp = f(p);
    p(i) = params(i) - eps;
    double fm = f(p);
    g(i) = (fp - fm) / (2.0 * eps);
  }
  return g;
}

struct OptimizationResult {
  Vec params;
  double energy = 0.0;
  int iterations = 0;
  int n_evals = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::vector<double> energy_trace;
  std::string message;
};

struct VqeOptions {
  double energy_tol = 1e-6;
  double fd_eps = 1e-3;
  int max_iterations = 1000;
};

/// Bounded quasi-Newton minimization of a black-box energy with central
/// finite-difference gradients.
inline OptimizationResult minimize(const std::function<double(const Vec&)>& f,
                                   const Vec& init, const VqeOptions& opt = {}) {
  LbfgsOptions lopt;
  lopt.energy_tol = opt.energy_tol;
  lopt.max_iterations = opt.max_iterations;
  const int fd_evals_per_grad = 2 * static_cast<int>(init.size());
  auto fg = [&f, &opt](const Vec& x, Vec& g) {
    double fx = f(x);
    g = gradient_fd(f, x, opt.fd_eps);
    return fx;
  };
  LbfgsResult lres = lbfgs_minimize(fg, init, lopt);
  OptimizationResult out;
  out.params = lres.x;
  out.energy = lres.f;
  out.iterations = lres.iterations;
  out.n_evals = lres.n_evals * (1 + fd_evals_per_grad);
  out.grad_norm = lres.grad.norm();
  out.converged = lres.converged;
  out.energy_trace = lres.trace;
  out.message = lres.message;
  return out;
}

inline OptimizationResult minimize_circuit(const VqeProblem& prob,
                                           const AnsatzCircuit& circ,
                                           const Vec& init,
                                           const VqeOptions& opt = {}) {
  CircuitEnergy f(prob, circ);
  return minimize([&f](const Vec& p) { return f(p); }, init, opt);
}

/// Layered freeze-then-extend optimization for multilayer paired circuits:
/// optimize the first layer alone, then the first two, and so on; earlier
/// parameters warm-start each stage.
inline OptimizationResult minimize_layered(const VqeProblem& prob,
                                           const std::vector<AnsatzCircuit>& stages,
                                           const VqeOptions& opt = {}) {
  require(!stages.empty(), "minimize_layered: no stages");
  Vec warm = Vec::Zero(stages.front().n_params);
  OptimizationResult last;
  int total_evals = 0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    Vec init = Vec::Zero(stages[s].n_params);
    init.head(warm.size()) = warm;
    last = minimize_circuit(prob, stages[s], init, opt);
    warm = last.params;
    total_evals += last.n_evals;
  }
  last.n_evals = total_evals;
  return last;
}

struct OperatorPool {
  std::vector<Generator> ops;  // excitation generators, slots unassigned
};

/// UCCSD excitation pool for adaptive ansatz growth.
inline OperatorPool uccsd_pool(int n_orb, int n_alpha, int n_beta) {
  OperatorPool pool;
  pool.ops = build_uccsd(n_orb, n_alpha, n_beta).circuit.ops;
  return pool;
}

struct AdaptSnapshot {
  int n_ops = 0;
  AnsatzCircuit circuit;
  Vec params;
  double energy = 0.0;
};

struct AdaptOptions {
  double grad_threshold = 1e-3;
  int snapshot_every = 10;
  int max_operators = 10000;
  VqeOptions inner;
  bool verbose = false;
};

struct AdaptResult {
  AnsatzCircuit circuit;
  OptimizationResult result;
  std::vector<AdaptSnapshot> snapshots;
  std::vector<double> energy_per_iteration;
  std::vector<double> max_gradient_per_iteration;
  bool stagnated = false;
};

/// ADAPT-VQE: each iteration screens the pool with the commutator gradient
/// dE/dtheta_j = <psi|[H, A_j]|psi> = 2 Re <psi|H A_j|psi> (A_j
/// anti-Hermitian), appends the largest-gradient operator and re-optimizes
/// all parameters.
inline AdaptResult adapt_vqe(const VqeProblem& prob, const OperatorPool& pool,
                             const AdaptOptions& opt = {}) {
  require(!pool.ops.empty(), "adapt_vqe: empty operator pool");
  const int n_orb = prob.ints.n_orbitals;
  AdaptResult out;
  out.circuit.n_orb = n_orb;
  out.circuit.ref_alpha = detail::lowest_orbitals(prob.basis.n_alpha());
  out.circuit.ref_beta = detail::lowest_orbitals(prob.basis.n_beta());
  out.circuit.family = "adapt-uccsd";
  SectorEngine eng(&prob.basis);

  Vec params = Vec::Zero(0);
  double e_prev = 0.0;
  {
    VecC v0 = eng.reference_state(out.circuit.ref_alpha, out.circuit.ref_beta);
    e_prev = prob.h->expectation(v0);
  }
  out.energy_per_iteration.push_back(e_prev);

  for (int iter = 0; iter < opt.max_operators; ++iter) {
    VecC psi = eng.run(out.circuit, params);
    VecC hpsi;
    prob.h->apply(psi, hpsi);
    // pool screening (independent per operator)
    Vec grads(pool.ops.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(pool.ops.size()); ++j) {
      VecC gpsi = VecC::Zero(psi.size());
      eng.accumulate_excitation_generator(*pool.ops[j].excitation, psi, gpsi);
      grads(j) = 2.0 * hpsi.dot(gpsi).real();
    }
    int best = 0;
    double gmax = grads.cwiseAbs().maxCoeff(&best);
    out.max_gradient_per_iteration.push_back(gmax);
    if (gmax < opt.grad_threshold) {
      out.result.message = "pool gradients below threshold";
      break;
    }
    Generator g = pool.ops[best];
    g.slot = static_cast<int>(params.size());
    out.circuit.ops.push_back(std::move(g));
    out.circuit.n_params = static_cast<int>(params.size()) + 1;
    Vec init = Vec::Zero(out.circuit.n_params);
    init.head(params.size()) = params;
    out.result = minimize_circuit(prob, out.circuit, init, opt.inner);
    params = out.result.params;
    out.energy_per_iteration.push_back(out.result.energy);
    if (opt.verbose)
      std::fprintf(stderr, "adapt it %d op %s grad %.3e E %.10f\n", iter,
                   out.circuit.ops.back().label.c_str(), gmax, out.result.energy);
    if (std::abs(e_prev - out.result.energy) < 1e-12) {
      out.stagnated = true;
      out.result.message = "stagnation: appended operator changed energy < 1e-12";
      break;
    }
    e_prev = out.result.energy;
    if (opt.snapshot_every > 0 &&
        (iter + 1) % opt.snapshot_every == 0) {
      out.snapshots.push_back(
          {static_cast<int>(out.circuit.ops.size()), out.circuit, params,
           out.result.energy});
    }
  }
  out.result.params = params;
  if (out.result.energy_trace.empty()) out.result.energy = e_prev;
  return out;
}

}  // namespace qcaf

#pragma once

// Placeholder while the CLI is assembled; replaced by the full dispatcher.
namespace qcaf {
inline int cli_main(int, char**) { return 0; }
}  // namespace qcaf

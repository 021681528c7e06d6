// Command-line entry point; subcommands are implemented in qcaf/cli.hpp.
#include "qcaf/cli.hpp"

int main(int argc, char** argv) { return qcaf::cli_main(argc, argv); }

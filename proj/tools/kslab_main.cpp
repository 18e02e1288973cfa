// CLI entry point; subcommands are wired up in cli_run().
#include "kslab/errors.hpp"

#include <cstdio>

namespace kslab {
int cli_run(int argc, char** argv);
}

int main(int argc, char** argv) { return kslab::cli_run(argc, argv); }

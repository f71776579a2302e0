#include "tccopula/cli.hpp"

int main(int argc, char** argv) { return tccopula::cli::run_cli(argc, argv); }

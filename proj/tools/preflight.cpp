#include "preflight/cli.hpp"

int main(int argc, char** argv) { return preflight::cli::run_cli(argc, argv); }

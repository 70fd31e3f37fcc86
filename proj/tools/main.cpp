#include "cli.hpp"

int main(int argc, char** argv) { return rpm::cli::run_cli(argc, argv); }

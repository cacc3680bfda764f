#include "radhydro/cli.hpp"

int main(int argc, char** argv) { return radhydro::cli::run_main(argc, argv); }

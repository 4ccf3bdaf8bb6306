#include "dtorus/cli.hpp"

int main(int argc, char** argv) { return dtorus::cli::run(argc, argv); }

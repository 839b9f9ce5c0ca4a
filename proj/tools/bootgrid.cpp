#include "bootgrid/cli.hpp"

int main(int argc, char** argv) { return bootgrid::cli::run(argc, argv); }

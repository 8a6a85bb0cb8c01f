#include "cli.hpp"

int main(int argc, char** argv) { return isodiam::cli::run(argc, argv); }

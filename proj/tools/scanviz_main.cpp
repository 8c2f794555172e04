#include "scanviz/cli.hpp"

int main(int argc, char** argv) { return scanviz::cli::main(argc, argv); }

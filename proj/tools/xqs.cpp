#include "xqs/cli.hpp"

int main(int argc, char** argv) { return xqs::cli::main(argc, argv); }

#include "spinwave/cli.hpp"

int main(int argc, char** argv) { return spinwave::cli::main(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return sgfl::cli::main(argc, argv); }

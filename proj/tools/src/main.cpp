#include "modestoa_cli/commands.hpp"

int main(int argc, char** argv) { return modestoa::cli::run(argc, argv); }

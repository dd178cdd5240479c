#include "seqforge/commands.hpp"

int main(int argc, char** argv) { return seqforge::cli::run_cli(argc, argv); }

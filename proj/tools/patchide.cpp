#include "patchide/cli.hpp"

int main(int argc, char** argv) { return patchide::run_cli(argc, argv); }

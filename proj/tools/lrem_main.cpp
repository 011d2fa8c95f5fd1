#include "lrem/cli.hpp"

int main(int argc, char** argv) { return lrem::cli_main(argc, argv); }

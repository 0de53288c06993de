#include "ym/cli.hpp"

int main(int argc, char** argv) { return ym::cli_main(argc, argv); }

#include "snreg/cli.hpp"

int main(int argc, char** argv) { return snreg::cli_main(argc, argv); }

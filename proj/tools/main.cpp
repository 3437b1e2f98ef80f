#include "mincurv/cli.hpp"

int main(int argc, char** argv) { return mincurv::cli_main(argc, argv); }

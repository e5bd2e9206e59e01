#include <iostream>

#include "sfs_cli/cli.hpp"

int main(int argc, char** argv) { return sfs::cli::run(argc, argv, std::cout, std::cerr); }

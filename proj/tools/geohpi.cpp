// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "geohpi/cli/commands.hpp"

int main(int argc, char** argv) { return geohpi::cli::run(argc, argv, std::cout, std::cerr); }

// Copyright (c) 2026 The depthmine authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return depthmine::cli::dispatch(argc, argv, std::cout, std::cerr);
}

// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "entrolim_cli/cli.hpp"

int main(int argc, char** argv) {
  return entrolim::cli::run({argv, argv + argc}, std::cout, std::cerr);
}

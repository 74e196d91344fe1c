// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "haflab/cli.hpp"

int main(int argc, char** argv) {
    return haflab::run_cli(argc, argv, std::cout, std::cerr);
}

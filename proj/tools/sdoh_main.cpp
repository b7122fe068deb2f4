// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "sdoh/cli.hpp"

int main(int argc, char** argv) { return sdoh::run_cli(argc, argv, std::cout, std::cerr); }

// Copyright 2026 The sdohpipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace sdoh {

/// Entry point of the `sdoh` command-line tool. Returns the process exit
/// code: 0 on success, 1 on a pipeline error, 2 on a usage error. Errors are
/// written to `err` as one JSON object: {"error": {"code", "message"}}.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdoh

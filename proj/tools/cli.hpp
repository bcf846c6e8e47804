// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace genefx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Parses `args` (without the program name) and runs one subcommand:
///   gen-data, train, finetune, dge, poi, ablate, enhance.
/// `--config FILE` supplies key=value defaults for the subcommand's options; flags given on
/// the command line win. Every run writes a key=value manifest of the resolved options that
/// can be passed back through --config to reproduce the run.
/// Returns 0 on success, 1 on a usage or configuration error, 2 on a runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace genefx::cli

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "surfhead/config_io.hpp"

namespace surfhead {

/// Exit codes shared by every subcommand: 0 success, 1 self-test failure,
/// 2 input error, 3 numerical divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftestFail = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDiverged = 3;

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

int cmd_deform(const CommandOptions& opt);
int cmd_render(const CommandOptions& opt);
int cmd_interp_demo(const CommandOptions& opt);
int cmd_fit(const CommandOptions& opt);
int cmd_selftest(int threads, const std::string& mutate);

} // namespace surfhead

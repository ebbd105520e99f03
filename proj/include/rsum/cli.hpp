// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace rsum {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// Entry point of the rsum tool. Results without an --out path go to `out`,
// summaries and errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace rsum

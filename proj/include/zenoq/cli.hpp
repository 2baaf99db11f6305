#pragma once
// Command-line entry point. Exit codes: 0 success, 1 numerical failure,
// 2 usage or configuration error.

namespace zenoq {

int run(int argc, const char* const* argv);

}  // namespace zenoq

#pragma once

#include <ostream>

namespace catnet::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

// Runs one subcommand (synth, ingest, topology, train, evaluate, explain).
// Every output, including manifest.json, goes under --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace catnet::cli

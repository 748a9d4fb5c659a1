#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace keyecho::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 2,
    kExitEmpty = 3,
    kExitPipeline = 4,
    kExitUsage = 64,
};

/// Effective settings of one invocation, defaults resolved.
struct RunConfig {
    std::string command;
    double frame_ms = 100.0;
    double min_gap_ms = 100.0;
    double tolerance_pct = 0.05;
    double std_coeff = 1.0;
    std::size_t k = 0;
    std::string model;
    std::string lexicon;
    std::string out;
    std::vector<std::string> inputs;
    std::uint64_t seed = 7;
    unsigned jobs = 1;
    bool json = false;
};

nlohmann::json config_to_json(const RunConfig& config);

/// Entry point. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace keyecho::cli

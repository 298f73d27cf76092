// SPDX-License-Identifier: MIT
#pragma once
//
// Typed run configuration: one flat INI-style document, strictly validated.
//
//   seed = 0                  # top-level keys come before any section
//   threads = 1
//
//   [problem]                 # required
//   name = linear             # builtin problem name
//   a = -1                    # remaining keys are numeric problem parameters
//
//   [scheme]                  # required
//   name = cstm
//   theta = 0.5
//
//   [converge] / [stability] / [amplification] / [path]   # per command
//   [output]
//   dir = out
//
// Parsing rejects unknown sections, unknown keys (outside [problem]'s
// parameter passthrough), duplicate sections, duplicate keys (reporting both
// line numbers), malformed numbers, and theta outside [0, 1]. Sections for
// commands other than the one being run may be present and are ignored.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "jsde/experiments.hpp"

namespace jsde {

// Configuration problem: parse failure or semantically invalid value. The
// message carries the offending line number(s).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct StabilitySection {
    std::vector<double> dts;
    StabilityConfig config;
};

struct AmplificationSection {
    double dt = 0.0;
    AmplificationConfig config;
};

struct PathSection {
    double dt = 0.0;
    std::size_t steps = 0;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out_dir = "out";

    std::string problem_name;
    std::vector<std::pair<std::string, double>> problem_params;

    std::string scheme;
    double theta = 0.0;
    ImplicitSolveConfig implicit;

    std::optional<ConvergenceConfig> converge;
    std::optional<StabilitySection> stability;
    std::optional<AmplificationSection> amplification;
    std::optional<PathSection> path;

    // Raw (section, key, value) triples in input order, echoed into the run
    // manifest. Top-level keys use section "".
    std::vector<std::tuple<std::string, std::string, std::string>> echo;
};

// Parses a config document. Throws ConfigError with line information.
RunConfig parse_config(const std::string& text);

// Reads and parses a config file. Throws IoError on read failure (see
// csv.hpp) and ConfigError on parse failure.
RunConfig load_config_file(const std::string& path);

// Materializes the configured problem and scheme. Both wrap the library
// constructors and convert their std::invalid_argument complaints (unknown
// problem, bad parameter name, missing split) into ConfigError.
ProblemBundle make_bundle(const RunConfig& config);
SchemeSpec make_scheme_spec(const RunConfig& config, const ProblemBundle& bundle);

}  // namespace jsde

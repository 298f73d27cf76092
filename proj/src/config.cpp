// SPDX-License-Identifier: MIT

#include "jsde/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "jsde/csv.hpp"

namespace jsde {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

// One raw entry plus where it came from, for duplicate reporting.
struct RawValue {
    std::string value;
    std::size_t line = 0;
};

using SectionMap = std::map<std::string, RawValue>;  // key -> value, one section

double parse_double(const RawValue& rv, const std::string& key) {
    const char* begin = rv.value.data();
    const char* end = begin + rv.value.size();
    double out = 0.0;
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        fail(rv.line, "key '" + key + "' expects a number, got '" + rv.value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const RawValue& rv, const std::string& key) {
    const char* begin = rv.value.data();
    const char* end = begin + rv.value.size();
    std::uint64_t out = 0;
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        fail(rv.line, "key '" + key + "' expects a non-negative integer, got '" + rv.value +
                          "'");
    }
    return out;
}

std::size_t parse_size(const RawValue& rv, const std::string& key) {
    return static_cast<std::size_t>(parse_u64(rv, key));
}

std::vector<std::string> split_list(const RawValue& rv, const std::string& key) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= rv.value.size()) {
        const auto comma = rv.value.find(',', start);
        const auto piece =
            trim(rv.value.substr(start, comma == std::string::npos ? comma : comma - start));
        if (piece.empty()) {
            fail(rv.line, "key '" + key + "' has an empty list entry");
        }
        items.push_back(piece);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return items;
}

std::vector<double> parse_double_list(const RawValue& rv, const std::string& key) {
    std::vector<double> out;
    for (const auto& piece : split_list(rv, key)) {
        out.push_back(parse_double(RawValue{piece, rv.line}, key));
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const RawValue& rv, const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& piece : split_list(rv, key)) {
        out.push_back(parse_size(RawValue{piece, rv.line}, key));
    }
    return out;
}

// Pulls a key out of the section, or returns nullopt when absent.
std::optional<RawValue> take(SectionMap& section, const std::string& key) {
    const auto it = section.find(key);
    if (it == section.end()) {
        return std::nullopt;
    }
    RawValue held = it->second;
    section.erase(it);
    return held;
}

void reject_leftovers(const SectionMap& section, const std::string& section_name) {
    if (section.empty()) {
        return;
    }
    const auto& [key, rv] = *section.begin();
    fail(rv.line, "unknown key '" + key + "' in section [" + section_name + "]");
}

RawValue require(SectionMap& section, const std::string& section_name, const std::string& key,
                 std::size_t header_line) {
    std::optional<RawValue> rv = take(section, key);
    if (!rv) {
        fail(header_line, "section [" + section_name + "] is missing required key '" + key +
                              "'");
    }
    return *rv;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    static const std::set<std::string> kSections = {
        "problem", "scheme", "converge", "stability", "amplification", "path", "output"};

    std::map<std::string, SectionMap> sections;
    std::map<std::string, std::size_t> section_lines;  // header line per section
    SectionMap top_level;
    RunConfig config;

    std::string current;  // "" = top level
    bool in_section = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string line =
            text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
        ++line_no;
        start = nl == std::string::npos ? text.size() + 1 : nl + 1;

        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(line_no, "malformed section header '" + line + "'");
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (kSections.count(name) == 0) {
                fail(line_no, "unknown section [" + name + "]");
            }
            if (section_lines.count(name) != 0) {
                fail(line_no, "duplicate section [" + name + "] (first at line " +
                                  std::to_string(section_lines[name]) + ")");
            }
            section_lines[name] = line_no;
            current = name;
            in_section = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(line_no, "expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            fail(line_no, "empty key");
        }
        if (value.empty()) {
            fail(line_no, "key '" + key + "' has no value");
        }
        SectionMap& dest = in_section ? sections[current] : top_level;
        const auto [it, inserted] = dest.emplace(key, RawValue{value, line_no});
        if (!inserted) {
            fail(line_no, "duplicate key '" + key + "' (first at line " +
                              std::to_string(it->second.line) + ")");
        }
        config.echo.emplace_back(in_section ? current : "", key, value);
    }

    // Top level: seed and threads only.
    if (const auto rv = take(top_level, "seed")) {
        config.seed = parse_u64(*rv, "seed");
    }
    if (const auto rv = take(top_level, "threads")) {
        config.threads = parse_size(*rv, "threads");
        if (config.threads == 0) {
            fail(rv->line, "threads must be at least 1");
        }
    }
    if (!top_level.empty()) {
        const auto& [key, rv] = *top_level.begin();
        fail(rv.line, "unknown top-level key '" + key + "' (expected seed or threads)");
    }

    // [problem]: name plus numeric parameter passthrough.
    if (section_lines.count("problem") == 0) {
        throw ConfigError("config: required section [problem] is missing");
    }
    {
        SectionMap& sec = sections["problem"];
        const std::size_t header = section_lines["problem"];
        config.problem_name = require(sec, "problem", "name", header).value;
        for (const auto& [key, rv] : sec) {
            config.problem_params.emplace_back(key, parse_double(rv, key));
        }
    }

    // [scheme]
    if (section_lines.count("scheme") == 0) {
        throw ConfigError("config: required section [scheme] is missing");
    }
    {
        SectionMap& sec = sections["scheme"];
        const std::size_t header = section_lines["scheme"];
        const RawValue name = require(sec, "scheme", "name", header);
        try {
            scheme_from_name(name.value);
        } catch (const std::invalid_argument& e) {
            fail(name.line, e.what());
        }
        config.scheme = name.value;
        if (const auto rv = take(sec, "theta")) {
            config.theta = parse_double(*rv, "theta");
            if (!(config.theta >= 0.0 && config.theta <= 1.0)) {
                fail(rv->line, "theta must lie in [0, 1]");
            }
        }
        if (const auto rv = take(sec, "implicit_method")) {
            if (rv->value == "fixed-point") {
                config.implicit.method = ImplicitSolveConfig::Method::FixedPoint;
            } else if (rv->value == "newton") {
                config.implicit.method = ImplicitSolveConfig::Method::NewtonNumericJacobian;
            } else {
                fail(rv->line, "implicit_method must be 'fixed-point' or 'newton'");
            }
        }
        if (const auto rv = take(sec, "implicit_tolerance")) {
            config.implicit.tolerance = parse_double(*rv, "implicit_tolerance");
            if (!(config.implicit.tolerance > 0.0)) {
                fail(rv->line, "implicit_tolerance must be positive");
            }
        }
        if (const auto rv = take(sec, "implicit_max_iterations")) {
            config.implicit.max_iterations = parse_size(*rv, "implicit_max_iterations");
            if (config.implicit.max_iterations == 0) {
                fail(rv->line, "implicit_max_iterations must be at least 1");
            }
        }
        reject_leftovers(sec, "scheme");
    }

    // [converge]
    if (section_lines.count("converge") != 0) {
        SectionMap& sec = sections["converge"];
        ConvergenceConfig cc;
        if (const auto rv = take(sec, "fine_exponent")) {
            cc.fine_exponent = parse_size(*rv, "fine_exponent");
        }
        if (const auto rv = take(sec, "ratios")) {
            cc.ratios = parse_size_list(*rv, "ratios");
        }
        if (const auto rv = take(sec, "paths")) {
            cc.paths = parse_size(*rv, "paths");
        }
        if (const auto rv = take(sec, "horizon")) {
            cc.horizon = parse_double(*rv, "horizon");
        }
        if (const auto rv = take(sec, "reference")) {
            if (rv->value == "exact-linear") {
                cc.reference = ReferenceKind::ExactLinear;
            } else if (rv->value == "fine-numerical") {
                cc.reference = ReferenceKind::FineNumerical;
            } else {
                fail(rv->line, "reference must be 'exact-linear' or 'fine-numerical'");
            }
        }
        if (const auto rv = take(sec, "reference_scheme")) {
            try {
                cc.reference_scheme = scheme_from_name(rv->value);
            } catch (const std::invalid_argument& e) {
                fail(rv->line, e.what());
            }
        }
        reject_leftovers(sec, "converge");
        config.converge = cc;
    }

    // [stability]
    if (section_lines.count("stability") != 0) {
        SectionMap& sec = sections["stability"];
        const std::size_t header = section_lines["stability"];
        StabilitySection ss;
        ss.dts = parse_double_list(require(sec, "stability", "dts", header), "dts");
        if (const auto rv = take(sec, "horizon")) {
            ss.config.horizon = parse_double(*rv, "horizon");
        }
        if (const auto rv = take(sec, "paths")) {
            ss.config.paths = parse_size(*rv, "paths");
        }
        if (const auto rv = take(sec, "max_records")) {
            ss.config.max_records = parse_size(*rv, "max_records");
        }
        if (const auto rv = take(sec, "epsilon")) {
            ss.config.epsilon = parse_double(*rv, "epsilon");
        }
        reject_leftovers(sec, "stability");
        config.stability = std::move(ss);
    }

    // [amplification]
    if (section_lines.count("amplification") != 0) {
        SectionMap& sec = sections["amplification"];
        const std::size_t header = section_lines["amplification"];
        AmplificationSection as;
        as.dt = parse_double(require(sec, "amplification", "dt", header), "dt");
        if (const auto rv = take(sec, "samples")) {
            as.config.samples = parse_size(*rv, "samples");
        }
        reject_leftovers(sec, "amplification");
        config.amplification = as;
    }

    // [path]
    if (section_lines.count("path") != 0) {
        SectionMap& sec = sections["path"];
        const std::size_t header = section_lines["path"];
        PathSection ps;
        ps.dt = parse_double(require(sec, "path", "dt", header), "dt");
        ps.steps = parse_size(require(sec, "path", "steps", header), "steps");
        if (ps.steps == 0) {
            fail(header, "path steps must be at least 1");
        }
        reject_leftovers(sec, "path");
        config.path = ps;
    }

    // [output]
    if (section_lines.count("output") != 0) {
        SectionMap& sec = sections["output"];
        if (const auto rv = take(sec, "dir")) {
            config.out_dir = rv->value;
        }
        reject_leftovers(sec, "output");
    }

    return config;
}

RunConfig load_config_file(const std::string& path) {
    return parse_config(read_text_file(path));
}

ProblemBundle make_bundle(const RunConfig& config) {
    try {
        return builtin_problem(config.problem_name, config.problem_params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config [problem]: ") + e.what());
    }
}

SchemeSpec make_scheme_spec(const RunConfig& config, const ProblemBundle& bundle) {
    SchemeSpec spec;
    spec.kind = scheme_from_name(config.scheme);
    spec.theta = scheme_uses_theta(spec.kind) ? config.theta : 0.0;
    spec.implicit = config.implicit;
    if (scheme_uses_split(spec.kind)) {
        if (!bundle.split) {
            throw ConfigError("config [scheme]: " + config.scheme +
                              " requires a problem with a drift split");
        }
        spec.split = bundle.split;
    }
    return spec;
}

}  // namespace jsde

// SPDX-License-Identifier: MIT
#include "jsde/config.hpp"

#include <string>

#include <gtest/gtest.h>

#include "jsde/schemes.hpp"

namespace {

using jsde::ConfigError;
using jsde::parse_config;
using jsde::RunConfig;

// Asserts that parsing fails and the message mentions `needle`.
void expect_error_containing(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
        FAIL() << "expected ConfigError containing '" << needle << "'";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos)
            << "actual message: " << e.what();
    }
}

const char* kFullConfig = R"(# full example exercising every section
seed = 42
threads = 3

[problem]
name = linear
a = -7
b = 1
c = 1
lambda = 4

[scheme]
name = cstm
theta = 0.5
implicit_method = newton
implicit_tolerance = 1e-10
implicit_max_iterations = 50

[converge]
fine_exponent = 10
ratios = 2,4,8
paths = 500
horizon = 0.25
reference = exact-linear

[stability]
dts = 0.02,0.1,0.5
horizon = 40
paths = 250
max_records = 101
epsilon = 0.002

[amplification]
dt = 0.1
samples = 50000

[path]
dt = 0.01
steps = 200

[output]
dir = results
)";

TEST(ParseConfig, FullDocumentRoundTrip) {
    const RunConfig cfg = parse_config(kFullConfig);
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.threads, 3u);
    EXPECT_EQ(cfg.out_dir, "results");
    EXPECT_EQ(cfg.problem_name, "linear");
    ASSERT_EQ(cfg.problem_params.size(), 4u);
    EXPECT_EQ(cfg.problem_params[0].first, "a");
    EXPECT_DOUBLE_EQ(cfg.problem_params[0].second, -7.0);
    EXPECT_EQ(cfg.scheme, "cstm");
    EXPECT_DOUBLE_EQ(cfg.theta, 0.5);
    EXPECT_EQ(cfg.implicit.method, jsde::ImplicitSolveConfig::Method::NewtonNumericJacobian);
    EXPECT_DOUBLE_EQ(cfg.implicit.tolerance, 1e-10);
    EXPECT_EQ(cfg.implicit.max_iterations, 50u);

    ASSERT_TRUE(cfg.converge.has_value());
    EXPECT_EQ(cfg.converge->fine_exponent, 10u);
    EXPECT_EQ(cfg.converge->ratios, (std::vector<std::size_t>{2, 4, 8}));
    EXPECT_EQ(cfg.converge->paths, 500u);
    EXPECT_DOUBLE_EQ(cfg.converge->horizon, 0.25);
    EXPECT_EQ(cfg.converge->reference, jsde::ReferenceKind::ExactLinear);

    ASSERT_TRUE(cfg.stability.has_value());
    EXPECT_EQ(cfg.stability->dts, (std::vector<double>{0.02, 0.1, 0.5}));
    EXPECT_DOUBLE_EQ(cfg.stability->config.horizon, 40.0);
    EXPECT_EQ(cfg.stability->config.paths, 250u);
    EXPECT_EQ(cfg.stability->config.max_records, 101u);
    EXPECT_DOUBLE_EQ(cfg.stability->config.epsilon, 0.002);

    ASSERT_TRUE(cfg.amplification.has_value());
    EXPECT_DOUBLE_EQ(cfg.amplification->dt, 0.1);
    EXPECT_EQ(cfg.amplification->config.samples, 50000u);

    ASSERT_TRUE(cfg.path.has_value());
    EXPECT_DOUBLE_EQ(cfg.path->dt, 0.01);
    EXPECT_EQ(cfg.path->steps, 200u);

    // Echo preserves input order with "" for top-level keys.
    ASSERT_GE(cfg.echo.size(), 4u);
    EXPECT_EQ(std::get<0>(cfg.echo[0]), "");
    EXPECT_EQ(std::get<1>(cfg.echo[0]), "seed");
    EXPECT_EQ(std::get<2>(cfg.echo[0]), "42");
    EXPECT_EQ(std::get<0>(cfg.echo[2]), "problem");
    EXPECT_EQ(std::get<1>(cfg.echo[2]), "name");
}

TEST(ParseConfig, MinimalDocumentGetsDefaults) {
    const RunConfig cfg = parse_config("[problem]\nname = linear\n[scheme]\nname = tamed\n");
    EXPECT_EQ(cfg.seed, 0u);
    EXPECT_EQ(cfg.threads, 1u);
    EXPECT_EQ(cfg.out_dir, "out");
    EXPECT_FALSE(cfg.converge.has_value());
    EXPECT_FALSE(cfg.stability.has_value());
    EXPECT_DOUBLE_EQ(cfg.theta, 0.0);
}

TEST(ParseConfig, CommentsAndBlankLinesIgnored) {
    const RunConfig cfg = parse_config(
        "# leading comment\n\n[problem]\nname = linear  # trailing comment\n\n"
        "[scheme]\nname = stm\ntheta = 1\n");
    EXPECT_EQ(cfg.problem_name, "linear");
    EXPECT_DOUBLE_EQ(cfg.theta, 1.0);
}

TEST(ParseConfig, RejectionCatalog) {
    const std::string base = "[problem]\nname = linear\n[scheme]\nname = stm\n";
    expect_error_containing("[problem]\nname = linear\n", "scheme");
    expect_error_containing("[scheme]\nname = stm\n", "problem");
    expect_error_containing(base + "[frobnicate]\n", "unknown section");
    expect_error_containing(base + "[scheme]\n", "duplicate section");
    expect_error_containing("wibble = 3\n" + base, "unknown top-level key");
    expect_error_containing(base + "[output]\ndir = out\ncolor = red\n", "unknown key");
    expect_error_containing("[problem]\nname = linear\nname = quartic\n[scheme]\nname = stm\n",
                            "duplicate key");
    expect_error_containing("[problem]\nname = linear\na = fast\n[scheme]\nname = stm\n",
                            "number");
    expect_error_containing("[problem]\nname = linear\n[scheme]\nname = milstein\n",
                            "scheme");
    expect_error_containing(base + "theta = 1.5\n", "theta");
    expect_error_containing(base + "theta = -0.25\n", "theta");
    expect_error_containing(base + "implicit_method = secant\n", "implicit_method");
    expect_error_containing("threads = 0\n" + base, "threads");
    expect_error_containing(base + "[stability]\nhorizon = 10\n", "dts");
    expect_error_containing(base + "[amplification]\nsamples = 100\n", "dt");
    expect_error_containing(base + "[path]\ndt = 0.1\n", "steps");
    expect_error_containing(base + "[converge]\nreference = oracle\n", "reference");
    expect_error_containing(base + "not-a-pair\n", "=");
}

TEST(ParseConfig, DuplicateKeyReportsBothLines) {
    try {
        parse_config("[problem]\nname = linear\nname = quartic\n[scheme]\nname = stm\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("2"), std::string::npos) << msg;
    }
}

TEST(MakeBundle, MaterializesProblemAndRejectsUnknown) {
    RunConfig cfg = parse_config(kFullConfig);
    const jsde::ProblemBundle bundle = jsde::make_bundle(cfg);
    EXPECT_EQ(bundle.name, "linear");
    ASSERT_TRUE(bundle.problem.linear.has_value());
    EXPECT_DOUBLE_EQ(bundle.problem.linear->a, -7.0);

    cfg.problem_name = "heston";
    EXPECT_THROW(jsde::make_bundle(cfg), ConfigError);
    cfg.problem_name = "linear";
    cfg.problem_params.push_back({"kappa", 2.0});
    EXPECT_THROW(jsde::make_bundle(cfg), ConfigError);
}

TEST(MakeSchemeSpec, WiresThetaSplitAndImplicitSettings) {
    RunConfig cfg = parse_config(kFullConfig);
    jsde::ProblemBundle bundle = jsde::make_bundle(cfg);
    jsde::SchemeSpec spec = jsde::make_scheme_spec(cfg, bundle);
    EXPECT_EQ(spec.kind, jsde::SchemeKind::Cstm);
    EXPECT_DOUBLE_EQ(spec.theta, 0.5);
    EXPECT_EQ(spec.implicit.method, jsde::ImplicitSolveConfig::Method::NewtonNumericJacobian);
    EXPECT_FALSE(spec.split.has_value());

    cfg.scheme = "semi-tamed";
    spec = jsde::make_scheme_spec(cfg, bundle);
    EXPECT_EQ(spec.kind, jsde::SchemeKind::SemiTamed);
    ASSERT_TRUE(spec.split.has_value());
    EXPECT_TRUE(spec.split->v_zero);

    // Theta is dropped for schemes that do not use it.
    cfg.scheme = "tamed";
    spec = jsde::make_scheme_spec(cfg, bundle);
    EXPECT_DOUBLE_EQ(spec.theta, 0.0);

    bundle.split.reset();
    cfg.scheme = "compensated-semi-tamed";
    EXPECT_THROW(jsde::make_scheme_spec(cfg, bundle), ConfigError);
}

}  // namespace

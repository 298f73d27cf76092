// SPDX-License-Identifier: MIT

#include "jsde/problem.hpp"

#include <cmath>
#include <map>

namespace jsde {

double compensated_drift(const JumpSdeProblem& problem, double x) {
    return problem.drift(x) + problem.lambda * problem.jump(x);
}

JumpSdeProblem as_problem(const LinearJumpSde& linear) {
    JumpSdeProblem p;
    const double a = linear.a;
    const double b = linear.b;
    const double c = linear.c;
    p.drift = [a](double x) { return a * x; };
    p.diffusion = [b](double x) { return b * x; };
    p.jump = [c](double x) { return c * x; };
    p.lambda = linear.lambda;
    p.x0 = linear.x0;
    p.linear = linear;
    return p;
}

double exact_linear_solution(const LinearJumpSde& linear, double t, double w_t,
                             std::uint64_t n_t) {
    if (linear.c <= -1.0) {
        throw std::invalid_argument("exact linear solution requires c > -1");
    }
    if (t < 0.0) {
        throw std::invalid_argument("exact linear solution requires t >= 0");
    }
    const double exponent = (linear.a - 0.5 * linear.b * linear.b) * t + linear.b * w_t +
                            std::log1p(linear.c) * static_cast<double>(n_t);
    return linear.x0 * std::exp(exponent);
}

double exact_linear_second_moment(const LinearJumpSde& linear, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("second moment requires t >= 0");
    }
    const double l = 2.0 * linear.a + linear.b * linear.b +
                     linear.lambda * linear.c * (2.0 + linear.c);
    return linear.x0 * linear.x0 * std::exp(l * t);
}

namespace {

// Applies overrides onto a default parameter map, rejecting unknown keys.
std::map<std::string, double> merge_params(
    std::map<std::string, double> defaults,
    const std::vector<std::pair<std::string, double>>& overrides,
    const std::string& problem_name) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            throw std::invalid_argument("problem '" + problem_name +
                                        "' has no parameter '" + key + "'");
        }
        it->second = value;
    }
    return defaults;
}

}  // namespace

ProblemBundle builtin_problem(const std::string& name,
                              const std::vector<std::pair<std::string, double>>& params) {
    if (name == "linear") {
        const auto p = merge_params(
            {{"a", 1.0}, {"b", 1.0}, {"c", 0.5}, {"lambda", 1.0}, {"x0", 1.0}}, params, name);
        LinearJumpSde lin{p.at("a"), p.at("b"), p.at("c"), p.at("lambda"), p.at("x0")};
        ProblemBundle bundle{name, as_problem(lin), std::nullopt};
        // Natural split: the full linear drift is globally Lipschitz, so the
        // tamed part is empty. This is the split the semi-tamed stability
        // comparison on the linear equation uses.
        const double a = lin.a;
        bundle.split =
            DriftSplit{[a](double x) { return a * x; }, [](double) { return 0.0; }, true};
        return bundle;
    }
    if (name == "quartic") {
        const auto p = merge_params({{"lambda", 1.0}, {"x0", 1.0}}, params, name);
        JumpSdeProblem prob;
        prob.drift = [](double x) { return -(x * x * x * x); };
        prob.diffusion = [](double x) { return x; };
        prob.jump = [](double x) { return x; };
        prob.lambda = p.at("lambda");
        prob.x0 = p.at("x0");
        ProblemBundle bundle{name, std::move(prob), std::nullopt};
        // No Lipschitz component to separate: u = 0, v = f.
        bundle.split = DriftSplit{[](double) { return 0.0; },
                                  [](double x) { return -(x * x * x * x); }};
        return bundle;
    }
    if (name == "cubic_split") {
        const auto p = merge_params({{"lambda", 1.0}, {"x0", 1.0}}, params, name);
        JumpSdeProblem prob;
        prob.drift = [](double x) { return -4.0 * x - x * x * x; };
        prob.diffusion = [](double x) { return x; };
        prob.jump = [](double x) { return x; };
        prob.lambda = p.at("lambda");
        prob.x0 = p.at("x0");
        ProblemBundle bundle{name, std::move(prob), std::nullopt};
        bundle.split = DriftSplit{[](double x) { return -4.0 * x; },
                                  [](double x) { return -(x * x * x); }};
        return bundle;
    }
    throw std::invalid_argument("unknown problem '" + name + "'");
}

std::vector<std::string> builtin_problem_names() {
    return {"linear", "quartic", "cubic_split"};
}

}  // namespace jsde

// SPDX-License-Identifier: MIT

#include "jsde/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jsde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double linear_l(double a, double b, double c, double lambda) {
    return 2.0 * a + b * b + lambda * c * (2.0 + c);
}

double cstm_amplification(double a, double b, double c, double lambda, double theta,
                          double dt) {
    const double A = a + lambda * c;
    const double denom_root = 1.0 - theta * dt * A;
    if (denom_root == 0.0) {
        throw std::domain_error("cstm amplification singular: 1 - theta*dt*(a+lambda*c) == 0");
    }
    const double one_minus = 1.0 - theta;
    const double numer = 1.0 + (2.0 * one_minus * A + b * b + c * c * lambda) * dt +
                         one_minus * one_minus * A * A * dt * dt;
    return numer / (denom_root * denom_root);
}

double cstm_max_stable_dt(double a, double b, double c, double lambda, double theta) {
    const double l = linear_l(a, b, c, lambda);
    if (l >= 0.0) {
        throw std::domain_error("exact solution is not mean-square stable (l >= 0)");
    }
    if (theta >= 0.5) {
        return kInf;  // A-stable branch: stable for every step size
    }
    const double A = a + lambda * c;
    return -l / ((1.0 - 2.0 * theta) * A * A);
}

double stm_amplification(double a, double b, double c, double lambda, double theta,
                         double dt) {
    const double denom_root = 1.0 - theta * a * dt;
    if (denom_root == 0.0) {
        throw std::domain_error("stm amplification singular: 1 - theta*a*dt == 0");
    }
    const double e = 1.0 + (1.0 - theta) * a * dt;
    const double numer = e * e + b * b * dt + c * c * (lambda * dt + lambda * lambda * dt * dt) +
                         2.0 * c * lambda * dt * e;
    return numer / (denom_root * denom_root);
}

double semi_tamed_linear_amplification(double a, double b, double c, double lambda,
                                       double dt) {
    const double A = a + lambda * c;
    return 1.0 + A * A * dt * dt + (b * b + lambda * c * c + 2.0 * a + 2.0 * lambda * c) * dt;
}

double semi_tamed_linear_max_dt(double a, double b, double c, double lambda) {
    const double l = linear_l(a, b, c, lambda);
    if (l >= 0.0) {
        throw std::domain_error("exact solution is not mean-square stable (l >= 0)");
    }
    const double A = a + lambda * c;
    if (A == 0.0) {
        return kInf;  // factor is 1 + l*dt with l < 0: stable for every dt
    }
    return -l / (A * A);
}

TamedCertification tamed_linear_max_dt(double a, double b, double c, double lambda) {
    const double l = linear_l(a, b, c, lambda);
    if (l >= 0.0) {
        throw std::domain_error("exact solution is not mean-square stable (l >= 0)");
    }
    // The sign condition s(dt) = a*(1 + lambda*c*dt) is linear in dt, so
    // holding at dt -> 0 (sign of a) and at the candidate bound covers the
    // whole interval.
    TamedCertification best;
    const double two_a_minus_l = 2.0 * a - l;
    if (two_a_minus_l > 0.0) {
        const double cand = two_a_minus_l / (a * a + lambda * lambda * c * c);
        if (a <= 0.0 && a * (1.0 + lambda * c * cand) <= 0.0 && cand > best.max_dt) {
            best = {cand, 1};
        }
    }
    const double A = a + lambda * c;
    if (A != 0.0) {
        const double cand = -l / (A * A);
        if (a > 0.0 && a * (1.0 + lambda * c * cand) > 0.0 && cand > best.max_dt) {
            best = {cand, 2};
        }
    }
    return best;
}

double nonlinear_alpha(double mu, double sigma, double gamma, double lambda) {
    if (sigma < 0.0 || gamma < 0.0) {
        throw std::invalid_argument("sigma and gamma must be >= 0");
    }
    const double sq = std::sqrt(gamma);
    return 2.0 * mu + sigma + lambda * sq * (sq + 2.0);
}

double backward_euler_rate_beta1(double mu, double sigma, double gamma, double lambda,
                                 double dt) {
    const double alpha = nonlinear_alpha(mu, sigma, gamma, lambda);
    if (alpha >= 0.0) {
        throw std::domain_error("beta1 requires alpha < 0");
    }
    const double lam2gam = lambda * lambda * gamma;
    if (lam2gam > 0.0 && !(dt < -alpha / lam2gam)) {
        throw std::domain_error("beta1 requires dt < -alpha/(lambda^2*gamma)");
    }
    const double denom = 1.0 - 2.0 * mu * dt;
    if (!(denom > 0.0)) {
        throw std::domain_error("beta1 requires 1 - 2*mu*dt > 0");
    }
    const double sq = std::sqrt(gamma);
    const double numer = 1.0 + (sigma + lambda * gamma + 2.0 * lambda * sq) * dt +
                         lam2gam * dt * dt;
    return std::log(numer / denom) / dt;
}

double compensated_backward_euler_rate_beta2(double mu, double sigma, double gamma,
                                             double lambda, double dt) {
    const double alpha = nonlinear_alpha(mu, sigma, gamma, lambda);
    if (alpha >= 0.0) {
        throw std::domain_error("beta2 requires alpha < 0");
    }
    const double sq = std::sqrt(gamma);
    const double numer = 1.0 + (sigma + lambda * gamma) * dt;
    const double denom = 1.0 - 2.0 * (mu + lambda * sq) * dt;
    return std::log(numer / denom) / dt;
}

double semi_tamed_nonlinear_max_dt(const NonlinearStabilityInputs& in) {
    const double alpha1 =
        -2.0 * in.rho + in.theta_g * in.theta_g + in.lambda * in.C * (2.0 + in.C);
    if (!(alpha1 < 0.0)) {
        throw std::domain_error("semi-tamed bound requires alpha1 < 0");
    }
    if (!(2.0 * in.beta - in.beta_bar > 0.0)) {
        throw std::domain_error("semi-tamed bound requires 2*beta - beta_bar > 0");
    }
    const double klc = in.K + in.lambda * in.C;
    const double b1 = -alpha1 / (klc * klc);
    const double b2 = 2.0 * in.beta / ((2.0 * klc + in.beta_bar) * in.beta_bar);
    const double b3 = (2.0 * in.beta - in.beta_bar) / (2.0 * klc * in.beta_bar);
    return std::min({b1, b2, b3});
}

double tamed_nonlinear_max_dt(const NonlinearStabilityInputs& in) {
    if (!(in.beta - in.C * in.beta_bar > 0.0)) {
        throw std::domain_error("tamed bound requires beta - C*beta_bar > 0");
    }
    if (!(in.beta_bar * (1.0 + 2.0 * in.C) - 2.0 * in.beta < 0.0)) {
        throw std::domain_error("tamed bound requires beta_bar*(1+2C) - 2*beta < 0");
    }
    const double numer_term = in.K + in.theta_g * in.theta_g + in.lambda * in.C * in.C -
                              2.0 * in.mu * in.lambda + 2.0 * in.lambda * in.C * in.K;
    if (!(numer_term < 0.0)) {
        throw std::domain_error(
            "tamed bound requires K + theta_g^2 + lambda*C^2 - 2*mu*lambda + 2*lambda*C*K < 0");
    }
    const double b1 = -numer_term / (2.0 * in.K * in.K + in.lambda * in.lambda * in.C * in.C);
    const double b2 = (in.beta - in.C * in.beta_bar) / (in.beta_bar * in.beta_bar);
    return std::min(b1, b2);
}

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::Unstable: return "Unstable";
        case Classification::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

// Least-squares slope of ln(ms) against t over [first, last).
double log_slope(const std::vector<StabilityPoint>& series, std::size_t first,
                 std::size_t last) {
    const std::size_t n = last - first;
    double st = 0.0, sy = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        st += series[i].t;
        sy += std::log(series[i].mean_square);
    }
    const double mt = st / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double dt = series[i].t - mt;
        sxx += dt * dt;
        sxy += dt * (std::log(series[i].mean_square) - my);
    }
    if (sxx == 0.0) {
        return 0.0;
    }
    return sxy / sxx;
}

}  // namespace

ClassificationResult classify_mean_square(const std::vector<StabilityPoint>& series,
                                          double epsilon) {
    if (series.size() < 8) {
        throw std::invalid_argument("mean-square series must have at least 8 points");
    }
    for (const auto& p : series) {
        if (!std::isfinite(p.mean_square)) {
            return {Classification::Unstable, kInf};
        }
    }
    // An exact zero means the mean square decayed below the smallest
    // representable positive value; the series is unusable from there on, and
    // reaching the floor from a positive start is decisive decay.
    std::size_t zero_at = series.size();
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].mean_square == 0.0) {
            zero_at = i;
            break;
        }
    }
    if (zero_at < series.size()) {
        if (zero_at < 4) {
            return {Classification::Stable, -kInf};
        }
        return {Classification::Stable, log_slope(series, zero_at / 2, zero_at)};
    }
    const double slope = log_slope(series, series.size() / 2, series.size());
    if (slope < -epsilon) {
        return {Classification::Stable, slope};
    }
    if (slope > epsilon) {
        return {Classification::Unstable, slope};
    }
    return {Classification::Inconclusive, slope};
}

}  // namespace jsde

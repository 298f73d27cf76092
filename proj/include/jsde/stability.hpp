// SPDX-License-Identifier: MIT
#pragma once
//
// Closed-form mean-square stability analysis for the linear test equation
// dX = aX dt + bX dW + cX dN and for the nonlinear assumptions, plus an
// empirical classifier for simulated mean-square trajectories.
//
// The central quantity for the linear equation is
//
//   l = 2a + b^2 + lambda*c*(2+c),
//
// the exact solution's mean-square decay exponent: E|X(t)|^2 = E|X_0|^2 e^{lt},
// stable iff l < 0. Each scheme has a one-step amplification factor G with
// E|Y_{n+1}|^2 = G * E|Y_n|^2; G < 1 is scheme stability at that step size.

#include <stdexcept>
#include <vector>

namespace jsde {

// Constants of the nonlinear stability assumptions: mu is the one-sided
// Lipschitz constant of the drift, sigma/gamma the squared Lipschitz constants
// of diffusion and jump coefficient. The remaining fields parameterize the
// split-drift assumptions: <x-y, u(x)-u(y)> <= -rho|x-y|^2, |u| growth K,
// jump Lipschitz C, diffusion theta_g, and the polynomial-growth constants
// beta, beta_bar, a_exp of v.
struct NonlinearStabilityInputs {
    double mu = 0.0;
    double sigma = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double beta_bar = 0.0;
    double theta_g = 0.0;
    double K = 0.0;
    double C = 0.0;
    double a_exp = 2.0;
};

// l = 2a + b^2 + lambda*c*(2+c); exact solution mean-square stable iff < 0.
double linear_l(double a, double b, double c, double lambda);

// CSTM one-step factor
//   G = [1 + (2(1-t)A + b^2 + c^2 lambda) dt + (1-t)^2 A^2 dt^2] / (1 - t dt A)^2
// with A = a + lambda*c. Throws std::domain_error when the denominator
// vanishes.
double cstm_amplification(double a, double b, double c, double lambda, double theta,
                          double dt);

// Largest stable step for CSTM: +infinity for theta >= 1/2 (A-stability),
// otherwise -l / ((1-2 theta) A^2). Throws std::domain_error when l >= 0
// (the exact solution itself is unstable).
double cstm_max_stable_dt(double a, double b, double c, double lambda, double theta);

// STM one-step factor (uncompensated jumps):
//   [ (1+(1-t)a dt)^2 + b^2 dt + c^2(lambda dt + lambda^2 dt^2)
//     + 2 c lambda dt (1+(1-t)a dt) ] / (1 - t a dt)^2.
double stm_amplification(double a, double b, double c, double lambda, double theta,
                         double dt);

// Semi-tamed factor on the linear equation under the cubic-free split
// (u = ax, v = 0), where the step is exactly explicit Euler:
//   G = 1 + (a+lambda*c)^2 dt^2 + (b^2 + lambda*c^2 + 2a + 2 lambda c) dt.
double semi_tamed_linear_amplification(double a, double b, double c, double lambda,
                                       double dt);

// Exact stability threshold of the semi-tamed scheme on the linear equation:
// -l/(a+lambda*c)^2; +infinity when a+lambda*c == 0 (factor 1 + l dt < 1 for
// every dt). Throws std::domain_error when l >= 0.
double semi_tamed_linear_max_dt(double a, double b, double c, double lambda);

// Sufficient stability certification for the tamed scheme on the linear
// equation. Two alternative sufficient conditions exist:
//   case 1: a(1+lambda*c*dt) <= 0, 2a-l > 0, dt < (2a-l)/(a^2+lambda^2 c^2)
//   case 2: a(1+lambda*c*dt) > 0,            dt < -l/(a+lambda*c)^2
// Returns the largest dt certified by either case (sign conditions evaluated
// on (0, dt]), tagging which case produced it; case_tag == 0 with max_dt == 0
// means neither case certifies any positive step. Sufficiency only: steps
// above the bound are not proven unstable, the empirical classifier decides.
struct TamedCertification {
    double max_dt = 0.0;
    int case_tag = 0;
};
TamedCertification tamed_linear_max_dt(double a, double b, double c, double lambda);

// alpha = 2 mu + sigma + lambda*sqrt(gamma)*(sqrt(gamma)+2): mean-square
// contraction exponent bound of the exact solution under the nonlinear
// assumptions.
double nonlinear_alpha(double mu, double sigma, double gamma, double lambda);

// Decay exponent of backward Euler (STM theta=1) under the nonlinear
// assumptions:
//   beta1 = (1/dt) ln[ (1 + (sigma + lambda gamma + 2 lambda sqrt(gamma)) dt
//                        + lambda^2 gamma dt^2) / (1 - 2 mu dt) ].
// Requires alpha < 0, dt < -alpha/(lambda^2 gamma), 1 - 2 mu dt > 0; throws
// std::domain_error otherwise.
double backward_euler_rate_beta1(double mu, double sigma, double gamma, double lambda,
                                 double dt);

// Decay exponent of compensated backward Euler (CSTM theta=1):
//   beta2 = (1/dt) ln[ (1 + (sigma + lambda gamma) dt)
//                      / (1 - 2 (mu + lambda sqrt(gamma)) dt) ],
// negative for every dt > 0 when alpha < 0 (A-stability). Throws
// std::domain_error when alpha >= 0.
double compensated_backward_euler_rate_beta2(double mu, double sigma, double gamma,
                                             double lambda, double dt);

// Step-size bound certifying mean-square stability of the semi-tamed scheme
// under the nonlinear split assumptions, the minimum of three bounds built
// from alpha1 = -2 rho + theta_g^2 + lambda*C*(2+C). Requires alpha1 < 0 and
// 2 beta - beta_bar > 0; throws std::domain_error naming the failed
// hypothesis.
double semi_tamed_nonlinear_max_dt(const NonlinearStabilityInputs& in);

// Step-size bound certifying mean-square stability of the tamed scheme under
// the nonlinear assumptions, the minimum of two bounds. Requires
// beta - C*beta_bar > 0, beta_bar*(1+2C) - 2 beta < 0, and
// K + theta_g^2 + lambda C^2 - 2 mu lambda + 2 lambda C K < 0; throws
// std::domain_error naming the failed hypothesis.
double tamed_nonlinear_max_dt(const NonlinearStabilityInputs& in);

// ---- empirical classification ----

enum class Classification { Stable, Unstable, Inconclusive };

const char* classification_name(Classification c);

struct StabilityPoint {
    double t;
    double mean_square;
};

struct ClassificationResult {
    Classification label;
    double rate;  // fitted decay exponent per unit time
};

// Classifies a simulated mean-square series:
//   Unstable      any non-finite value, or fitted slope > epsilon
//   Stable        fitted slope < -epsilon
//   Inconclusive  otherwise
// The slope is the least-squares slope of ln E|Y|^2 against t over the second
// half of the series. epsilon is per unit time (default 1e-3). A value that
// underflows to exact zero ends the usable series: the fit runs on the
// positive prefix, and a series that reached zero from a positive start is
// Stable outright (decay to the floating-point floor is decisive), with rate
// -infinity when the prefix is too short to fit. Throws
// std::invalid_argument for series shorter than 8 points.
ClassificationResult classify_mean_square(const std::vector<StabilityPoint>& series,
                                          double epsilon = 1e-3);

}  // namespace jsde

#pragma once

#include <cstdint>
#include <optional>

#include "chainbound/errors.hpp"

namespace chainbound::bounds {

// Inputs of a one-sided deviation bound, in normalized units.
struct BoundInput {
    double mu = 0.0;
    double eps = 0.0;
    std::int64_t n = 0;
    double lambda0 = 0.0;

    void validate() const;  // mu in (0,1), eps > 0, mu+eps < 1, lambda0 in [0,1), n >= 1
};

// Delta = 1 + 4*lambda0*x*(1-x) / (mu*(1-mu)*(1-lambda0)^2); >= 1 for lambda0 >= 0.
double delta_factor(double x, double mu, double lambda0);

// Perron root theta(t) of the tilted two-state operator.
double tilted_perron(double t, double mu, double lambda);

// Argmax of t*x - log(theta(t)); positive iff x > mu.
double optimal_tilt(double x, double mu, double lambda0);

// Rate function of the extremal two-state chain, in nats.
double rate_function(double x, double mu, double lambda0);

struct RateEvaluation {
    double x, xbar;
    double delta;
    double t0;
    double theta;   // theta(t0)
    double rate;    // I(x)
    double deriv1;  // I'(x)
    double deriv2;  // I''(x) = 1/(sqrt(Delta) x xbar)
};
RateEvaluation rate_evaluation(double x, double mu, double lambda0);

// Bernoulli relative entropy KL(x || mu); the iid rate.
double kl_bernoulli(double x, double mu);

// All bounds are returned as log-probabilities.
double log_product_bound(const BoundInput& in);   // -n * I(mu+eps)
double log_gaussian_bound(const BoundInput& in);  // -2 n eps^2 (1-l0)/(1+l0)
double log_hoeffding_iid(double mu, double eps, std::int64_t n);

// Comparator bound; takes the raw (unclipped) second eigenvalue and requires
// 5*eps <= mu.
double log_lezaud_bound(double mu, double eps, std::int64_t n, double lambda);
double lezaud_rate(double mu, double eps, double lambda);  // exponential rate L(mu,eps)

// Limit of rate_function(mu+eps)/lezaud_rate as eps -> 0: 2/((1-mu)(1+lambda)).
double rate_ratio_limit(double mu, double lambda);

enum class BoundKind { product, gaussian };

// Smallest n with bound(n) <= delta (n >= 1 by convention).
std::int64_t plan_sample_size(double mu, double eps, double delta, double lambda0, BoundKind kind);

// The quadratic in e^t whose roots locate the optimal tilt, with its
// discriminant and the arbitration between the two roots.
struct TiltQuadratic {
    double a, b, c;
    double discriminant;
    double root_low, root_high;  // both roots, ascending
    double chosen_root;          // the one solving the stationarity condition
    double t0;                   // log(chosen_root)
};
TiltQuadratic tilt_quadratic(double x, double mu, double lambda);

struct BoundReport {
    double mu, eps;          // normalized units
    double mu_raw, eps_raw;  // raw observable units
    std::int64_t n;
    double lambda, lambda0;
    double log_product;
    double log_gaussian;
    double log_hoeffding;
    std::optional<double> log_lezaud;      // absent outside 5*eps <= mu
    std::optional<double> ratio_asymptote; // absent for lambda < 0
};
BoundReport make_bound_report(double mu, double eps, std::int64_t n, double lambda,
                              double lambda0, double mu_raw, double eps_raw);

}  // namespace chainbound::bounds

#include "chainbound/bounds.hpp"

#include <cmath>
#include <string>

namespace chainbound::bounds {

namespace {

void check_point(double x, double mu, double lambda0) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("x must lie in [0,1]");
    if (!(lambda0 >= 0.0 && lambda0 < 1.0)) throw domain_error("lambda0 must lie in [0,1)");
}

// x * log(num/den) with the 0*log(0) = 0 convention at the endpoints.
double xlog_ratio(double x, double num, double den) {
    if (x == 0.0) return 0.0;
    return x * std::log(num / den);
}

}  // namespace

void BoundInput::validate() const {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (!(eps > 0.0)) throw domain_error("eps must be positive");
    if (!(mu + eps < 1.0)) throw domain_error("mu + eps must be below 1");
    if (!(lambda0 >= 0.0 && lambda0 < 1.0)) throw domain_error("lambda0 must lie in [0,1)");
    if (n < 1) throw domain_error("n must be at least 1");
}

double delta_factor(double x, double mu, double lambda0) {
    check_point(x, mu, lambda0);
    double one_minus = 1.0 - lambda0;
    return 1.0 + 4.0 * lambda0 * x * (1.0 - x) / (mu * (1.0 - mu) * one_minus * one_minus);
}

double tilted_perron(double t, double mu, double lambda) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    double mubar = 1.0 - mu;
    double et = std::exp(t);
    double trace = (mubar + lambda * mu) + (mu + lambda * mubar) * et;
    double disc = trace * trace - 4.0 * lambda * et;
    if (disc < 0.0) throw domain_error("negative discriminant in tilted Perron root");
    return 0.5 * (trace + std::sqrt(disc));
}

double optimal_tilt(double x, double mu, double lambda0) {
    check_point(x, mu, lambda0);
    double mubar = 1.0 - mu;
    double alpha = mu + mubar * lambda0;   // pairs with the x-weighted factor
    double beta = mubar + mu * lambda0;
    double sd = std::sqrt(delta_factor(x, mu, lambda0));
    double spread = 1.0 - 2.0 * x;  // xbar - x
    return std::log(beta * (sd - spread) / (alpha * (sd + spread)));
}

RateEvaluation rate_evaluation(double x, double mu, double lambda0) {
    check_point(x, mu, lambda0);
    double xbar = 1.0 - x;
    double mubar = 1.0 - mu;
    double alpha = mu + mubar * lambda0;
    double beta = mubar + mu * lambda0;
    double delta = delta_factor(x, mu, lambda0);
    double sd = std::sqrt(delta);
    double qx = 1.0 - 2.0 * xbar / (sd + 1.0);
    double qxbar = 1.0 - 2.0 * x / (sd + 1.0);

    RateEvaluation ev;
    ev.x = x;
    ev.xbar = xbar;
    ev.delta = delta;
    ev.rate = -xlog_ratio(x, alpha, qx) - xlog_ratio(xbar, beta, qxbar);
    ev.t0 = std::log(beta * (sd - (xbar - x)) / (alpha * (sd + (xbar - x))));
    ev.theta = beta * (sd + 1.0) / (sd + xbar - x);
    ev.deriv1 = -std::log(alpha / qx) + std::log(beta / qxbar);
    ev.deriv2 = 1.0 / (sd * x * xbar);
    return ev;
}

double rate_function(double x, double mu, double lambda0) {
    check_point(x, mu, lambda0);
    double xbar = 1.0 - x;
    double mubar = 1.0 - mu;
    double alpha = mu + mubar * lambda0;
    double beta = mubar + mu * lambda0;
    double sd = std::sqrt(delta_factor(x, mu, lambda0));
    double qx = 1.0 - 2.0 * xbar / (sd + 1.0);
    double qxbar = 1.0 - 2.0 * x / (sd + 1.0);
    return -xlog_ratio(x, alpha, qx) - xlog_ratio(xbar, beta, qxbar);
}

double kl_bernoulli(double x, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("x must lie in [0,1]");
    return xlog_ratio(x, x, mu) + xlog_ratio(1.0 - x, 1.0 - x, 1.0 - mu);
}

double log_product_bound(const BoundInput& in) {
    in.validate();
    return -static_cast<double>(in.n) * rate_function(in.mu + in.eps, in.mu, in.lambda0);
}

double log_gaussian_bound(const BoundInput& in) {
    in.validate();
    return -2.0 * (1.0 - in.lambda0) / (1.0 + in.lambda0) * static_cast<double>(in.n) * in.eps *
           in.eps;
}

double log_hoeffding_iid(double mu, double eps, std::int64_t n) {
    BoundInput{mu, eps, n, 0.0}.validate();
    return -static_cast<double>(n) * kl_bernoulli(mu + eps, mu);
}

double lezaud_rate(double mu, double eps, double lambda) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (!(eps > 0.0)) throw domain_error("eps must be positive");
    double arg = 5.0 * eps / mu;
    if (arg > 1.0) throw domain_error("outside Lezaud domain: 5*eps > mu");
    double h = std::sqrt(1.0 - arg) - (1.0 - arg);
    return (1.0 - lambda) * eps * eps / (4.0 * mu * (1.0 + h));
}

double log_lezaud_bound(double mu, double eps, std::int64_t n, double lambda) {
    if (n < 1) throw domain_error("n must be at least 1");
    return (1.0 - lambda) / 5.0 - static_cast<double>(n) * lezaud_rate(mu, eps, lambda);
}

double rate_ratio_limit(double mu, double lambda) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (!(lambda >= 0.0 && lambda < 1.0)) throw domain_error("lambda must lie in [0,1)");
    return 2.0 / ((1.0 - mu) * (1.0 + lambda));
}

std::int64_t plan_sample_size(double mu, double eps, double delta, double lambda0,
                              BoundKind kind) {
    if (!(delta > 0.0 && delta <= 1.0)) throw domain_error("delta must lie in (0,1]");
    BoundInput probe{mu, eps, 1, lambda0};
    probe.validate();
    double rate = kind == BoundKind::product
                      ? rate_function(mu + eps, mu, lambda0)
                      : 2.0 * eps * eps * (1.0 - lambda0) / (1.0 + lambda0);
    if (!(rate > 0.0)) throw domain_error("bound rate is zero");

    double target = -std::log(delta);  // need n * rate >= target
    auto n = static_cast<std::int64_t>(std::ceil(target / rate));
    if (n < 1) n = 1;
    // ceil under roundoff can land one off; settle it against the inequality.
    while (n > 1 && static_cast<double>(n - 1) * rate >= target) --n;
    while (static_cast<double>(n) * rate < target) ++n;
    return n;
}

TiltQuadratic tilt_quadratic(double x, double mu, double lambda) {
    check_point(x, mu, lambda);
    double mubar = 1.0 - mu;
    double alpha = mu + mubar * lambda;
    double beta = mubar + mu * lambda;
    double s = 2.0 * x - 1.0;
    double s2 = s * s;
    double shrink = 1.0 - s2;  // = 4 x (1-x)
    double core = mu * mubar * (1.0 - lambda) * (1.0 - lambda);

    TiltQuadratic q;
    q.a = alpha * alpha * shrink;
    q.b = -2.0 * ((core + lambda) * (1.0 + s2) - 2.0 * lambda * s2);
    q.c = beta * beta * shrink;
    q.discriminant = q.b * q.b - 4.0 * q.a * q.c;
    double sqrt_disc = std::sqrt(std::max(0.0, q.discriminant));
    q.root_low = (-q.b - sqrt_disc) / (2.0 * q.a);
    q.root_high = (-q.b + sqrt_disc) / (2.0 * q.a);

    // Arbitration: the stationarity condition, before squaring, reads
    // (x - xbar) * sqrt(Tr^2 - 4 lambda e^t) = alpha e^t - beta, so the true
    // root makes alpha*u - beta share the sign of 2x-1.
    double sd = std::sqrt(delta_factor(x, mu, lambda));
    q.chosen_root = beta * (sd - (1.0 - 2.0 * x)) / (alpha * (sd + (1.0 - 2.0 * x)));
    q.t0 = std::log(q.chosen_root);
    return q;
}

BoundReport make_bound_report(double mu, double eps, std::int64_t n, double lambda,
                              double lambda0, double mu_raw, double eps_raw) {
    BoundInput in{mu, eps, n, lambda0};
    in.validate();
    BoundReport rep{};
    rep.mu = mu;
    rep.eps = eps;
    rep.mu_raw = mu_raw;
    rep.eps_raw = eps_raw;
    rep.n = n;
    rep.lambda = lambda;
    rep.lambda0 = lambda0;
    rep.log_product = log_product_bound(in);
    rep.log_gaussian = log_gaussian_bound(in);
    rep.log_hoeffding = log_hoeffding_iid(mu, eps, n);
    if (5.0 * eps <= mu) rep.log_lezaud = log_lezaud_bound(mu, eps, n, lambda);
    if (lambda >= 0.0) rep.ratio_asymptote = rate_ratio_limit(mu, lambda);
    return rep;
}

}  // namespace chainbound::bounds

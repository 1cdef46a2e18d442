#include "chainbound/mgf_rate.hpp"

#include <cmath>
#include <functional>

namespace chainbound::mgf {

namespace {

constexpr double kBracketStart = 8.0;
constexpr double kBracketCap = 64.0;

Eigen::MatrixXd clipped_conjugate(const SpectralDecomposition& dec, const GapSummary& gap) {
    Eigen::VectorXd clipped = dec.eigenvalues.cwiseMax(gap.lambda0);
    clipped(0) = dec.eigenvalues(0);
    return dec.basis * clipped.asDiagonal() * dec.basis.transpose();
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw domain_error("eigen solver failed on tilted operator");
    return solver.eigenvalues().maxCoeff();
}

// sup over t >= 0 of a smooth concave objective: golden-section inside an
// expanding bracket, then a derivative-sign bisection to settle t below the
// golden-section noise floor.
struct ConcaveMax {
    double t;
    double value;
};
ConcaveMax maximize_concave(const std::function<double(double)>& objective) {
    auto fd_slope = [&](double t) {
        double h = 1e-6 * std::max(1.0, std::abs(t));
        return (objective(t + h) - objective(t - h)) / (2.0 * h);
    };

    double lo = 0.0;
    double hi = kBracketStart;
    while (fd_slope(hi) > 0.0) {
        hi *= 2.0;
        if (hi > kBracketCap)
            throw domain_error("tilt maximizer not bracketed below t = " +
                               std::to_string(kBracketCap));
    }

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-10) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = objective(d);
        }
    }
    double t = 0.5 * (a + b);

    // Polish: the derivative sign is resolvable far below the width at which
    // the objective itself flattens out.
    double pa = std::max(0.0, t - 1e-4), pb = std::min(kBracketCap, t + 1e-4);
    if (fd_slope(pa) > 0.0 && fd_slope(pb) < 0.0) {
        for (int it = 0; it < 60 && pb - pa > 1e-12; ++it) {
            double mid = 0.5 * (pa + pb);
            (fd_slope(mid) > 0.0 ? pa : pb) = mid;
        }
        t = 0.5 * (pa + pb);
    }
    return {t, objective(t)};
}

}  // namespace

TiltedOperators tilted_operators(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                                 const GapSummary& gap, double t) {
    TiltedOperators ops;
    ops.t = t;
    ops.half_tilt = (0.5 * t * spec.observable.array()).exp();
    Eigen::MatrixXd base = dec.basis * dec.eigenvalues.asDiagonal() * dec.basis.transpose();
    ops.g = ops.half_tilt.asDiagonal() * base * ops.half_tilt.asDiagonal();
    ops.h = ops.half_tilt.asDiagonal() * clipped_conjugate(dec, gap) * ops.half_tilt.asDiagonal();
    return ops;
}

PerronEvaluation perron_values(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                               const GapSummary& gap, double t) {
    TiltedOperators ops = tilted_operators(spec, dec, gap, t);
    PerronEvaluation ev;
    ev.zeta = largest_eigenvalue(ops.g);
    ev.eta = largest_eigenvalue(ops.h);
    ev.prefactor = (spec.stationary.array() * (t * spec.observable.array()).exp()).sum();
    return ev;
}

double log_mgf_exact(const ReversibleChainSpec& spec, double t, std::int64_t n) {
    if (n < 1) throw domain_error("n must be at least 1");
    Eigen::VectorXd tilt = (t * spec.observable.array()).exp();
    Eigen::VectorXd weights = spec.stationary;
    double log_scale = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        weights = (spec.transition.transpose() * weights).cwiseProduct(tilt);
        double total = weights.sum();
        if (!(total > 0.0) || !std::isfinite(total))
            throw domain_error("moment generating function overflowed; |t| too large");
        weights /= total;
        log_scale += std::log(total);
    }
    return log_scale;
}

ChernoffBound matrix_chernoff_bound(const ReversibleChainSpec& spec,
                                    const SpectralDecomposition& dec, const GapSummary& gap,
                                    double x, std::int64_t n, RateKind kind, bool optimize,
                                    double t) {
    if (n < 1) throw domain_error("n must be at least 1");
    if (!(x < 1.0)) throw domain_error("threshold x must be below 1");
    auto log_perron = [&](double s) {
        PerronEvaluation ev = perron_values(spec, dec, gap, s);
        return std::log(kind == RateKind::zeta ? ev.zeta : ev.eta);
    };

    ChernoffBound out;
    if (optimize) {
        ConcaveMax best = maximize_concave([&](double s) { return s * x - log_perron(s); });
        out.t = best.t;
        out.rate = best.value;
    } else {
        if (t < 0.0) throw domain_error("tilt must be nonnegative");
        out.t = t;
        out.rate = t * x - log_perron(t);
    }
    PerronEvaluation ev = perron_values(spec, dec, gap, out.t);
    double rho = kind == RateKind::zeta ? ev.zeta : ev.eta;
    out.log_prefactor = std::log(ev.prefactor) - std::log(rho);
    out.log_bound = out.log_prefactor - static_cast<double>(n) * out.rate;
    return out;
}

EmpiricalRate empirical_rate(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                             const GapSummary& gap, double x, RateKind kind) {
    if (!(x > 0.0 && x < 1.0)) throw domain_error("x must lie in (0,1)");
    auto objective = [&](double s) {
        PerronEvaluation ev = perron_values(spec, dec, gap, s);
        return s * x - std::log(kind == RateKind::zeta ? ev.zeta : ev.eta);
    };
    // For x at or below the mean the supremum over t >= 0 sits at t = 0.
    if (x <= spec.mean) return {0.0, 0.0};
    ConcaveMax best = maximize_concave(objective);
    return {std::max(0.0, best.value), best.t};
}

}  // namespace chainbound::mgf

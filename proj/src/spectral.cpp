#include "chainbound/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace chainbound {

namespace {

constexpr double kGapEpsilon = 1e-12;

}  // namespace

SpectralDecomposition decompose(const ReversibleChainSpec& spec) {
    const Eigen::Index n = spec.size();
    Eigen::VectorXd sqrt_pi = spec.stationary.cwiseSqrt();
    Eigen::MatrixXd conjugate = sqrt_pi.asDiagonal() * spec.transition *
                                sqrt_pi.cwiseInverse().asDiagonal();
    // Reversibility makes this symmetric only up to roundoff; symmetrize
    // explicitly so the solver sees an exactly symmetric matrix.
    Eigen::MatrixXd sym = 0.5 * (conjugate + conjugate.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw validation_error("eigen decomposition failed");

    // Solver returns ascending order; re-sort descending, ties by original
    // index, so output is deterministic.
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd& raw_values = solver.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return raw_values(a) > raw_values(b);
    });

    SpectralDecomposition dec;
    dec.sqrt_pi = std::move(sqrt_pi);
    dec.eigenvalues.resize(n);
    dec.basis.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        dec.eigenvalues(k) = std::clamp(raw_values(order[static_cast<size_t>(k)]), -1.0, 1.0);
        dec.basis.col(k) = solver.eigenvectors().col(order[static_cast<size_t>(k)]);
    }

    if (std::abs(dec.eigenvalues(0) - 1.0) > 1e-9)
        throw validation_error("largest eigenvalue is not 1; kernel is not stochastic enough");
    if (n > 1 && dec.eigenvalues(1) >= 1.0 - kGapEpsilon)
        throw validation_error("second eigenvalue is 1; kernel is reducible");

    // Sign conventions: Perron column entrywise positive (it equals sqrt(pi)),
    // remaining columns by making their largest-magnitude entry positive.
    if (dec.basis.col(0).sum() < 0.0) dec.basis.col(0) = -dec.basis.col(0);
    if ((dec.basis.col(0) - dec.sqrt_pi).cwiseAbs().maxCoeff() > 1e-8)
        throw validation_error("Perron eigenvector does not match sqrt(pi)");
    for (Eigen::Index k = 1; k < n; ++k) {
        Eigen::Index arg = 0;
        dec.basis.col(k).cwiseAbs().maxCoeff(&arg);
        if (dec.basis(arg, k) < 0.0) dec.basis.col(k) = -dec.basis.col(k);
    }
    return dec;
}

GapSummary gap_summary(const SpectralDecomposition& dec) {
    if (dec.size() < 2) throw domain_error("gap undefined for a single state");
    double lambda = dec.eigenvalues(1);
    if (lambda >= 1.0 - kGapEpsilon) throw domain_error("no spectral gap");
    double m = static_cast<double>(dec.size());
    // Trace argument: the eigenvalues below 1 sum to Tr(P) - 1 >= -1.
    if (lambda < -1.0 / (m - 1.0) - 1e-9)
        throw validation_error("second eigenvalue below the trace lower bound");
    GapSummary g;
    g.lambda = lambda;
    g.lambda0 = std::max(0.0, lambda);
    g.gap = 1.0 - g.lambda0;
    return g;
}

ClippedKernel build_clipped_kernel(const SpectralDecomposition& dec, const GapSummary& gap) {
    if (!(gap.lambda0 >= 0.0 && gap.lambda0 < 1.0))
        throw domain_error("lambda0 must lie in [0,1)");
    const Eigen::Index n = dec.size();
    ClippedKernel out;
    out.limit.resize(n, n);
    Eigen::VectorXd pi = dec.sqrt_pi.cwiseProduct(dec.sqrt_pi);
    for (Eigen::Index i = 0; i < n; ++i) out.limit.row(i) = pi.transpose();
    out.q = gap.lambda0 * Eigen::MatrixXd::Identity(n, n) + (1.0 - gap.lambda0) * out.limit;
    return out;
}

DecompositionResiduals decomposition_residuals(const SpectralDecomposition& dec,
                                               const ReversibleChainSpec& spec) {
    const Eigen::Index n = dec.size();
    DecompositionResiduals r;
    r.orthogonality =
        (dec.basis.transpose() * dec.basis - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    Eigen::MatrixXd rebuilt = dec.sqrt_pi.cwiseInverse().asDiagonal() *
                              (dec.basis * dec.eigenvalues.asDiagonal() * dec.basis.transpose()) *
                              dec.sqrt_pi.asDiagonal();
    r.reconstruction = (rebuilt - spec.transition).cwiseAbs().maxCoeff();
    r.perron_column = (dec.basis.col(0) - dec.sqrt_pi).cwiseAbs().maxCoeff();
    return r;
}

}  // namespace chainbound

#pragma once

#include <Eigen/Dense>

#include "chainbound/chain_model.hpp"

namespace chainbound {

// Eigensystem of the symmetrized conjugate D P D^-1, D = diag(sqrt(pi)).
// Eigenvalues are sorted descending; the first column of `basis` is the
// Perron eigenvector (sqrt(pi_i)), sign-fixed positive.
struct SpectralDecomposition {
    Eigen::VectorXd sqrt_pi;      // diagonal of D
    Eigen::MatrixXd basis;        // orthogonal
    Eigen::VectorXd eigenvalues;  // descending, eigenvalues(0) ~ 1

    Eigen::Index size() const { return eigenvalues.size(); }
};

struct GapSummary {
    double lambda = 0.0;   // second largest eigenvalue
    double lambda0 = 0.0;  // max(0, lambda)
    double gap = 1.0;      // 1 - lambda0
};

// Kernel with every eigenvalue below lambda0 clipped up to lambda0; equals
// lambda0*I + (1-lambda0)*A where A has all rows pi.
struct ClippedKernel {
    Eigen::MatrixXd q;
    Eigen::MatrixXd limit;  // A
};

SpectralDecomposition decompose(const ReversibleChainSpec& spec);
GapSummary gap_summary(const SpectralDecomposition& dec);
ClippedKernel build_clipped_kernel(const SpectralDecomposition& dec, const GapSummary& gap);

// Max-norm residuals of the decomposition invariants, for verification.
struct DecompositionResiduals {
    double orthogonality;   // ||G'G - I||
    double reconstruction;  // ||P - D^-1 G diag G' D||
    double perron_column;   // ||gamma_1 - sqrt(pi)||
};
DecompositionResiduals decomposition_residuals(const SpectralDecomposition& dec,
                                               const ReversibleChainSpec& spec);

}  // namespace chainbound

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "chainbound/chain_model.hpp"
#include "chainbound/spectral.hpp"

namespace chainbound::mgf {

// Symmetric tilted operators: G scales the chain's conjugate by exp(t f/2)
// on both sides; H does the same to the clipped kernel's conjugate.
struct TiltedOperators {
    double t = 0.0;
    Eigen::VectorXd half_tilt;  // exp(t f(i) / 2)
    Eigen::MatrixXd g;
    Eigen::MatrixXd h;
};
TiltedOperators tilted_operators(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                                 const GapSummary& gap, double t);

struct PerronEvaluation {
    double zeta = 1.0;       // largest eigenvalue of G
    double eta = 1.0;        // largest eigenvalue of H; eta >= zeta
    double prefactor = 1.0;  // ||D_t gamma_1||^2 = sum pi_i exp(t f(i))
};
PerronEvaluation perron_values(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                               const GapSummary& gap, double t);

// log E_pi[exp(t S_n)], evaluated by n guarded matrix-vector passes.
double log_mgf_exact(const ReversibleChainSpec& spec, double t, std::int64_t n);

enum class RateKind { zeta, eta };

struct ChernoffBound {
    double log_bound = 0.0;
    double t = 0.0;
    double log_prefactor = 0.0;  // log(||D_t gamma_1||^2 / rho(t))
    double rate = 0.0;           // t*x - log rho(t)
};

// Prefactor bound at a given tilt, or at the tilt maximizing the rate.
ChernoffBound matrix_chernoff_bound(const ReversibleChainSpec& spec,
                                    const SpectralDecomposition& dec, const GapSummary& gap,
                                    double x, std::int64_t n, RateKind kind, bool optimize,
                                    double t = 0.0);

struct EmpiricalRate {
    double rate = 0.0;  // sup_{t>=0} t*x - log rho(t)
    double t = 0.0;
};
EmpiricalRate empirical_rate(const ReversibleChainSpec& spec, const SpectralDecomposition& dec,
                             const GapSummary& gap, double x, RateKind kind);

}  // namespace chainbound::mgf

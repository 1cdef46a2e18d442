#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainbound/errors.hpp"

namespace chainbound {

struct ChainTolerances {
    double structural = 1e-10;      // row sums, piP = pi, detailed balance
    double stationary_sum = 1e-12;  // sum(pi) = 1
};

struct NormalizedObservable {
    Eigen::VectorXd values;  // min 0, max 1
    double lower = 0.0;      // a = min of the raw observable
    double upper = 1.0;      // b = max of the raw observable
};

// Validated bundle: state space, row-stochastic P, stationary pi (computed or
// verified), observable normalized to [0,1] with the raw version retained.
struct ReversibleChainSpec {
    std::vector<std::string> states;
    Eigen::MatrixXd transition;
    Eigen::VectorXd stationary;
    Eigen::VectorXd observable;      // normalized
    Eigen::VectorXd observable_raw;  // as supplied
    double lower = 0.0;              // a
    double upper = 1.0;              // b
    double mean = 0.0;               // mu of the normalized observable, in (0,1)

    Eigen::Index size() const { return transition.rows(); }
    double mean_raw() const { return lower + (upper - lower) * mean; }
    // Deviations scale by the observable range (arbitrary endpoints a < b).
    double eps_from_raw(double eps_raw) const { return eps_raw / (upper - lower); }
    double eps_to_raw(double eps) const { return eps * (upper - lower); }
};

struct DeviationProblem {
    ReversibleChainSpec spec;
    double eps = 0.0;
};

// Chain-spec document: JSON object with keys "states", "transition",
// "observable" and optional "stationary".
ReversibleChainSpec parse_chain(const std::string& document, const ChainTolerances& tol = {});
ReversibleChainSpec load_chain_file(const std::string& path, const ChainTolerances& tol = {});
std::string serialize_chain(const ReversibleChainSpec& spec);

// Validates everything and fills in the stationary distribution when absent.
ReversibleChainSpec make_chain(std::vector<std::string> states, Eigen::MatrixXd transition,
                               Eigen::VectorXd observable_raw,
                               std::optional<Eigen::VectorXd> stationary = std::nullopt,
                               const ChainTolerances& tol = {});

bool is_irreducible(const Eigen::MatrixXd& transition);

// Left principal eigenvector of an irreducible row-stochastic matrix.
Eigen::VectorXd compute_stationary(const Eigen::MatrixXd& transition,
                                   const ChainTolerances& tol = {});

NormalizedObservable normalize_observable(const Eigen::VectorXd& raw);

// Replaces the observable by its complement; upper deviations of the result
// are lower deviations of the original.
ReversibleChainSpec complement(const ReversibleChainSpec& spec);

// Two-sided deviations reduce to a pair of upper-deviation problems; the
// two-sided bound is the sum of the two one-sided bounds.
std::pair<DeviationProblem, DeviationProblem> two_sided_setup(const ReversibleChainSpec& spec,
                                                              double eps);

}  // namespace chainbound

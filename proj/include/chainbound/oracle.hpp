#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainbound/chain_model.hpp"

namespace chainbound::oracle {

// Observable on an integer lattice: f(i) = levels[i] / denominator.
struct LatticeObservable {
    std::int64_t denominator = 1;
    std::vector<std::int64_t> levels;
};

// Smallest denominator <= max_denominator putting the (normalized) observable
// on a lattice within tol.
LatticeObservable detect_lattice(const Eigen::VectorXd& values,
                                 std::int64_t max_denominator = 10000, double tol = 1e-9);

// Exact distribution of the integer path sum after n steps, chain started
// from pi.
struct TailTable {
    std::int64_t n = 0;
    std::int64_t denominator = 1;
    std::string method;        // "dp" | "dp-rational" | "enumeration" | "binomial"
    std::vector<double> pmf;   // index s: P[sum of levels over n steps = s]

    // P[S_n >= threshold_sum], S_n in normalized observable units. Ties at
    // lattice points are included in the tail.
    double tail(double threshold_sum) const;
    double tail_from_integer(std::int64_t level_sum) const;
    double total() const;
};

// Forward DP over (state, accumulated level). Budget caps n * denominator
// cells per state.
TailTable exact_tail_dp(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                        std::int64_t n, std::int64_t cell_budget_per_state = 1000000);

// Same DP carried out in exact rational arithmetic; limited to
// |E| * n * denominator <= 10^4.
TailTable exact_tail_dp_rational(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                                 std::int64_t n);

// Exact by summation over all |E|^n paths; |E|^n <= 10^7.
TailTable enumerate_paths(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                          std::int64_t n);

// P[Bin(n, mu) >= k], evaluated in log space.
double binomial_tail(double mu, std::int64_t n, std::int64_t k);

}  // namespace chainbound::oracle

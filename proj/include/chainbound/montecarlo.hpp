#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chainbound/chain_model.hpp"

namespace chainbound::mc {

// Deterministic stream with a standard-specified engine and hand-rolled
// draws, so results are reproducible across platforms.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    double uniform01();
    bool bernoulli(double p);
    // Index distributed by the (unnormalized tail-safe) cumulative weights.
    int categorical(const std::vector<double>& cumulative);

  private:
    std::uint64_t next_raw();
    std::uint64_t state_[4];
};

// Independent stream for one replicate: mixing, not sequential splitting, so
// replicate order and scheduling never matter.
RandomStream replicate_stream(std::uint64_t seed, std::uint64_t replicate_index);

std::vector<double> cumulative_weights(const Eigen::VectorXd& weights);

// Path of n states, X_1 ~ pi and transitions by P.
std::vector<int> sample_stationary_path(const ReversibleChainSpec& spec, std::int64_t n,
                                        std::uint64_t seed);

// The refresh construction: step k keeps the previous state unless an
// independent Bernoulli(1-lambda0) refresh redraws it from pi. The resulting
// transition law is lambda0*I + (1-lambda0)*A.
struct RegenerationPath {
    std::vector<std::uint8_t> refresh;      // I'_k, refresh[0] = 1
    std::vector<int> innovations;           // Z_j ~ pi, iid
    std::vector<std::int64_t> occupation;   // N(j); sums to n
    std::vector<int> states;                // X'_k
};
RegenerationPath sample_regeneration_path(const Eigen::VectorXd& pi, double lambda0,
                                          std::int64_t n, std::uint64_t seed);

// Two-state chain with stay weight lambda0 and stationary mean mu.
std::vector<int> sample_two_state_path(double lambda0, double mu, std::int64_t n,
                                       std::uint64_t seed);

struct TailEstimate {
    double estimate = 0.0;
    std::int64_t replicates = 0;
    std::int64_t successes = 0;
    double alpha = 0.0;
    double upper = 1.0;  // one-sided Clopper-Pearson limit at level 1-alpha
};

// sample_sum draws one replicate path sum from its own stream.
TailEstimate estimate_tail(const std::function<double(RandomStream&)>& sample_sum,
                           double threshold, std::int64_t replicates, double alpha,
                           std::uint64_t seed);

// Convenience: tail of S_n for the chain itself.
TailEstimate estimate_tail_chain(const ReversibleChainSpec& spec, std::int64_t n,
                                 double threshold, std::int64_t replicates, double alpha,
                                 std::uint64_t seed);

double clopper_pearson_upper(std::int64_t successes, std::int64_t replicates, double alpha);

// Convex test functions for the stochastic-order check.
struct PsiSpec {
    enum class Kind { exp_scaled, square, hinge };
    Kind kind = Kind::square;
    double param = 0.0;
    std::string label() const;
    double operator()(double x) const;
};
std::vector<PsiSpec> default_psi_family();

struct ConvexOrderEntry {
    std::string psi;
    double chain_mean = 0.0;      // E[Psi(S'_n)] for the clipped-kernel chain
    double two_state_mean = 0.0;  // E[Psi(sum Y_k)] for the extremal chain
    double diff = 0.0;            // chain_mean - two_state_mean
    double radius = 0.0;          // one-sided confidence radius at level 1-alpha
    bool ordered = false;         // diff <= radius
};
struct ConvexOrderReport {
    std::vector<ConvexOrderEntry> entries;
    std::int64_t replicates = 0;
    double alpha = 0.0;
};

// Coupled estimate of E[Psi(S'_n)] vs E[Psi(sum Y_k)] sharing refresh times
// and innovations; B_j | Z_j ~ Bernoulli(f(Z_j)).
ConvexOrderReport convex_order_check(const ReversibleChainSpec& spec, double lambda0,
                                     std::int64_t n, const std::vector<PsiSpec>& family,
                                     std::int64_t replicates, double alpha, std::uint64_t seed);

}  // namespace chainbound::mc

#include "chainbound/montecarlo.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace chainbound::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

struct KahanSum {
    double total = 0.0;
    double carry = 0.0;
    void add(double v) {
        double y = v - carry;
        double t = total + y;
        carry = (t - total) - y;
        total = t;
    }
};

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
    for (auto& word : state_) word = splitmix64(seed);
}

std::uint64_t RandomStream::next_raw() {
    // xoshiro256++
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform01() { return static_cast<double>(next_raw() >> 11) * 0x1.0p-53; }

bool RandomStream::bernoulli(double p) { return uniform01() < p; }

int RandomStream::categorical(const std::vector<double>& cumulative) {
    double u = uniform01() * cumulative.back();
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<int>(it - cumulative.begin());
}

RandomStream replicate_stream(std::uint64_t seed, std::uint64_t replicate_index) {
    std::uint64_t mix = seed;
    std::uint64_t base = splitmix64(mix);
    mix = base ^ (replicate_index + 0x9E3779B97F4A7C15ULL);
    return RandomStream(splitmix64(mix));
}

std::vector<double> cumulative_weights(const Eigen::VectorXd& weights) {
    std::vector<double> cum(static_cast<size_t>(weights.size()));
    double run = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        run += weights(i);
        cum[static_cast<size_t>(i)] = run;
    }
    return cum;
}

std::vector<int> sample_stationary_path(const ReversibleChainSpec& spec, std::int64_t n,
                                        std::uint64_t seed) {
    if (n < 1) throw domain_error("path length must be at least 1");
    RandomStream stream = replicate_stream(seed, 0);
    std::vector<std::vector<double>> rows(static_cast<size_t>(spec.size()));
    for (Eigen::Index i = 0; i < spec.size(); ++i)
        rows[static_cast<size_t>(i)] = cumulative_weights(spec.transition.row(i));
    std::vector<double> cum_pi = cumulative_weights(spec.stationary);

    std::vector<int> path(static_cast<size_t>(n));
    path[0] = stream.categorical(cum_pi);
    for (std::int64_t k = 1; k < n; ++k)
        path[static_cast<size_t>(k)] =
            stream.categorical(rows[static_cast<size_t>(path[static_cast<size_t>(k - 1)])]);
    return path;
}

RegenerationPath sample_regeneration_path(const Eigen::VectorXd& pi, double lambda0,
                                          std::int64_t n, std::uint64_t seed) {
    if (!(lambda0 >= 0.0 && lambda0 < 1.0)) throw domain_error("lambda0 must lie in [0,1)");
    if (n < 1) throw domain_error("path length must be at least 1");
    RandomStream stream = replicate_stream(seed, 0);
    std::vector<double> cum_pi = cumulative_weights(pi);

    RegenerationPath path;
    path.refresh.resize(static_cast<size_t>(n));
    path.innovations.resize(static_cast<size_t>(n));
    path.occupation.assign(static_cast<size_t>(n), 0);
    path.states.resize(static_cast<size_t>(n));

    path.refresh[0] = 1;
    for (std::int64_t k = 1; k < n; ++k)
        path.refresh[static_cast<size_t>(k)] = stream.bernoulli(1.0 - lambda0) ? 1 : 0;
    for (std::int64_t j = 0; j < n; ++j)
        path.innovations[static_cast<size_t>(j)] = stream.categorical(cum_pi);

    size_t last_refresh = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        if (path.refresh[static_cast<size_t>(k)]) last_refresh = static_cast<size_t>(k);
        path.states[static_cast<size_t>(k)] = path.innovations[last_refresh];
        path.occupation[last_refresh] += 1;
    }
    return path;
}

std::vector<int> sample_two_state_path(double lambda0, double mu, std::int64_t n,
                                       std::uint64_t seed) {
    if (!(lambda0 >= 0.0 && lambda0 < 1.0)) throw domain_error("lambda0 must lie in [0,1)");
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (n < 1) throw domain_error("path length must be at least 1");
    RandomStream stream = replicate_stream(seed, 0);
    std::vector<int> path(static_cast<size_t>(n));
    path[0] = stream.bernoulli(mu) ? 1 : 0;
    for (std::int64_t k = 1; k < n; ++k) {
        if (stream.bernoulli(lambda0))
            path[static_cast<size_t>(k)] = path[static_cast<size_t>(k - 1)];
        else
            path[static_cast<size_t>(k)] = stream.bernoulli(mu) ? 1 : 0;
    }
    return path;
}

double clopper_pearson_upper(std::int64_t successes, std::int64_t replicates, double alpha) {
    if (replicates < 1) throw domain_error("replicate count must be at least 1");
    if (successes < 0 || successes > replicates)
        throw domain_error("success count outside [0, replicates]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("alpha must lie in (0,1)");
    if (successes == replicates) return 1.0;
    boost::math::beta_distribution<double> posterior(static_cast<double>(successes) + 1.0,
                                                     static_cast<double>(replicates - successes));
    return boost::math::quantile(posterior, 1.0 - alpha);
}

TailEstimate estimate_tail(const std::function<double(RandomStream&)>& sample_sum,
                           double threshold, std::int64_t replicates, double alpha,
                           std::uint64_t seed) {
    if (replicates < 1) throw domain_error("replicate count must be at least 1");
    std::int64_t successes = 0;
    for (std::int64_t r = 0; r < replicates; ++r) {
        RandomStream stream = replicate_stream(seed, static_cast<std::uint64_t>(r) + 1);
        if (sample_sum(stream) >= threshold) ++successes;
    }
    TailEstimate est;
    est.replicates = replicates;
    est.successes = successes;
    est.alpha = alpha;
    est.estimate = static_cast<double>(successes) / static_cast<double>(replicates);
    est.upper = clopper_pearson_upper(successes, replicates, alpha);
    return est;
}

TailEstimate estimate_tail_chain(const ReversibleChainSpec& spec, std::int64_t n,
                                 double threshold, std::int64_t replicates, double alpha,
                                 std::uint64_t seed) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(spec.size()));
    for (Eigen::Index i = 0; i < spec.size(); ++i)
        rows[static_cast<size_t>(i)] = cumulative_weights(spec.transition.row(i));
    std::vector<double> cum_pi = cumulative_weights(spec.stationary);

    auto sample_sum = [&](RandomStream& stream) {
        int state = stream.categorical(cum_pi);
        double sum = spec.observable(state);
        for (std::int64_t k = 1; k < n; ++k) {
            state = stream.categorical(rows[static_cast<size_t>(state)]);
            sum += spec.observable(state);
        }
        return sum;
    };
    return estimate_tail(sample_sum, threshold, replicates, alpha, seed);
}

std::string PsiSpec::label() const {
    switch (kind) {
        case Kind::exp_scaled:
            return "exp(" + std::to_string(param) + "x)";
        case Kind::square:
            return "x^2";
        case Kind::hinge:
            return "(x-" + std::to_string(param) + ")+";
    }
    return "?";
}

double PsiSpec::operator()(double x) const {
    switch (kind) {
        case Kind::exp_scaled:
            return std::exp(param * x);
        case Kind::square:
            return x * x;
        case Kind::hinge:
            return std::max(0.0, x - param);
    }
    return 0.0;
}

std::vector<PsiSpec> default_psi_family() {
    return {{PsiSpec::Kind::exp_scaled, 0.25}, {PsiSpec::Kind::exp_scaled, 0.5},
            {PsiSpec::Kind::square, 0.0}};
}

ConvexOrderReport convex_order_check(const ReversibleChainSpec& spec, double lambda0,
                                     std::int64_t n, const std::vector<PsiSpec>& family,
                                     std::int64_t replicates, double alpha, std::uint64_t seed) {
    if (!(lambda0 >= 0.0 && lambda0 < 1.0)) throw domain_error("lambda0 must lie in [0,1)");
    if (n < 1 || replicates < 2) throw domain_error("need n >= 1 and at least 2 replicates");
    const auto nn = static_cast<size_t>(n);
    std::vector<double> cum_pi = cumulative_weights(spec.stationary);

    struct Accumulator {
        KahanSum chain, two_state, diff, diff_sq;
    };
    std::vector<Accumulator> acc(family.size());

    std::vector<std::uint8_t> refresh(nn);
    std::vector<int> innovations(nn);
    std::vector<std::uint8_t> thinned(nn);
    std::vector<std::int64_t> occupation(nn);

    for (std::int64_t r = 0; r < replicates; ++r) {
        RandomStream stream = replicate_stream(seed, static_cast<std::uint64_t>(r) + 1);
        refresh[0] = 1;
        for (size_t k = 1; k < nn; ++k) refresh[k] = stream.bernoulli(1.0 - lambda0) ? 1 : 0;
        for (size_t j = 0; j < nn; ++j) innovations[j] = stream.categorical(cum_pi);
        // B_j | Z_j ~ Bernoulli(f(Z_j)); shared occupation counts couple the
        // two partial sums.
        for (size_t j = 0; j < nn; ++j)
            thinned[j] = stream.bernoulli(spec.observable(innovations[j])) ? 1 : 0;

        std::fill(occupation.begin(), occupation.end(), 0);
        size_t last_refresh = 0;
        for (size_t k = 0; k < nn; ++k) {
            if (refresh[k]) last_refresh = k;
            occupation[last_refresh] += 1;
        }

        double chain_sum = 0.0, two_state_sum = 0.0;
        for (size_t j = 0; j < nn; ++j) {
            if (occupation[j] == 0) continue;
            auto blocks = static_cast<double>(occupation[j]);
            chain_sum += blocks * spec.observable(innovations[j]);
            two_state_sum += blocks * static_cast<double>(thinned[j]);
        }

        for (size_t p = 0; p < family.size(); ++p) {
            double a = family[p](chain_sum);
            double b = family[p](two_state_sum);
            acc[p].chain.add(a);
            acc[p].two_state.add(b);
            acc[p].diff.add(a - b);
            acc[p].diff_sq.add((a - b) * (a - b));
        }
    }

    boost::math::normal_distribution<double> gauss;
    double z = boost::math::quantile(gauss, 1.0 - alpha);
    auto reps = static_cast<double>(replicates);

    ConvexOrderReport report;
    report.replicates = replicates;
    report.alpha = alpha;
    for (size_t p = 0; p < family.size(); ++p) {
        ConvexOrderEntry entry;
        entry.psi = family[p].label();
        entry.chain_mean = acc[p].chain.total / reps;
        entry.two_state_mean = acc[p].two_state.total / reps;
        entry.diff = acc[p].diff.total / reps;
        double var = (acc[p].diff_sq.total - acc[p].diff.total * acc[p].diff.total / reps) /
                     (reps - 1.0);
        entry.radius = z * std::sqrt(std::max(0.0, var) / reps);
        entry.ordered = entry.diff <= entry.radius;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace chainbound::mc

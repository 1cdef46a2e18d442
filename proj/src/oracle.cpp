#include "chainbound/oracle.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace chainbound::oracle {

namespace {

using Rational = boost::multiprecision::cpp_rational;

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

std::int64_t tail_start_index(double threshold_sum, std::int64_t denominator) {
    // Integer sum >= smallest integer >= threshold * L; the small slack keeps
    // exact lattice points inside the tail under roundoff.
    double scaled = threshold_sum * static_cast<double>(denominator);
    return static_cast<std::int64_t>(std::ceil(scaled - 1e-9));
}

}  // namespace

double TailTable::tail_from_integer(std::int64_t level_sum) const {
    if (level_sum < 0) return total();
    if (level_sum >= static_cast<std::int64_t>(pmf.size())) return 0.0;
    KahanSum sum;
    for (size_t s = static_cast<size_t>(level_sum); s < pmf.size(); ++s) sum.add(pmf[s]);
    return sum.total;
}

double TailTable::tail(double threshold_sum) const {
    return tail_from_integer(tail_start_index(threshold_sum, denominator));
}

double TailTable::total() const {
    KahanSum sum;
    for (double v : pmf) sum.add(v);
    return sum.total;
}

LatticeObservable detect_lattice(const Eigen::VectorXd& values, std::int64_t max_denominator,
                                 double tol) {
    if (max_denominator < 1) throw domain_error("lattice denominator cap must be positive");
    for (std::int64_t denom = 1; denom <= max_denominator; ++denom) {
        bool fits = true;
        std::vector<std::int64_t> levels(static_cast<size_t>(values.size()));
        for (Eigen::Index i = 0; i < values.size() && fits; ++i) {
            double scaled = values(i) * static_cast<double>(denom);
            double rounded = std::round(scaled);
            if (std::abs(scaled - rounded) > tol * static_cast<double>(denom))
                fits = false;
            else
                levels[static_cast<size_t>(i)] = static_cast<std::int64_t>(rounded);
        }
        if (fits) return {denom, std::move(levels)};
    }
    throw domain_error("observable does not fit a lattice with denominator <= " +
                       std::to_string(max_denominator));
}

TailTable exact_tail_dp(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                        std::int64_t n, std::int64_t cell_budget_per_state) {
    if (n < 1) throw domain_error("n must be at least 1");
    if (lattice.levels.size() != static_cast<size_t>(spec.size()))
        throw domain_error("lattice does not match the state space");
    const std::int64_t max_sum = n * lattice.denominator;
    if (max_sum + 1 > cell_budget_per_state)
        throw domain_error("DP budget exceeded: n * denominator too large");

    const auto m = static_cast<size_t>(spec.size());
    const auto width = static_cast<size_t>(max_sum + 1);
    // cur[i * width + s] = P[X_k = i, level sum = s]
    std::vector<double> cur(m * width, 0.0), next(m * width);
    for (size_t i = 0; i < m; ++i)
        cur[i * width + static_cast<size_t>(lattice.levels[i])] = spec.stationary(static_cast<Eigen::Index>(i));

    std::int64_t reach = lattice.denominator;  // largest sum populated so far
    for (std::int64_t step = 1; step < n; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t i = 0; i < m; ++i) {
            const double* row = &cur[i * width];
            for (size_t j = 0; j < m; ++j) {
                const double p = spec.transition(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j));
                if (p == 0.0) continue;
                const auto shift = static_cast<size_t>(lattice.levels[j]);
                double* out = &next[j * width + shift];
                for (size_t s = 0; s <= static_cast<size_t>(reach); ++s) out[s] += p * row[s];
            }
        }
        cur.swap(next);
        reach += lattice.denominator;
    }

    TailTable table;
    table.n = n;
    table.denominator = lattice.denominator;
    table.method = "dp";
    table.pmf.assign(width, 0.0);
    for (size_t s = 0; s < width; ++s) {
        KahanSum sum;
        for (size_t i = 0; i < m; ++i) sum.add(cur[i * width + s]);
        table.pmf[s] = sum.total;
    }
    return table;
}

TailTable exact_tail_dp_rational(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                                 std::int64_t n) {
    if (n < 1) throw domain_error("n must be at least 1");
    const std::int64_t cells = spec.size() * n * lattice.denominator;
    if (cells > 10000)
        throw domain_error("rational DP limited to |E| * n * denominator <= 10^4");

    const auto m = static_cast<size_t>(spec.size());
    const auto width = static_cast<size_t>(n * lattice.denominator + 1);
    // Doubles are dyadic rationals, so the conversion below is exact and the
    // DP result certifies the floating-point version.
    std::vector<Rational> cur(m * width), next(m * width);
    std::vector<Rational> p(m * m);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            p[i * m + j] = Rational(spec.transition(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(j)));
    for (size_t i = 0; i < m; ++i)
        cur[i * width + static_cast<size_t>(lattice.levels[i])] =
            Rational(spec.stationary(static_cast<Eigen::Index>(i)));

    for (std::int64_t step = 1; step < n; ++step) {
        std::fill(next.begin(), next.end(), Rational(0));
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                if (p[i * m + j] == 0) continue;
                const auto shift = static_cast<size_t>(lattice.levels[j]);
                for (size_t s = 0; s + shift < width; ++s) {
                    const Rational& mass = cur[i * width + s];
                    if (mass != 0) next[j * width + s + shift] += p[i * m + j] * mass;
                }
            }
        cur.swap(next);
    }

    TailTable table;
    table.n = n;
    table.denominator = lattice.denominator;
    table.method = "dp-rational";
    table.pmf.assign(width, 0.0);
    for (size_t s = 0; s < width; ++s) {
        Rational sum = 0;
        for (size_t i = 0; i < m; ++i) sum += cur[i * width + s];
        table.pmf[s] = static_cast<double>(sum);
    }
    return table;
}

TailTable enumerate_paths(const ReversibleChainSpec& spec, const LatticeObservable& lattice,
                          std::int64_t n) {
    if (n < 1) throw domain_error("n must be at least 1");
    const auto m = static_cast<size_t>(spec.size());
    double path_count = std::pow(static_cast<double>(m), static_cast<double>(n));
    if (path_count > 1e7) throw domain_error("path enumeration capped at 10^7 paths");

    TailTable table;
    table.n = n;
    table.denominator = lattice.denominator;
    table.method = "enumeration";
    table.pmf.assign(static_cast<size_t>(n * lattice.denominator + 1), 0.0);

    // Depth-first walk over all length-n paths with running mass and level sum.
    struct Frame {
        size_t state;
        std::int64_t depth;
        double mass;
        std::int64_t sum;
    };
    std::vector<Frame> work;
    for (size_t i = 0; i < m; ++i)
        work.push_back({i, 1, spec.stationary(static_cast<Eigen::Index>(i)), lattice.levels[i]});
    while (!work.empty()) {
        Frame frame = work.back();
        work.pop_back();
        if (frame.depth == n) {
            table.pmf[static_cast<size_t>(frame.sum)] += frame.mass;
            continue;
        }
        for (size_t j = 0; j < m; ++j) {
            double p = spec.transition(static_cast<Eigen::Index>(frame.state),
                                       static_cast<Eigen::Index>(j));
            if (p == 0.0) continue;
            work.push_back(
                {j, frame.depth + 1, frame.mass * p, frame.sum + lattice.levels[j]});
        }
    }
    return table;
}

double binomial_tail(double mu, std::int64_t n, std::int64_t k) {
    if (!(mu > 0.0 && mu < 1.0)) throw domain_error("mu must lie in (0,1)");
    if (n < 1) throw domain_error("n must be at least 1");
    if (k < 0) k = 0;
    if (k > n) return 0.0;
    // log-sum-exp over log C(n,j) + j log mu + (n-j) log(1-mu)
    double log_mu = std::log(mu);
    double log_mubar = std::log1p(-mu);
    double lgamma_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(n - k + 1));
    for (std::int64_t j = k; j <= n; ++j) {
        double dj = static_cast<double>(j);
        double term = lgamma_n1 - std::lgamma(dj + 1.0) -
                      std::lgamma(static_cast<double>(n - j) + 1.0) + dj * log_mu +
                      (static_cast<double>(n) - dj) * log_mubar;
        terms.push_back(term);
        best = std::max(best, term);
    }
    KahanSum sum;
    for (double term : terms) sum.add(std::exp(term - best));
    return std::exp(best) * sum.total;
}

}  // namespace chainbound::oracle

#include "chainbound/chain_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chainbound {

namespace {

using nlohmann::json;

void check_square(const Eigen::MatrixXd& p) {
    if (p.rows() < 2) throw validation_error("state space must have at least 2 states");
    if (p.rows() != p.cols()) throw validation_error("transition matrix must be square");
}

void check_stochastic(const Eigen::MatrixXd& p, double tol) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (!(p(i, j) >= 0.0 && p(i, j) <= 1.0))
                throw validation_error("transition entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") outside [0,1]");
        }
        double row_sum = p.row(i).sum();
        if (std::abs(row_sum - 1.0) > tol)
            throw validation_error("row " + std::to_string(i) + " not stochastic (sums to " +
                                   std::to_string(row_sum) + ")");
    }
}

// BFS over the nonzero pattern of m, from state 0.
bool reaches_all(const Eigen::MatrixXd& m) {
    const Eigen::Index n = m.rows();
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<Eigen::Index> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        Eigen::Index i = queue.back();
        queue.pop_back();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (m(i, j) > 0.0 && !seen[static_cast<size_t>(j)]) {
                seen[static_cast<size_t>(j)] = 1;
                queue.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

void check_detailed_balance(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi, double tol) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
            double flow_ij = pi(i) * p(i, j);
            double flow_ji = pi(j) * p(j, i);
            if (std::abs(flow_ij - flow_ji) > tol)
                throw validation_error("detailed balance violated at (" + std::to_string(i) + "," +
                                       std::to_string(j) + "): " + std::to_string(flow_ij) +
                                       " vs " + std::to_string(flow_ji));
        }
}

void check_stationary(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi,
                      const ChainTolerances& tol) {
    if (pi.size() != p.rows()) throw validation_error("stationary vector has wrong length");
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (!(pi(i) > 0.0))
            throw validation_error("stationary weight " + std::to_string(i) + " not positive");
    if (std::abs(pi.sum() - 1.0) > tol.stationary_sum)
        throw validation_error("stationary distribution does not sum to 1");
    Eigen::VectorXd image = p.transpose() * pi;
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (std::abs(image(i) - pi(i)) > tol.structural)
            throw validation_error("supplied stationary distribution does not satisfy piP = pi");
}

Eigen::VectorXd parse_vector(const json& arr, const char* what, size_t expected) {
    if (!arr.is_array() || (expected != 0 && arr.size() != expected))
        throw validation_error(std::string(what) + " must be an array of " +
                               std::to_string(expected) + " numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw validation_error(std::string(what) + " entry " + std::to_string(i) +
                                   " is not a number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

}  // namespace

bool is_irreducible(const Eigen::MatrixXd& transition) {
    return reaches_all(transition) && reaches_all(Eigen::MatrixXd(transition.transpose()));
}

Eigen::VectorXd compute_stationary(const Eigen::MatrixXd& p, const ChainTolerances& tol) {
    check_square(p);
    check_stochastic(p, tol.structural);
    if (!is_irreducible(p)) throw validation_error("transition graph is not strongly connected");

    // Solve pi (P - I) = 0 with the normalization sum(pi) = 1 replacing the
    // last (redundant) equation.
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd system = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = system.fullPivLu().solve(rhs);

    double residual = (p.transpose() * pi - pi).cwiseAbs().maxCoeff();
    if (!pi.allFinite() || residual > tol.structural)
        throw validation_error("stationary distribution solver did not converge");
    if (pi.minCoeff() <= 0.0)
        throw validation_error("computed stationary distribution has nonpositive entries");
    pi /= pi.sum();
    return pi;
}

NormalizedObservable normalize_observable(const Eigen::VectorXd& raw) {
    if (raw.size() < 1) throw validation_error("observable is empty");
    double a = raw.minCoeff();
    double b = raw.maxCoeff();
    if (!(a < b)) throw validation_error("constant observable: deviations are meaningless");
    NormalizedObservable out;
    out.lower = a;
    out.upper = b;
    out.values = (raw.array() - a) / (b - a);
    return out;
}

ReversibleChainSpec make_chain(std::vector<std::string> states, Eigen::MatrixXd transition,
                               Eigen::VectorXd observable_raw,
                               std::optional<Eigen::VectorXd> stationary,
                               const ChainTolerances& tol) {
    check_square(transition);
    const auto n = static_cast<size_t>(transition.rows());
    if (states.size() != n) throw validation_error("number of state labels does not match matrix");
    if (std::set<std::string>(states.begin(), states.end()).size() != n)
        throw validation_error("state labels are not distinct");
    check_stochastic(transition, tol.structural);
    if (!is_irreducible(transition))
        throw validation_error("transition graph is not strongly connected");
    if (static_cast<size_t>(observable_raw.size()) != n)
        throw validation_error("observable length does not match state space");

    ReversibleChainSpec spec;
    spec.states = std::move(states);
    spec.transition = std::move(transition);
    // Supplied distributions are verified rather than trusted.
    if (stationary) {
        check_stationary(spec.transition, *stationary, tol);
        spec.stationary = std::move(*stationary);
    } else {
        spec.stationary = compute_stationary(spec.transition, tol);
    }
    check_detailed_balance(spec.transition, spec.stationary, tol.structural);

    NormalizedObservable obs = normalize_observable(observable_raw);
    spec.observable_raw = std::move(observable_raw);
    spec.observable = std::move(obs.values);
    spec.lower = obs.lower;
    spec.upper = obs.upper;
    spec.mean = spec.stationary.dot(spec.observable);
    return spec;
}

ReversibleChainSpec parse_chain(const std::string& document, const ChainTolerances& tol) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("malformed chain document: ") + e.what());
    }
    if (!doc.is_object()) throw validation_error("chain document must be a JSON object");
    if (!doc.contains("states") || !doc.contains("transition") || !doc.contains("observable"))
        throw validation_error("chain document needs keys \"states\", \"transition\", \"observable\"");

    const json& jstates = doc["states"];
    if (!jstates.is_array() || jstates.size() < 2)
        throw validation_error("\"states\" must be an array of at least 2 labels");
    std::vector<std::string> states;
    for (const auto& s : jstates) {
        if (!s.is_string()) throw validation_error("state labels must be strings");
        states.push_back(s.get<std::string>());
    }
    const size_t n = states.size();

    const json& jrows = doc["transition"];
    if (!jrows.is_array() || jrows.size() != n)
        throw validation_error("\"transition\" must be an array of " + std::to_string(n) + " rows");
    Eigen::MatrixXd p(n, n);
    for (size_t i = 0; i < n; ++i)
        p.row(static_cast<Eigen::Index>(i)) = parse_vector(jrows[i], "transition row", n);

    Eigen::VectorXd f = parse_vector(doc["observable"], "observable", n);
    std::optional<Eigen::VectorXd> pi;
    if (doc.contains("stationary")) pi = parse_vector(doc["stationary"], "stationary", n);

    return make_chain(std::move(states), std::move(p), std::move(f), std::move(pi), tol);
}

ReversibleChainSpec load_chain_file(const std::string& path, const ChainTolerances& tol) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open chain file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error("error reading chain file: " + path);
    return parse_chain(buf.str(), tol);
}

std::string serialize_chain(const ReversibleChainSpec& spec) {
    json doc;
    doc["states"] = spec.states;
    json rows = json::array();
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < spec.size(); ++j) row.push_back(spec.transition(i, j));
        rows.push_back(std::move(row));
    }
    doc["transition"] = std::move(rows);
    json obs = json::array();
    for (Eigen::Index i = 0; i < spec.size(); ++i) obs.push_back(spec.observable_raw(i));
    doc["observable"] = std::move(obs);
    json pi = json::array();
    for (Eigen::Index i = 0; i < spec.size(); ++i) pi.push_back(spec.stationary(i));
    doc["stationary"] = std::move(pi);
    return doc.dump(2) + "\n";
}

ReversibleChainSpec complement(const ReversibleChainSpec& spec) {
    ReversibleChainSpec out = spec;
    // Raw complement a + b - f keeps the same endpoints and maps the
    // normalized observable to 1 - g.
    out.observable_raw = (spec.lower + spec.upper) - spec.observable_raw.array();
    out.observable = 1.0 - spec.observable.array();
    out.mean = out.stationary.dot(out.observable);
    return out;
}

std::pair<DeviationProblem, DeviationProblem> two_sided_setup(const ReversibleChainSpec& spec,
                                                              double eps) {
    if (!(eps > 0.0)) throw domain_error("two-sided setup needs eps > 0");
    return {DeviationProblem{spec, eps}, DeviationProblem{complement(spec), eps}};
}

}  // namespace chainbound

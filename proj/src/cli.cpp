#include "chainbound/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "chainbound/bounds.hpp"
#include "chainbound/chain_model.hpp"
#include "chainbound/csv.hpp"
#include "chainbound/mgf_rate.hpp"
#include "chainbound/montecarlo.hpp"
#include "chainbound/oracle.hpp"
#include "chainbound/spectral.hpp"

namespace chainbound::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

std::string fmt(double v) { return csv::format_double(v); }

std::vector<double> parse_grid(const std::string& text) {
    double a = 0, b = 0, step = 0;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(text);
    in >> a >> colon1 >> b >> colon2 >> step;
    if (!in || colon1 != ':' || colon2 != ':' || !(step > 0.0) || b < a)
        throw validation_error("grid must be given as start:stop:step with step > 0");
    std::vector<double> grid;
    for (double v = a; v <= b + 0.5 * step; v += step) grid.push_back(std::min(v, b));
    if (!grid.empty() && grid.back() < b - 1e-12 * std::max(1.0, std::abs(b)))
        grid.push_back(b);
    return grid;
}

// Eq.(8)-style evaluation at an unclipped (possibly negative) eigenvalue; the
// exploratory mode. NaN signals an undefined point.
double raw_lambda_rate(double x, double mu, double lambda) {
    double mubar = 1.0 - mu;
    double xbar = 1.0 - x;
    double denom = mu * mubar * (1.0 - lambda) * (1.0 - lambda);
    double delta = 1.0 + 4.0 * lambda * x * xbar / denom;
    if (!(delta >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double sd = std::sqrt(delta);
    double alpha = mu + mubar * lambda;
    double beta = mubar + mu * lambda;
    double qx = 1.0 - 2.0 * xbar / (sd + 1.0);
    double qxbar = 1.0 - 2.0 * x / (sd + 1.0);
    if (!(qx > 0.0 && qxbar > 0.0 && alpha > 0.0 && beta > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return -x * std::log(alpha / qx) - xbar * std::log(beta / qxbar);
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = nullptr;

    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream = &fallback;
            return;
        }
        file.open(path);
        if (!file) throw io_error("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

struct LoadedChain {
    ReversibleChainSpec spec;
    SpectralDecomposition dec;
    GapSummary gap;
};

LoadedChain load(const std::string& path, double tol) {
    ChainTolerances tols;
    tols.structural = tol;
    LoadedChain chain{load_chain_file(path, tols), {}, {}};
    chain.dec = decompose(chain.spec);
    chain.gap = gap_summary(chain.dec);
    return chain;
}

void emit_bound_rows(std::ostream& out, const LoadedChain& chain,
                     const std::vector<double>& eps_raw_grid, std::int64_t n) {
    out << "mu,eps,mu_raw,eps_raw,n,lambda,lambda0,log_product,log_gaussian,log_hoeffding,"
           "log_lezaud,ratio_asymptote\n";
    for (double eps_raw : eps_raw_grid) {
        double eps = chain.spec.eps_from_raw(eps_raw);
        bounds::BoundReport rep =
            bounds::make_bound_report(chain.spec.mean, eps, n, chain.gap.lambda,
                                      chain.gap.lambda0, chain.spec.mean_raw(), eps_raw);
        std::vector<std::string> row{
            fmt(rep.mu),          fmt(rep.eps),          fmt(rep.mu_raw),
            fmt(rep.eps_raw),     std::to_string(rep.n), fmt(rep.lambda),
            fmt(rep.lambda0),     fmt(rep.log_product),  fmt(rep.log_gaussian),
            fmt(rep.log_hoeffding),
            rep.log_lezaud ? fmt(*rep.log_lezaud) : "NA",
            rep.ratio_asymptote ? fmt(*rep.ratio_asymptote) : "NA"};
        out << csv::join_row(row) << "\n";
    }
}

int cmd_analyze(const LoadedChain& chain, std::ostream& out) {
    out << "index,eigenvalue\n";
    for (Eigen::Index k = 0; k < chain.dec.size(); ++k)
        out << (k + 1) << "," << fmt(chain.dec.eigenvalues(k)) << "\n";
    out << "lambda," << fmt(chain.gap.lambda) << "\n";
    out << "lambda0," << fmt(chain.gap.lambda0) << "\n";
    out << "gap," << fmt(chain.gap.gap) << "\n";
    return 0;
}

int cmd_rate_table(const LoadedChain& chain, const std::vector<double>& grid, std::ostream& out) {
    out << "x,I_theta,I_eta,I_zeta,t_opt\n";
    for (double x : grid) {
        if (!(x > 0.0 && x < 1.0)) throw domain_error("rate-table x must lie in (0,1)");
        double i_theta = bounds::rate_function(x, chain.spec.mean, chain.gap.lambda0);
        mgf::EmpiricalRate eta = mgf::empirical_rate(chain.spec, chain.dec, chain.gap, x,
                                                     mgf::RateKind::eta);
        mgf::EmpiricalRate zeta = mgf::empirical_rate(chain.spec, chain.dec, chain.gap, x,
                                                      mgf::RateKind::zeta);
        out << csv::join_row({fmt(x), fmt(i_theta), fmt(eta.rate), fmt(zeta.rate),
                              fmt(zeta.t)})
            << "\n";
    }
    return 0;
}

struct VerifyOptions {
    double eps_raw = 0.0;
    std::int64_t n = 0;
    std::string method = "both";
    std::int64_t reps = 100000;
    double alpha = 0.01;
    std::uint64_t seed = kDefaultSeed;
    bool raw_lambda = false;
    bool rational = false;
    std::int64_t lattice_max = 10000;
};

int cmd_verify(const LoadedChain& chain, const VerifyOptions& opt, std::ostream& out) {
    const ReversibleChainSpec& spec = chain.spec;
    double eps = spec.eps_from_raw(opt.eps_raw);
    double mu = spec.mean;
    double threshold = static_cast<double>(opt.n) * (mu + eps);

    double log_product, log_gaussian;
    if (opt.raw_lambda) {
        // Exploratory: evaluate the formulas at the unclipped eigenvalue.
        double rate = raw_lambda_rate(mu + eps, mu, chain.gap.lambda);
        log_product = -static_cast<double>(opt.n) * rate;
        log_gaussian = -2.0 * (1.0 - chain.gap.lambda) / (1.0 + chain.gap.lambda) *
                       static_cast<double>(opt.n) * eps * eps;
    } else {
        bounds::BoundInput in{mu, eps, opt.n, chain.gap.lambda0};
        log_product = bounds::log_product_bound(in);
        log_gaussian = bounds::log_gaussian_bound(in);
    }
    std::optional<double> lezaud;
    if (5.0 * eps <= mu)
        lezaud = std::exp(bounds::log_lezaud_bound(mu, eps, opt.n, chain.gap.lambda));

    std::string exact = "NA";
    if (opt.method == "dp" || opt.method == "both") {
        oracle::LatticeObservable lattice =
            oracle::detect_lattice(spec.observable, opt.lattice_max);
        oracle::TailTable table = opt.rational
                                      ? oracle::exact_tail_dp_rational(spec, lattice, opt.n)
                                      : oracle::exact_tail_dp(spec, lattice, opt.n);
        exact = fmt(table.tail(threshold));
    }
    std::string mc_estimate = "NA", mc_upper = "NA";
    if (opt.method == "mc" || opt.method == "both") {
        mc::TailEstimate est =
            mc::estimate_tail_chain(spec, opt.n, threshold, opt.reps, opt.alpha, opt.seed);
        mc_estimate = fmt(est.estimate);
        mc_upper = fmt(est.upper);
    }

    out << "n,threshold,exact,product_bound,gaussian_bound,lezaud,mc_estimate,mc_ci_high\n";
    out << csv::join_row({std::to_string(opt.n), fmt(threshold), exact,
                          fmt(std::exp(log_product)), fmt(std::exp(log_gaussian)),
                          lezaud ? fmt(*lezaud) : "NA", mc_estimate, mc_upper})
        << "\n";
    return 0;
}

int cmd_plan(const LoadedChain& chain, double eps_raw, double delta, const std::string& kind,
             std::ostream& out) {
    double eps = chain.spec.eps_from_raw(eps_raw);
    bounds::BoundKind bound_kind =
        kind == "product" ? bounds::BoundKind::product : bounds::BoundKind::gaussian;
    std::int64_t n =
        bounds::plan_sample_size(chain.spec.mean, eps, delta, chain.gap.lambda0, bound_kind);
    out << "mu,eps,mu_raw,eps_raw,delta,lambda,lambda0,kind,n\n";
    out << csv::join_row({fmt(chain.spec.mean), fmt(eps), fmt(chain.spec.mean_raw()),
                          fmt(eps_raw), fmt(delta), fmt(chain.gap.lambda),
                          fmt(chain.gap.lambda0), kind, std::to_string(n)})
        << "\n";
    return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deviation bounds for empirical sums along reversible Markov chains"};
    app.require_subcommand(1);

    std::string input_path, out_path;
    double tol = 1e-10;
    app.add_option("--tol", tol, "structural validation tolerance")->capture_default_str();

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", input_path, "chain-spec JSON document")->required();
        cmd->add_option("--out", out_path, "write CSV here instead of standard output");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "spectral report for a chain");
    add_common(analyze);

    double eps_raw = 0.0, delta = 0.0;
    std::int64_t n = 0;
    CLI::App* bound = app.add_subcommand("bound", "deviation bounds at one (eps, n)");
    add_common(bound);
    bound->add_option("--eps", eps_raw, "deviation in raw observable units")->required();
    bound->add_option("--n", n, "number of steps")->required();

    std::string eps_grid_text;
    CLI::App* compare = app.add_subcommand("compare", "bound comparison over an eps grid");
    add_common(compare);
    compare->add_option("--eps-grid", eps_grid_text, "eps grid start:stop:step (raw units)")
        ->required();
    compare->add_option("--n", n, "number of steps")->required();

    std::string x_grid_text;
    CLI::App* rate_table = app.add_subcommand("rate-table", "rate functions over an x grid");
    add_common(rate_table);
    rate_table->add_option("--x-grid", x_grid_text, "x grid start:stop:step (normalized units)")
        ->required();

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand("verify", "check bounds against exact/MC tails");
    add_common(verify);
    verify->add_option("--eps", verify_opt.eps_raw, "deviation in raw observable units")
        ->required();
    verify->add_option("--n", verify_opt.n, "number of steps")->required();
    verify->add_option("--method", verify_opt.method, "mc, dp, or both")
        ->check(CLI::IsMember({"mc", "dp", "both"}))
        ->capture_default_str();
    verify->add_option("--reps", verify_opt.reps, "Monte Carlo replicates")
        ->capture_default_str();
    verify->add_option("--alpha", verify_opt.alpha, "one-sided confidence level")
        ->capture_default_str();
    verify->add_option("--seed", verify_opt.seed, "random seed")->capture_default_str();
    verify->add_flag("--raw-lambda", verify_opt.raw_lambda,
                     "evaluate bounds at the unclipped eigenvalue (exploratory)");
    verify->add_flag("--rational", verify_opt.rational,
                     "run the exact tail in rational arithmetic (small instances)");
    verify->add_option("--lattice-max", verify_opt.lattice_max,
                       "largest lattice denominator to try")
        ->capture_default_str();

    std::string kind = "gaussian";
    CLI::App* plan = app.add_subcommand("plan", "smallest n meeting a failure budget");
    add_common(plan);
    plan->add_option("--eps", eps_raw, "deviation in raw observable units")->required();
    plan->add_option("--delta", delta, "failure probability budget")->required();
    plan->add_option("--kind", kind, "which bound to invert")
        ->check(CLI::IsMember({"product", "gaussian"}))
        ->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        OutputTarget target(out_path, out);
        LoadedChain chain = load(input_path, tol);
        if (analyze->parsed()) return cmd_analyze(chain, target.out());
        if (bound->parsed()) {
            emit_bound_rows(target.out(), chain, {eps_raw}, n);
            return 0;
        }
        if (compare->parsed()) {
            emit_bound_rows(target.out(), chain, parse_grid(eps_grid_text), n);
            return 0;
        }
        if (rate_table->parsed())
            return cmd_rate_table(chain, parse_grid(x_grid_text), target.out());
        if (verify->parsed()) return cmd_verify(chain, verify_opt, target.out());
        if (plan->parsed()) return cmd_plan(chain, eps_raw, delta, kind, target.out());
        err << "error: no subcommand\n";
        return 2;
    } catch (const validation_error& e) {
        err << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        err << "io error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace chainbound::cli

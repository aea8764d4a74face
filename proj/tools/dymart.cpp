// Experiment and verification front end.
//
// Exit codes: 0 = all checks passed, 1 = a check failed, 2 = usage or
// capacity error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dymart/dymart.hpp"

namespace {

using nlohmann::json;
using namespace dymart;

constexpr std::uint64_t kDefaultSeed = 20240101;

struct Config {
    int depth = 12;
    std::uint64_t seed = kDefaultSeed;
    int trials = 100;
    std::vector<std::string> tol_args;
    std::map<std::string, double> tol;
    std::string out;
    std::string format = "csv";
    bool full_range_qv = false;
    std::string in;
};

void add_common_options(CLI::App* cmd, Config& cfg) {
    cmd->add_option("--depth", cfg.depth, "Dyadic depth n");
    cmd->add_option("--seed", cfg.seed, "64-bit seed");
    cmd->add_option("--trials", cfg.trials, "Number of seeded trials");
    cmd->add_option("--tol", cfg.tol_args, "Tolerance override NAME=VALUE")
        ->delimiter(',');
    cmd->add_option("--out", cfg.out, "Output file path (default: stdout)");
    cmd->add_option("--format", cfg.format, "Output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--full-range-qv", cfg.full_range_qv,
                  "Quadratic variation over all n increments");
}

// Returns 0 on success, 2 on a malformed NAME=VALUE item.
int parse_tolerances(Config& cfg) {
    for (const std::string& item : cfg.tol_args) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "--tol expects NAME=VALUE, got '" << item << "'\n";
            return 2;
        }
        try {
            std::size_t used = 0;
            const double value = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
            cfg.tol[item.substr(0, eq)] = value;
        } catch (const std::exception&) {
            std::cerr << "--tol expects NAME=VALUE with a numeric value, got '" << item << "'\n";
            return 2;
        }
    }
    return 0;
}

double tolerance(const Config& cfg, const std::string& name, double fallback) {
    if (auto it = cfg.tol.find(name); it != cfg.tol.end()) return it->second;
    if (auto it = cfg.tol.find("all"); it != cfg.tol.end()) return it->second;
    return fallback;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    return seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(trial + 1));
}

RandomVariable random_function(DyadicSpace space, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(space.size());
    for (double& x : v) x = rng.next_symmetric();
    return RandomVariable(space, std::move(v));
}

PredictableIntegrand random_integrand(DyadicSpace space, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<RandomVariable> slices;
    for (int j = 0; j < space.depth(); ++j) {
        const std::size_t cell = space.size() >> j;
        std::vector<double> v(space.size());
        for (std::size_t start = 0; start < v.size(); start += cell) {
            const double value = rng.next_symmetric();
            for (std::size_t m = start; m < start + cell; ++m) v[m] = value;
        }
        slices.push_back(RandomVariable(space, std::move(v)));
    }
    return PredictableIntegrand(space, std::move(slices));
}

// All output goes through an owned stream so files and stdout share a path.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void write_header(std::ostream& os, const char* command, const Config& cfg) {
    os << "# dymart " << command << " seed=" << cfg.seed << " depth=" << cfg.depth << "\n";
}

// ---------------------------------------------------------------- walsh-table

int cmd_walsh_table(const Config& cfg) {
    if (cfg.depth > 10) {
        std::cerr << "walsh-table: full table capped at depth 10 (got " << cfg.depth << ")\n";
        return 2;
    }
    const DyadicSpace space(cfg.depth);
    std::vector<RandomVariable> basis;
    basis.reserve(space.size());
    for (std::size_t mask = 0; mask < space.size(); ++mask) {
        basis.push_back(walsh(space, WalshMask(mask)));
    }
    Output out(cfg.out);
    std::ostream& os = out.stream();
    write_header(os, "walsh-table", cfg);
    os << "mask";
    for (std::size_t t = 0; t < space.size(); ++t) os << ",g" << t;
    os << "\n";
    bool identity = true;
    for (std::size_t s = 0; s < space.size(); ++s) {
        os << s;
        for (std::size_t t = 0; t < space.size(); ++t) {
            const double g = inner_product(basis[s], basis[t]);
            if (g != (s == t ? 1.0 : 0.0)) identity = false;
            os << ',' << format_real(g);
        }
        os << "\n";
    }
    if (!identity) {
        std::cerr << "walsh-table: Gram matrix is not the identity\n";
        return 1;
    }
    return 0;
}

// ------------------------------------------------------------------------ mrt

int cmd_mrt(const Config& cfg) {
    const double tol = tolerance(cfg, "mrt", 1e-10);
    Output out(cfg.out);
    std::ostream& os = out.stream();

    if (!cfg.in.empty()) {
        std::ifstream is(cfg.in, std::ios::binary);
        if (!is) {
            std::cerr << "mrt: cannot open " << cfg.in << "\n";
            return 2;
        }
        write_header(os, "mrt", cfg);
        os << "source,max_error\n";
        try {
            const AdaptedProcess process = read_process_bin(is);
            const DiscreteMartingale y(process, tol);
            const RoundtripReport r = mrt_roundtrip(y);
            os << cfg.in << ',' << format_real(r.max_error) << "\n";
            if (r.max_error > tol) {
                std::cerr << "mrt: roundtrip error " << r.max_error << " over tolerance\n";
                return 1;
            }
        } catch (const std::invalid_argument& e) {
            os << cfg.in << ",invalid\n";
            std::cerr << "mrt: rejected input: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }

    const DyadicSpace space(cfg.depth);
    write_header(os, "mrt", cfg);
    os << "trial,trial_seed,max_error\n";
    int failures = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = trial_seed(cfg.seed, t);
        const DiscreteMartingale y = close_martingale(random_function(space, s));
        const RoundtripReport r = mrt_roundtrip(y);
        os << t << ',' << s << ',' << format_real(r.max_error) << "\n";
        if (r.max_error > tol) {
            std::cerr << "mrt: trial " << t << " (seed " << s << ") error " << r.max_error
                      << " over tolerance " << tol << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------------- bm-stats

int cmd_bm_stats(const Config& cfg) {
    Output out(cfg.out);
    std::ostream& os = out.stream();
    write_header(os, "bm-stats", cfg);
    os << "depth,k,estimate,reference\n";
    double worst = 0.0;
    for (int n = 2; n <= cfg.depth; ++n) {
        const DiscreteMartingale chi = random_walk(DyadicSpace(n));
        const RandomVariable& terminal = chi.slice(n);
        const RandomVariable sq = terminal * terminal;
        const double moments[4] = {expectation(terminal), expectation(sq),
                                   expectation(sq * terminal), expectation(sq * sq)};
        const double reference[4] = {0.0, 1.0, 0.0, 3.0 - 2.0 / n};
        for (int k = 0; k < 4; ++k) {
            os << n << ',' << (k + 1) << ',' << format_real(moments[k]) << ','
               << format_real(reference[k]) << "\n";
            worst = std::max(worst, std::fabs(moments[k] - reference[k]));
        }
    }
    return worst <= tolerance(cfg, "moments", 1e-12) ? 0 : 1;
}

// ------------------------------------------------------------------------ sde

struct SdeParams {
    double mu = 0.05;
    double sigma = 0.2;
    double theta = 1.0;
    double mean = 0.0;
    double x0 = 1.0;
    std::vector<double> drift_coeffs;
    std::vector<double> diff_coeffs;
    std::vector<int> depths = {6, 8, 10, 12, 14};
};

double eval_poly(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

int cmd_sde(const Config& cfg, const std::string& problem, const SdeParams& params) {
    static const std::vector<std::string> known = {"gbm", "ou", "poly"};
    if (std::find(known.begin(), known.end(), problem) == known.end()) {
        std::cerr << "sde: unknown problem '" << problem << "'; available: gbm, ou, poly\n";
        return 2;
    }
    Output out(cfg.out);
    std::ostream& os = out.stream();
    write_header(os, "sde", cfg);
    os << "depth,estimate,reference,error\n";
    for (int n : params.depths) {
        SdeProblem p;
        p.depth = n;
        p.x0 = params.x0;
        double reference = 0.0;
        if (problem == "gbm") {
            p.drift = [mu = params.mu](double, double x) { return mu * x; };
            p.diffusion = [sigma = params.sigma](double, double x) { return sigma * x; };
            reference = params.x0 * std::exp(params.mu);
        } else if (problem == "ou") {
            p.drift = [theta = params.theta, mean = params.mean](double, double x) {
                return theta * (mean - x);
            };
            p.diffusion = [sigma = params.sigma](double, double) { return sigma; };
            reference = params.mean + (params.x0 - params.mean) * std::exp(-params.theta);
        } else {
            p.drift = [c = params.drift_coeffs](double, double x) { return eval_poly(c, x); };
            p.diffusion = [c = params.diff_coeffs](double, double x) { return eval_poly(c, x); };
            // Mean-field recursion on the same grid (exact for linear drift).
            double m = params.x0;
            for (int l = 0; l < n; ++l) m += eval_poly(params.drift_coeffs, m) / n;
            reference = m;
        }
        const double estimate = weak_expectation(p, [](double x) { return x; });
        os << n << ',' << format_real(estimate) << ',' << format_real(reference) << ','
           << format_real(std::fabs(estimate - reference)) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- verify-all

struct SuiteResult {
    std::string name;
    int checks = 0;
    double max_violation = 0.0;
    bool pass = true;
};

void track(SuiteResult& suite, double violation, double tol) {
    ++suite.checks;
    suite.max_violation = std::max(suite.max_violation, violation);
    if (violation > tol) suite.pass = false;
}

double max_abs_diff(const RandomVariable& f, const RandomVariable& g) {
    double worst = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        worst = std::max(worst, std::fabs(f[m] - g[m]));
    }
    return worst;
}

SuiteResult suite_orthonormality(const Config& cfg) {
    SuiteResult suite{"walsh-orthonormality"};
    const double tol = tolerance(cfg, "walsh-orthonormality", 0.0);
    const DyadicSpace space(std::min(cfg.depth, 8));
    std::vector<RandomVariable> basis;
    for (std::size_t mask = 0; mask < space.size(); ++mask) {
        basis.push_back(walsh(space, WalshMask(mask)));
    }
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (std::size_t t = s; t < space.size(); ++t) {
            const double expected = s == t ? 1.0 : 0.0;
            track(suite, std::fabs(inner_product(basis[s], basis[t]) - expected), tol);
        }
    }
    return suite;
}

SuiteResult suite_star_independence(const Config& cfg) {
    SuiteResult suite{"star-independence"};
    const double tol = tolerance(cfg, "star-independence", 0.0);
    SplitMix64 rng(cfg.seed);
    const int depth = std::min(cfg.depth, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = depth == 1 ? 1 : 2 + static_cast<int>(rng.next_below(depth - 1));
        const DyadicSpace space(n);
        const int count = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
        std::vector<int> coins;
        std::vector<double> alphas;
        for (int k = 0; k < count; ++k) {
            int j;
            do {
                j = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            } while (std::find(coins.begin(), coins.end(), j) != coins.end());
            coins.push_back(j);
            alphas.push_back(2.0 * rng.next_symmetric());
        }
        const auto [lhs, rhs] = check_star_independence(space, coins, alphas);
        track(suite, std::fabs(lhs - rhs), tol);
    }
    return suite;
}

SuiteResult suite_filtration_basis(const Config& cfg) {
    SuiteResult suite{"filtration-basis"};
    const double tol = tolerance(cfg, "filtration-basis", 1e-12);
    const int n = std::min(cfg.depth, 12);
    const DyadicSpace space(n);
    for (int l = 0; l <= n; ++l) {
        const auto basis = filtration_basis(space, l);
        track(suite, basis.size() == (std::size_t{1} << l) ? 0.0 : 1.0, 0.5);
        const RandomVariable f = cond_expectation(random_function(space, cfg.seed + l), l);
        const WalshSpectrum s = wht_forward(f);
        double off_support = 0.0;
        for (std::size_t mask = std::size_t{1} << l; mask < space.size(); ++mask) {
            off_support = std::max(off_support, std::fabs(s.at_index(mask)));
        }
        track(suite, off_support, tol);
    }
    return suite;
}

SuiteResult suite_cond_expectation(const Config& cfg) {
    SuiteResult suite{"conditional-expectation"};
    const double tol = tolerance(cfg, "conditional-expectation", 1e-10);
    const DyadicSpace space(cfg.depth);
    for (int trial = 0; trial < 20; ++trial) {
        const RandomVariable f = random_function(space, trial_seed(cfg.seed, trial));
        for (int l = 0; l <= cfg.depth; l += std::max(1, cfg.depth / 4)) {
            track(suite, max_abs_diff(spectral_truncate(f, l), cond_expectation(f, l)), tol);
        }
    }
    return suite;
}

SuiteResult suite_mrt(const Config& cfg) {
    SuiteResult suite{"mrt-roundtrip"};
    const double tol = tolerance(cfg, "mrt", 1e-10);
    const DyadicSpace space(cfg.depth);
    for (int trial = 0; trial < 30; ++trial) {
        const DiscreteMartingale y =
            close_martingale(random_function(space, trial_seed(cfg.seed, 1000 + trial)));
        track(suite, mrt_roundtrip(y).max_error, tol);
        const std::vector<RandomVariable> c = represent(y);
        for (int j = 1; j <= cfg.depth; ++j) {
            track(suite, is_measurable(c[static_cast<std::size_t>(j - 1)], j - 1, tol) ? 0.0 : 1.0,
                  0.5);
        }
    }
    return suite;
}

SuiteResult suite_integral(const Config& cfg) {
    SuiteResult suite{"integral-martingale"};
    const double tol = tolerance(cfg, "integral-martingale", 1e-12);
    const DyadicSpace space(cfg.depth);
    for (int trial = 0; trial < 30; ++trial) {
        const PredictableIntegrand h = random_integrand(space, trial_seed(cfg.seed, 2000 + trial));
        track(suite, integral_is_martingale(h, tol).max_violation, tol);
    }
    return suite;
}

SuiteResult suite_ito(const Config& cfg) {
    SuiteResult suite{"ito-isometry"};
    const double tol = tolerance(cfg, "ito-isometry", 1e-10);
    const DyadicSpace space(cfg.depth);
    for (int trial = 0; trial < 30; ++trial) {
        const PredictableIntegrand h = random_integrand(space, trial_seed(cfg.seed, 3000 + trial));
        const auto [lhs, rhs] = ito_isometry(h);
        track(suite, std::fabs(lhs - rhs), tol);
    }
    return suite;
}

SuiteResult suite_energy_qv(const Config& cfg) {
    SuiteResult suite{"energy-qv"};
    const double tol = tolerance(cfg, "energy-qv", 1e-10);
    const DyadicSpace space(cfg.depth);
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteMartingale y =
            close_martingale(random_function(space, trial_seed(cfg.seed, 4000 + trial)));
        const std::vector<RandomVariable> c = represent(y);
        double rhs = 0.0;
        for (const RandomVariable& cj : c) rhs += expectation(cj * cj);
        const RandomVariable diff = y.slice(cfg.depth) - y.slice(0);
        track(suite, std::fabs(expectation(diff * diff) - rhs), tol);
    }
    const DiscreteMartingale chi = random_walk(space);
    const RandomVariable qv = quadratic_variation(chi.process(), cfg.full_range_qv);
    const double expected =
        cfg.full_range_qv ? 1.0 : static_cast<double>(cfg.depth - 1) / cfg.depth;
    for (std::size_t m = 0; m < space.size(); ++m) {
        track(suite, std::fabs(qv[m] - expected), tol);
    }
    return suite;
}

SuiteResult suite_moments(const Config& cfg) {
    SuiteResult suite{"bm-moments"};
    const double tol = tolerance(cfg, "moments", 1e-12);
    const int n = std::min(cfg.depth, 12);
    const DiscreteMartingale chi = random_walk(DyadicSpace(n));
    const RandomVariable& terminal = chi.slice(n);
    const RandomVariable sq = terminal * terminal;
    track(suite, std::fabs(expectation(terminal)), tol);
    track(suite, std::fabs(expectation(sq) - 1.0), tol);
    track(suite, std::fabs(expectation(sq * terminal)), tol);
    track(suite, std::fabs(expectation(sq * sq) - (3.0 - 2.0 / n)), tol);
    return suite;
}

SuiteResult suite_independent_increments(const Config& cfg) {
    SuiteResult suite{"independent-increments"};
    const double tol = tolerance(cfg, "independent-increments", 0.0);
    const int n = std::min(cfg.depth, 8);
    const DiscreteMartingale chi = random_walk(DyadicSpace(n));
    std::vector<IncrementPair> pairs;
    for (int a = 0; a < n; ++a) {
        for (int c = a + 1; c < n; ++c) pairs.push_back({a, a + 1, c, c + 1});
    }
    if (!pairs.empty()) {
        const IndependenceReport r = independent_increments_check(chi, pairs);
        track(suite, r.max_discrepancy, tol);
        for (const IncrementPair& p : pairs) {
            const auto [lhs, rhs] = increment_product_check(chi, p.a, p.b, p.c, p.d);
            track(suite, std::fabs(lhs - rhs), std::max(tol, 1e-14));
        }
    }
    return suite;
}

SuiteResult suite_sde(const Config& cfg) {
    SuiteResult suite{"sde-weak"};
    const double tol = tolerance(cfg, "sde-weak", 1e-12);
    const double mu = 0.05, sigma = 0.2, x0 = 1.0;
    for (int n : {6, 8, 10, 12, 14}) {
        SdeProblem p{[mu](double, double x) { return mu * x; },
                     [sigma](double, double x) { return sigma * x; }, x0, n};
        const double estimate = weak_expectation(p, [](double x) { return x; });
        const double recursion = x0 * std::pow(1.0 + mu / n, n);
        track(suite, std::fabs(estimate - recursion), tol);
    }
    return suite;
}

int cmd_verify_all(const Config& cfg) {
    std::vector<SuiteResult> results;
    results.push_back(suite_orthonormality(cfg));
    results.push_back(suite_star_independence(cfg));
    results.push_back(suite_filtration_basis(cfg));
    results.push_back(suite_cond_expectation(cfg));
    results.push_back(suite_mrt(cfg));
    results.push_back(suite_integral(cfg));
    results.push_back(suite_ito(cfg));
    results.push_back(suite_energy_qv(cfg));
    results.push_back(suite_moments(cfg));
    results.push_back(suite_independent_increments(cfg));
    results.push_back(suite_sde(cfg));

    json summary = json::array();
    bool all_pass = true;
    for (const SuiteResult& r : results) {
        summary.push_back({{"suite", r.name},
                           {"checks", r.checks},
                           {"max_violation", r.max_violation},
                           {"pass", r.pass}});
        if (!r.pass) all_pass = false;
    }
    Output out(cfg.out);
    out.stream() << json{{"seed", cfg.seed},
                         {"depth", cfg.depth},
                         {"pass", all_pass},
                         {"suites", summary}}
                        .dump(2)
                 << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic martingale calculus experiments"};
    app.require_subcommand(1);

    Config cfg;
    SdeParams sde_params;
    std::string sde_problem;

    CLI::App* walsh_table = app.add_subcommand("walsh-table", "Walsh Gram matrix");
    add_common_options(walsh_table, cfg);

    CLI::App* mrt = app.add_subcommand("mrt", "Representation roundtrip trials");
    add_common_options(mrt, cfg);
    mrt->add_option("--in", cfg.in, "Check a serialized process (binary) instead");

    CLI::App* bm_stats = app.add_subcommand("bm-stats", "Random walk moment sweep");
    add_common_options(bm_stats, cfg);

    CLI::App* sde = app.add_subcommand("sde", "Weak-convergence sweep for a named problem");
    add_common_options(sde, cfg);
    sde->add_option("problem", sde_problem, "Problem name: gbm | ou | poly")->required();
    sde->add_option("--mu", sde_params.mu, "gbm drift rate");
    sde->add_option("--sigma", sde_params.sigma, "diffusion scale");
    sde->add_option("--theta", sde_params.theta, "ou reversion rate");
    sde->add_option("--mean", sde_params.mean, "ou long-run mean");
    sde->add_option("--x0", sde_params.x0, "initial state");
    sde->add_option("--drift-coeffs", sde_params.drift_coeffs, "poly drift coefficients")
        ->delimiter(',');
    sde->add_option("--diff-coeffs", sde_params.diff_coeffs, "poly diffusion coefficients")
        ->delimiter(',');
    sde->add_option("--depths", sde_params.depths, "depth sweep")->delimiter(',');

    CLI::App* verify = app.add_subcommand("verify-all", "Run every invariant suite");
    add_common_options(verify, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (const int rc = parse_tolerances(cfg); rc != 0) return rc;

    try {
        if (walsh_table->parsed()) return cmd_walsh_table(cfg);
        if (mrt->parsed()) return cmd_mrt(cfg);
        if (bm_stats->parsed()) return cmd_bm_stats(cfg);
        if (sde->parsed()) return cmd_sde(cfg, sde_problem, sde_params);
        if (verify->parsed()) return cmd_verify_all(cfg);
    } catch (const capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#pragma once

// Euler scheme on the dyadic grid, driven by the coin increments:
// X_{l+1} = X_l + a(l/n, X_l)/n + b(l/n, X_l) * w_{l+1}/sqrt(n).
// Full enumeration evolves all 2^n atoms; sampled mode evolves a seeded
// subset of atoms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dymart/integral.hpp"
#include "dymart/martingale.hpp"
#include "dymart/rng.hpp"
#include "dymart/space.hpp"

namespace dymart {

struct SdeProblem {
    std::function<double(double, double)> drift;      // a(t, x)
    std::function<double(double, double)> diffusion;  // b(t, x)
    double x0 = 0.0;
    int depth = 12;
};

namespace detail {
inline double checked_eval(const std::function<double(double, double)>& f, double t, double x,
                           int step, const char* name) {
    const double y = f(t, x);
    if (!std::isfinite(y)) {
        throw std::runtime_error(std::string("euler_solve: non-finite ") + name + " at step " +
                                 std::to_string(step) + ", state " + std::to_string(x));
    }
    return y;
}
}  // namespace detail

// Full-enumeration solve over all atoms; adapted by construction.
inline AdaptedProcess euler_solve(const SdeProblem& p) {
    const DyadicSpace space(p.depth);
    const int n = p.depth;
    const double dt = 1.0 / static_cast<double>(n);
    const double root_dt = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<RandomVariable> slices;
    slices.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<double> state(space.size(), p.x0);
    slices.push_back(RandomVariable(space, state));
    for (int l = 0; l < n; ++l) {
        const double t = static_cast<double>(l) * dt;
        for (std::size_t m = 0; m < state.size(); ++m) {
            const double x = state[m];
            const double a = detail::checked_eval(p.drift, t, x, l, "drift");
            const double b = detail::checked_eval(p.diffusion, t, x, l, "diffusion");
            state[m] = x + a * dt + b * static_cast<double>(space.sign(m, l + 1)) * root_dt;
        }
        slices.push_back(RandomVariable(space, state));
    }
    return AdaptedProcess(space, std::move(slices));
}

struct SampledPaths {
    int depth = 0;
    std::vector<std::size_t> atoms;            // ascending
    std::vector<std::vector<double>> paths;    // paths[i][l], l = 0..depth
};

// Seeded draw of `count` atoms without replacement (indices kept ascending,
// so count == 2^n reproduces the full-enumeration rows in order), then the
// same stepping restricted to those atoms.
inline SampledPaths euler_solve_sampled(const SdeProblem& p, std::size_t count,
                                        std::uint64_t seed) {
    const DyadicSpace space(p.depth);
    if (count < 1 || count > space.size()) {
        throw std::domain_error("euler_solve_sampled: count out of range [1, " +
                                std::to_string(space.size()) + "]");
    }
    std::vector<std::size_t> pool(space.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.next_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());

    SampledPaths out;
    out.depth = p.depth;
    out.atoms = pool;
    out.paths.resize(count);
    const int n = p.depth;
    const double dt = 1.0 / static_cast<double>(n);
    const double root_dt = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double>& path = out.paths[i];
        path.resize(static_cast<std::size_t>(n) + 1);
        path[0] = p.x0;
        for (int l = 0; l < n; ++l) {
            const double t = static_cast<double>(l) * dt;
            const double x = path[static_cast<std::size_t>(l)];
            const double a = detail::checked_eval(p.drift, t, x, l, "drift");
            const double b = detail::checked_eval(p.diffusion, t, x, l, "diffusion");
            path[static_cast<std::size_t>(l) + 1] =
                x + a * dt + b * static_cast<double>(space.sign(out.atoms[i], l + 1)) * root_dt;
        }
    }
    return out;
}

// Exact E(payoff(X_n)) over all atoms.
inline double weak_expectation(const SdeProblem& p,
                               const std::function<double(double)>& payoff) {
    const AdaptedProcess solution = euler_solve(p);
    const RandomVariable& terminal = solution.slice(p.depth);
    std::vector<double> v(terminal.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = payoff(terminal[m]);
    return expectation(RandomVariable(terminal.space(), std::move(v)));
}

struct SdeDiagnostic {
    bool applicable = false;  // drift vanished along every visited state
    bool pass = false;
    double max_violation = 0.0;
};

// Driftless solutions are discrete stochastic integrals, hence martingales.
// Applicability is decided by evaluating the drift along the visited states.
inline SdeDiagnostic martingale_diagnostic(const SdeProblem& p, double tol = 1e-10) {
    const DyadicSpace space(p.depth);
    const int n = p.depth;
    const double dt = 1.0 / static_cast<double>(n);
    const double root_dt = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<RandomVariable> slices;
    slices.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<double> state(space.size(), p.x0);
    slices.push_back(RandomVariable(space, state));
    bool drift_free = true;
    for (int l = 0; l < n; ++l) {
        const double t = static_cast<double>(l) * dt;
        for (std::size_t m = 0; m < state.size(); ++m) {
            const double x = state[m];
            const double a = detail::checked_eval(p.drift, t, x, l, "drift");
            if (a != 0.0) drift_free = false;
            const double b = detail::checked_eval(p.diffusion, t, x, l, "diffusion");
            state[m] = x + a * dt + b * static_cast<double>(space.sign(m, l + 1)) * root_dt;
        }
        slices.push_back(RandomVariable(space, state));
    }
    SdeDiagnostic diag;
    if (!drift_free) return diag;
    diag.applicable = true;
    const MartingaleReport report =
        martingale_check(AdaptedProcess(space, std::move(slices)), tol);
    diag.pass = report.pass();
    diag.max_violation = report.max_violation;
    return diag;
}

}  // namespace dymart

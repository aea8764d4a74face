#pragma once

// The scaled coin-flip random walk, the discrete stochastic integral
// I_l = sum_{j<l} H_j w_{j+1} / sqrt(n), the Ito isometry and the
// representation roundtrip.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "dymart/martingale.hpp"
#include "dymart/space.hpp"

namespace dymart {

// chi_l = (1/sqrt(n)) * (w_1 + ... + w_l); increments are +-1/sqrt(n).
inline DiscreteMartingale random_walk(DyadicSpace space) {
    const int n = space.depth();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<RandomVariable> slices;
    slices.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<double> running(space.size(), 0.0);
    slices.push_back(RandomVariable(space, running));
    for (int l = 1; l <= n; ++l) {
        for (std::size_t m = 0; m < running.size(); ++m) {
            running[m] += static_cast<double>(space.sign(m, l)) * scale;
        }
        slices.push_back(RandomVariable(space, running));
    }
    return DiscreteMartingale(AdaptedProcess(space, std::move(slices)));
}

// The full integral process I_0, ..., I_n.
inline AdaptedProcess integral_process(const PredictableIntegrand& h) {
    const DyadicSpace space = h.space();
    const int n = space.depth();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<RandomVariable> slices;
    slices.reserve(static_cast<std::size_t>(n) + 1);
    std::vector<double> running(space.size(), 0.0);
    slices.push_back(RandomVariable(space, running));
    for (int j = 0; j < n; ++j) {
        const RandomVariable& hj = h.slice(j);
        for (std::size_t m = 0; m < running.size(); ++m) {
            running[m] += hj[m] * static_cast<double>(space.sign(m, j + 1)) * scale;
        }
        slices.push_back(RandomVariable(space, running));
    }
    return AdaptedProcess(space, std::move(slices));
}

inline RandomVariable stochastic_integral(const PredictableIntegrand& h, int l) {
    if (l < 0 || l > h.steps()) {
        throw std::domain_error("stochastic_integral: step index out of range");
    }
    return integral_process(h).slice(l);
}

inline MartingaleReport integral_is_martingale(const PredictableIntegrand& h,
                                               double tol = 1e-12) {
    return martingale_check(integral_process(h), tol);
}

// lhs = E(I_n^2), rhs = (1/n) sum_j E(H_j^2).
inline std::pair<double, double> ito_isometry(const PredictableIntegrand& h) {
    const AdaptedProcess process = integral_process(h);
    const RandomVariable& terminal = process.slice(h.steps());
    const double lhs = expectation(terminal * terminal);
    double rhs = 0.0;
    for (int j = 0; j < h.steps(); ++j) {
        rhs += expectation(h.slice(j) * h.slice(j));
    }
    rhs /= static_cast<double>(h.steps());
    return {lhs, rhs};
}

struct RoundtripReport {
    double max_error = 0.0;
    bool pass(double tol = kMartingaleTol) const { return max_error <= tol; }
};

// Extract the integrand of Y and integrate it back: Y_l = Y_0 + I_l exactly
// at finite depth.
inline RoundtripReport mrt_roundtrip(const DiscreteMartingale& y) {
    const PredictableIntegrand h = integrand(y);
    const AdaptedProcess integral = integral_process(h);
    RoundtripReport report;
    for (int l = 0; l <= y.steps(); ++l) {
        const RandomVariable& yl = y.slice(l);
        const RandomVariable& il = integral.slice(l);
        const double y0 = y.slice(0)[0];
        for (std::size_t m = 0; m < yl.size(); ++m) {
            const double err = std::fabs(yl[m] - (y0 + il[m]));
            if (err > report.max_error) report.max_error = err;
        }
    }
    return report;
}

}  // namespace dymart

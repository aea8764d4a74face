#pragma once

// Discrete adapted processes and martingales on the dyadic filtration:
// axiom checking, exact representation against the coin flips, predictable
// integrand extraction, quadratic variation and independence-of-increments
// checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dymart/filtration.hpp"
#include "dymart/space.hpp"

namespace dymart {

inline constexpr double kMartingaleTol = 1e-10;

// Slices Y_0, ..., Y_n with Y_l measurable at level l.
class AdaptedProcess {
public:
    AdaptedProcess(DyadicSpace space, std::vector<RandomVariable> slices,
                   double tol = kMartingaleTol)
        : space_(space), slices_(std::move(slices)) {
        const std::size_t expected = static_cast<std::size_t>(space.depth()) + 1;
        if (slices_.size() != expected) {
            throw std::invalid_argument("AdaptedProcess: expected " + std::to_string(expected) +
                                        " slices, got " + std::to_string(slices_.size()));
        }
        for (std::size_t l = 0; l < slices_.size(); ++l) {
            if (!(slices_[l].space() == space_)) {
                throw std::invalid_argument("AdaptedProcess: slice " + std::to_string(l) +
                                            " on wrong space");
            }
            if (!is_measurable(slices_[l], static_cast<int>(l), tol)) {
                throw std::invalid_argument("AdaptedProcess: slice " + std::to_string(l) +
                                            " not measurable at level " + std::to_string(l));
            }
        }
    }

    const DyadicSpace& space() const { return space_; }
    int steps() const { return space_.depth(); }
    const RandomVariable& slice(int l) const { return slices_[static_cast<std::size_t>(l)]; }
    const std::vector<RandomVariable>& slices() const { return slices_; }

private:
    DyadicSpace space_;
    std::vector<RandomVariable> slices_;
};

struct MartingaleReport {
    bool adapted = true;
    bool martingale = true;
    double max_violation = 0.0;
    int worst_step = -1;  // l with the largest |E(Y_{l+1}|C^l) - Y_l|
    bool pass() const { return adapted && martingale; }
};

// One-step check E(Y_{l+1}|C^l) = Y_l for every l; by the tower law this
// implies the property for all pairs.
inline MartingaleReport martingale_check(const AdaptedProcess& y, double tol = kMartingaleTol) {
    MartingaleReport report;
    for (int l = 0; l < y.steps(); ++l) {
        const RandomVariable projected = cond_expectation(y.slice(l + 1), l);
        double worst = 0.0;
        for (std::size_t m = 0; m < projected.size(); ++m) {
            const double d = std::fabs(projected[m] - y.slice(l)[m]);
            if (d > worst) worst = d;
        }
        if (worst > report.max_violation) {
            report.max_violation = worst;
            report.worst_step = l;
        }
    }
    report.martingale = report.max_violation <= tol;
    return report;
}

class DiscreteMartingale {
public:
    explicit DiscreteMartingale(AdaptedProcess process, double tol = kMartingaleTol)
        : process_(std::move(process)) {
        const MartingaleReport report = martingale_check(process_, tol);
        if (!report.pass()) {
            throw std::invalid_argument(
                "DiscreteMartingale: martingale property violated at step " +
                std::to_string(report.worst_step) + " by " +
                std::to_string(report.max_violation));
        }
    }

    const AdaptedProcess& process() const { return process_; }
    const DyadicSpace& space() const { return process_.space(); }
    int steps() const { return process_.steps(); }
    const RandomVariable& slice(int l) const { return process_.slice(l); }

private:
    AdaptedProcess process_;
};

// The martingale closed by a terminal value: Y_l = E(terminal | C^l).
inline DiscreteMartingale close_martingale(const RandomVariable& terminal) {
    const int n = terminal.space().depth();
    std::vector<RandomVariable> slices;
    slices.reserve(static_cast<std::size_t>(n) + 1);
    for (int l = 0; l <= n; ++l) {
        slices.push_back(cond_expectation(terminal, l));
    }
    return DiscreteMartingale(AdaptedProcess(terminal.space(), std::move(slices)));
}

// Representation coefficients c_1, ..., c_n with Y_l = Y_0 + sum_{j<=l} c_j w_j.
// Each c_j = (Y_j - Y_{j-1}) * w_j pointwise (exact, since w_j^2 = 1) and is
// measurable at level j-1.
inline std::vector<RandomVariable> represent(const DiscreteMartingale& y) {
    std::vector<RandomVariable> coeffs;
    coeffs.reserve(static_cast<std::size_t>(y.steps()));
    for (int j = 1; j <= y.steps(); ++j) {
        coeffs.push_back((y.slice(j) - y.slice(j - 1)) * rademacher(y.space(), j));
    }
    return coeffs;
}

// Projection route to the same coefficients: c_j = E(Y_n * w_j | C^{j-1}).
// Kept as an independent algebraic cross-check of represent().
inline std::vector<RandomVariable> represent_by_projection(const DiscreteMartingale& y) {
    std::vector<RandomVariable> coeffs;
    coeffs.reserve(static_cast<std::size_t>(y.steps()));
    const RandomVariable& terminal = y.slice(y.steps());
    for (int j = 1; j <= y.steps(); ++j) {
        coeffs.push_back(cond_expectation(terminal * rademacher(y.space(), j), j - 1));
    }
    return coeffs;
}

// H_0, ..., H_{n-1} with H_j measurable at level j (known before coin j+1).
class PredictableIntegrand {
public:
    PredictableIntegrand(DyadicSpace space, std::vector<RandomVariable> slices,
                         double tol = kMartingaleTol)
        : space_(space), slices_(std::move(slices)) {
        if (slices_.size() != static_cast<std::size_t>(space.depth())) {
            throw std::invalid_argument("PredictableIntegrand: expected " +
                                        std::to_string(space.depth()) + " slices, got " +
                                        std::to_string(slices_.size()));
        }
        for (std::size_t j = 0; j < slices_.size(); ++j) {
            if (!(slices_[j].space() == space_)) {
                throw std::invalid_argument("PredictableIntegrand: slice " + std::to_string(j) +
                                            " on wrong space");
            }
            if (!is_measurable(slices_[j], static_cast<int>(j), tol)) {
                throw std::invalid_argument("PredictableIntegrand: slice " + std::to_string(j) +
                                            " not measurable at level " + std::to_string(j));
            }
        }
    }

    const DyadicSpace& space() const { return space_; }
    int steps() const { return space_.depth(); }
    const RandomVariable& slice(int j) const { return slices_[static_cast<std::size_t>(j)]; }

private:
    DyadicSpace space_;
    std::vector<RandomVariable> slices_;
};

// Integrand extraction: H_j = sqrt(n) * c_{j+1}, 0 <= j <= n-1.
inline PredictableIntegrand integrand(const DiscreteMartingale& y) {
    const double root_n = std::sqrt(static_cast<double>(y.steps()));
    std::vector<RandomVariable> coeffs = represent(y);
    std::vector<RandomVariable> slices;
    slices.reserve(coeffs.size());
    for (const RandomVariable& c : coeffs) {
        slices.push_back(root_n * c);
    }
    return PredictableIntegrand(y.space(), std::move(slices));
}

// Pathwise sum of squared increments over j = 0..n-2 by default; the
// full-range variant (j <= n-1) supports the energy identity.
inline RandomVariable quadratic_variation(const AdaptedProcess& y, bool full_range = false) {
    const int last = full_range ? y.steps() - 1 : y.steps() - 2;
    std::vector<double> out(y.space().size(), 0.0);
    for (int j = 0; j <= last; ++j) {
        const RandomVariable& lo = y.slice(j);
        const RandomVariable& hi = y.slice(j + 1);
        for (std::size_t m = 0; m < out.size(); ++m) {
            const double d = hi[m] - lo[m];
            out[m] += d * d;
        }
    }
    return RandomVariable(y.space(), std::move(out));
}

// Both sides of the squared-increment product identity over exact enumeration.
inline std::pair<double, double> increment_product_check(const DiscreteMartingale& y,
                                                         int a, int b, int c, int d) {
    if (!(0 <= a && a < b && b <= c && c < d && d <= y.steps())) {
        throw std::domain_error("increment_product_check: need 0 <= a < b <= c < d <= n");
    }
    const RandomVariable early = y.slice(b) - y.slice(a);
    const RandomVariable late = y.slice(d) - y.slice(c);
    const RandomVariable early_sq = early * early;
    const RandomVariable late_sq = late * late;
    return {expectation(late_sq * early_sq), expectation(late_sq) * expectation(early_sq)};
}

struct IncrementPair {
    int a, b, c, d;
};

struct IndependenceReport {
    double max_discrepancy = 0.0;  // total-variation distance, joint vs product
    std::size_t pairs_checked = 0;
    bool pass(double tol = 0.0) const { return max_discrepancy <= tol; }
};

namespace detail {

// Distinct doubles that differ only by rounding noise (last few ulps of an
// O(1) value) represent one increment level; merge them so histograms bin by
// value, not by bit pattern.
inline std::vector<double> cluster_levels(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double> reps;
    for (double v : values) {
        if (reps.empty() || v - reps.back() > tol * std::max(1.0, std::fabs(v))) {
            reps.push_back(v);
        }
    }
    return reps;
}

inline double snap(const std::vector<double>& reps, double v) {
    const auto it = std::lower_bound(reps.begin(), reps.end(), v);
    if (it == reps.end()) return reps.back();
    if (it != reps.begin() && v - *(it - 1) < *it - v) return *(it - 1);
    return *it;
}

}  // namespace detail

// Full distributional independence of disjoint increments: compare the joint
// empirical distribution over atoms with the product of marginals. Counts are
// dyadic fractions of a power-of-two sample size, so for genuinely independent
// increments both sides agree exactly and the distance is 0.0.
inline IndependenceReport independent_increments_check(const DiscreteMartingale& y,
                                                       const std::vector<IncrementPair>& pairs,
                                                       double level_tol = 1e-9) {
    IndependenceReport report;
    const double total = static_cast<double>(y.space().size());
    for (const IncrementPair& p : pairs) {
        if (!(0 <= p.a && p.a < p.b && p.b <= p.c && p.c < p.d && p.d <= y.steps())) {
            throw std::domain_error("independent_increments_check: bad index ordering");
        }
        const RandomVariable u = y.slice(p.b) - y.slice(p.a);
        const RandomVariable v = y.slice(p.d) - y.slice(p.c);
        const std::vector<double> ulev =
            detail::cluster_levels({u.values().begin(), u.values().end()}, level_tol);
        const std::vector<double> vlev =
            detail::cluster_levels({v.values().begin(), v.values().end()}, level_tol);
        std::map<std::pair<double, double>, std::size_t> joint;
        std::map<double, std::size_t> mu, mv;
        for (std::size_t m = 0; m < y.space().size(); ++m) {
            const double us = detail::snap(ulev, u[m]);
            const double vs = detail::snap(vlev, v[m]);
            ++joint[{us, vs}];
            ++mu[us];
            ++mv[vs];
        }
        double tv = 0.0;
        for (const auto& [uval, ucount] : mu) {
            for (const auto& [vval, vcount] : mv) {
                const auto it = joint.find({uval, vval});
                const double pj = it == joint.end()
                                      ? 0.0
                                      : static_cast<double>(it->second) / total;
                const double pp = (static_cast<double>(ucount) / total) *
                                  (static_cast<double>(vcount) / total);
                tv += std::fabs(pj - pp);
            }
        }
        tv *= 0.5;
        if (tv > report.max_discrepancy) report.max_discrepancy = tv;
        ++report.pairs_checked;
    }
    return report;
}

}  // namespace dymart

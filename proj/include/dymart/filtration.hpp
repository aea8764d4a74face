#pragma once

// Dyadic filtration levels and conditional expectation.
//
// Level l partitions the atoms into 2^l contiguous cells of length 2^(n-l);
// conditional expectation at level l is the per-cell average. The spectral
// picture: a function is level-l measurable iff its Walsh coefficients vanish
// on every mask containing a coin index > l, i.e. on masks >= 2^l.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "dymart/space.hpp"

namespace dymart {

class FiltrationLevel {
public:
    FiltrationLevel(DyadicSpace space, int level) : space_(space), level_(level) {
        if (level < 0 || level > space.depth()) {
            throw std::domain_error("FiltrationLevel: level " + std::to_string(level) +
                                    " out of range [0, " + std::to_string(space.depth()) + "]");
        }
    }

    const DyadicSpace& space() const { return space_; }
    int level() const { return level_; }
    std::size_t cell_count() const { return std::size_t{1} << level_; }
    std::size_t cell_size() const { return std::size_t{1} << (space_.depth() - level_); }

private:
    DyadicSpace space_;
    int level_;
};

inline RandomVariable cond_expectation(const RandomVariable& f, const FiltrationLevel& lvl) {
    if (!(f.space() == lvl.space())) {
        throw std::domain_error("cond_expectation: space mismatch");
    }
    const std::size_t cell = lvl.cell_size();
    std::vector<double> out(f.size());
    const auto vals = f.values();
    for (std::size_t start = 0; start < f.size(); start += cell) {
        const double mean = pairwise_sum(vals.subspan(start, cell)) / static_cast<double>(cell);
        for (std::size_t m = start; m < start + cell; ++m) out[m] = mean;
    }
    return RandomVariable(f.space(), std::move(out));
}

inline RandomVariable cond_expectation(const RandomVariable& f, int level) {
    return cond_expectation(f, FiltrationLevel(f.space(), level));
}

// Constant on every level-l cell, up to tol.
inline bool is_measurable(const RandomVariable& f, int level, double tol = 1e-10) {
    const FiltrationLevel lvl(f.space(), level);
    const std::size_t cell = lvl.cell_size();
    for (std::size_t start = 0; start < f.size(); start += cell) {
        const double ref = f[start];
        for (std::size_t m = start + 1; m < start + cell; ++m) {
            const double d = f[m] - ref;
            if (d > tol || d < -tol) return false;
        }
    }
    return true;
}

// The 2^l masks whose maximum coin index is <= l: exactly {0, ..., 2^l - 1}.
inline std::vector<WalshMask> filtration_basis(const FiltrationLevel& lvl) {
    std::vector<WalshMask> basis;
    basis.reserve(lvl.cell_count());
    for (std::uint64_t bits = 0; bits < lvl.cell_count(); ++bits) {
        basis.emplace_back(bits);
    }
    return basis;
}

inline std::vector<WalshMask> filtration_basis(DyadicSpace space, int level) {
    return filtration_basis(FiltrationLevel(space, level));
}

// Conditional expectation via the spectrum: zero every coefficient on a mask
// with a coin index > l, then synthesize. Cross-check for cond_expectation.
inline RandomVariable spectral_truncate(const RandomVariable& f, int level) {
    const FiltrationLevel lvl(f.space(), level);
    WalshSpectrum s = wht_forward(f);
    std::vector<double> coeffs(s.coeffs().begin(), s.coeffs().end());
    for (std::size_t mask = lvl.cell_count(); mask < coeffs.size(); ++mask) {
        coeffs[mask] = 0.0;
    }
    return wht_inverse(WalshSpectrum(f.space(), std::move(coeffs)));
}

}  // namespace dymart

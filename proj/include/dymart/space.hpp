#pragma once

// Walsh/Rademacher analysis on the dyadic sample space.
//
// The sample space at depth n is Omega = {0, ..., 2^n - 1} with the uniform
// measure 2^-n per atom. Atom m encodes n coin flips: coin j (1-based) reads
// the j-th MOST significant of the n index bits, mapped to a sign by
// 0 -> -1, 1 -> +1. With this ordering the level-l filtration cells are
// contiguous index blocks of length 2^(n-l).

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dymart {

inline constexpr int kDefaultDepthCap = 24;

// Raised when a request exceeds the configured depth/size budget.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Depth cap; DYMART_DEPTH_CAP in the environment overrides the default.
inline int depth_cap() {
    if (const char* s = std::getenv("DYMART_DEPTH_CAP")) {
        const int cap = std::atoi(s);
        if (cap >= 1) return cap;
    }
    return kDefaultDepthCap;
}

class DyadicSpace {
public:
    explicit DyadicSpace(int depth, int cap = depth_cap()) : depth_(depth) {
        if (depth < 1) {
            throw std::domain_error("DyadicSpace: depth must be >= 1, got " +
                                    std::to_string(depth));
        }
        if (depth > cap) {
            throw capacity_error("DyadicSpace: depth " + std::to_string(depth) +
                                 " exceeds cap " + std::to_string(cap));
        }
    }

    int depth() const { return depth_; }
    std::size_t size() const { return std::size_t{1} << depth_; }

    // Sign of coin j (1 <= j <= depth) on the given atom.
    int sign(std::size_t atom, int coin) const {
        return ((atom >> (depth_ - coin)) & 1u) ? +1 : -1;
    }

    friend bool operator==(const DyadicSpace&, const DyadicSpace&) = default;

private:
    int depth_;
};

// Deterministic tree summation. Exact for sums of equal-magnitude dyadic
// values, O(log N) error growth otherwise.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    const std::size_t half = a.size() / 2;
    return pairwise_dot(a.first(half), b.first(half)) +
           pairwise_dot(a.subspan(half), b.subspan(half));
}

// A real-valued function on the atoms of a DyadicSpace. Immutable after
// construction; every entry must be finite.
class RandomVariable {
public:
    RandomVariable(DyadicSpace space, std::vector<double> values)
        : space_(space), values_(std::move(values)) {
        if (values_.size() != space_.size()) {
            throw std::invalid_argument(
                "RandomVariable: expected " + std::to_string(space_.size()) +
                " values, got " + std::to_string(values_.size()));
        }
        for (double x : values_) {
            if (!std::isfinite(x)) {
                throw std::invalid_argument("RandomVariable: non-finite value");
            }
        }
    }

    static RandomVariable constant(DyadicSpace space, double c) {
        return RandomVariable(space, std::vector<double>(space.size(), c));
    }

    const DyadicSpace& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t atom) const { return values_[atom]; }
    std::span<const double> values() const { return values_; }

private:
    DyadicSpace space_;
    std::vector<double> values_;
};

namespace detail {
inline void require_same_space(const RandomVariable& f, const RandomVariable& g,
                               const char* where) {
    if (!(f.space() == g.space())) {
        throw std::domain_error(std::string(where) + ": space mismatch");
    }
}
}  // namespace detail

inline RandomVariable operator+(const RandomVariable& f, const RandomVariable& g) {
    detail::require_same_space(f, g, "operator+");
    std::vector<double> v(f.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = f[m] + g[m];
    return RandomVariable(f.space(), std::move(v));
}

inline RandomVariable operator-(const RandomVariable& f, const RandomVariable& g) {
    detail::require_same_space(f, g, "operator-");
    std::vector<double> v(f.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = f[m] - g[m];
    return RandomVariable(f.space(), std::move(v));
}

inline RandomVariable operator*(const RandomVariable& f, const RandomVariable& g) {
    detail::require_same_space(f, g, "operator*");
    std::vector<double> v(f.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = f[m] * g[m];
    return RandomVariable(f.space(), std::move(v));
}

inline RandomVariable operator*(double a, const RandomVariable& f) {
    std::vector<double> v(f.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = a * f[m];
    return RandomVariable(f.space(), std::move(v));
}

// The sign coding of an atom: signs[j-1] is the sign of coin j.
struct SignPath {
    int depth;
    std::vector<int> signs;
};

inline SignPath binary_signs(std::size_t atom, int depth) {
    const DyadicSpace space(depth);
    if (atom >= space.size()) {
        throw std::domain_error("binary_signs: atom " + std::to_string(atom) +
                                " out of range [0, " + std::to_string(space.size()) + ")");
    }
    SignPath path{depth, std::vector<int>(static_cast<std::size_t>(depth))};
    for (int j = 1; j <= depth; ++j) {
        path.signs[static_cast<std::size_t>(j - 1)] = space.sign(atom, j);
    }
    return path;
}

// A subset of the coins {1, ..., n}: coin j participates iff bit (j-1) of
// `bits` is set. The empty mask is the constant function 1.
class WalshMask {
public:
    constexpr WalshMask() : bits_(0) {}
    constexpr explicit WalshMask(std::uint64_t bits) : bits_(bits) {}

    static WalshMask from_coins(std::initializer_list<int> coins) {
        std::uint64_t bits = 0;
        for (int j : coins) bits |= std::uint64_t{1} << (j - 1);
        return WalshMask(bits);
    }

    std::uint64_t bits() const { return bits_; }
    bool empty() const { return bits_ == 0; }
    bool contains(int coin) const { return (bits_ >> (coin - 1)) & 1u; }
    int popcount() const { return std::popcount(bits_); }
    // Largest participating coin index; 0 for the empty mask.
    int max_coin() const { return std::bit_width(bits_); }

    friend bool operator==(const WalshMask&, const WalshMask&) = default;

private:
    std::uint64_t bits_;
};

// Symmetric difference; the pointwise product law walsh(s)*walsh(t) = walsh(s^t).
inline WalshMask operator^(WalshMask a, WalshMask b) {
    return WalshMask(a.bits() ^ b.bits());
}

namespace detail {
inline void require_valid_mask(const DyadicSpace& space, WalshMask mask, const char* where) {
    if (mask.bits() >= space.size()) {
        throw std::domain_error(std::string(where) + ": mask exceeds depth " +
                                std::to_string(space.depth()));
    }
}

// Mask bits rearranged to the atom-index bit layout (coin j at bit n-j).
inline std::uint64_t mask_to_atom_bits(const DyadicSpace& space, WalshMask mask) {
    std::uint64_t out = 0;
    for (int j = 1; j <= space.depth(); ++j) {
        if (mask.contains(j)) out |= std::uint64_t{1} << (space.depth() - j);
    }
    return out;
}
}  // namespace detail

// The Rademacher function reading coin j.
inline RandomVariable rademacher(DyadicSpace space, int coin) {
    if (coin < 1 || coin > space.depth()) {
        throw std::domain_error("rademacher: coin " + std::to_string(coin) +
                                " out of range [1, " + std::to_string(space.depth()) + "]");
    }
    std::vector<double> v(space.size());
    for (std::size_t m = 0; m < v.size(); ++m) {
        v[m] = static_cast<double>(space.sign(m, coin));
    }
    return RandomVariable(space, std::move(v));
}

// Product of Rademacher functions over the coins in the mask.
inline RandomVariable walsh(DyadicSpace space, WalshMask mask) {
    detail::require_valid_mask(space, mask, "walsh");
    const std::uint64_t atom_bits = detail::mask_to_atom_bits(space, mask);
    const int parity_fix = mask.popcount() & 1;
    std::vector<double> v(space.size());
    for (std::size_t m = 0; m < v.size(); ++m) {
        // Each coin contributes (-1)^(bit+1); fold the mask-size parity in once.
        const int p = (std::popcount(m & atom_bits) + parity_fix) & 1;
        v[m] = p ? -1.0 : 1.0;
    }
    return RandomVariable(space, std::move(v));
}

inline double expectation(const RandomVariable& f) {
    return pairwise_sum(f.values()) / static_cast<double>(f.size());
}

inline double inner_product(const RandomVariable& f, const RandomVariable& g) {
    detail::require_same_space(f, g, "inner_product");
    return pairwise_dot(f.values(), g.values()) / static_cast<double>(f.size());
}

// Walsh coefficients of a RandomVariable, indexed by WalshMask bits.
class WalshSpectrum {
public:
    WalshSpectrum(DyadicSpace space, std::vector<double> coeffs)
        : space_(space), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != space_.size()) {
            throw std::invalid_argument("WalshSpectrum: wrong coefficient count");
        }
    }

    const DyadicSpace& space() const { return space_; }
    std::size_t size() const { return coeffs_.size(); }
    double operator[](WalshMask mask) const { return coeffs_[mask.bits()]; }
    double at_index(std::size_t i) const { return coeffs_[i]; }
    std::span<const double> coeffs() const { return coeffs_; }

private:
    DyadicSpace space_;
    std::vector<double> coeffs_;
};

namespace detail {
// In-place unnormalized Walsh-Hadamard butterfly:
// out[k] = sum_m in[m] * (-1)^popcount(k & m).
inline void fwht_butterfly(std::vector<double>& v) {
    const std::size_t n = v.size();
    for (std::size_t h = 1; h < n; h *= 2) {
        for (std::size_t i = 0; i < n; i += h * 2) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = v[j];
                const double y = v[j + h];
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
    }
}

inline std::uint64_t bit_reverse(std::uint64_t x, int width) {
    std::uint64_t out = 0;
    for (int i = 0; i < width; ++i) {
        out = (out << 1) | ((x >> i) & 1u);
    }
    return out;
}
}  // namespace detail

// Analysis: coeffs[mask] = inner_product(f, walsh(mask)). The butterfly
// computes the kernel (-1)^popcount(k & m); the bit reversal moves from the
// atom bit layout to the coin-set mask layout, and the parity factor accounts
// for the 0 -> -1 sign coding.
inline WalshSpectrum wht_forward(const RandomVariable& f) {
    std::vector<double> work(f.values().begin(), f.values().end());
    detail::fwht_butterfly(work);
    const int depth = f.space().depth();
    const double scale = 1.0 / static_cast<double>(f.size());
    std::vector<double> coeffs(f.size());
    for (std::size_t mask = 0; mask < coeffs.size(); ++mask) {
        const double sign = (std::popcount(mask) & 1) ? -1.0 : 1.0;
        coeffs[mask] = sign * scale * work[detail::bit_reverse(mask, depth)];
    }
    return WalshSpectrum(f.space(), std::move(coeffs));
}

// Synthesis: f(m) = sum_mask coeffs[mask] * walsh(mask)(m).
inline RandomVariable wht_inverse(const WalshSpectrum& s) {
    const int depth = s.space().depth();
    std::vector<double> work(s.size());
    for (std::size_t k = 0; k < work.size(); ++k) {
        const double sign = (std::popcount(k) & 1) ? -1.0 : 1.0;
        work[k] = sign * s.at_index(detail::bit_reverse(k, depth));
    }
    detail::fwht_butterfly(work);
    return RandomVariable(s.space(), std::move(work));
}

// Both sides of the *-independence display for the coins in `coins` with
// thresholds `alphas`, computed by exact enumeration.
inline std::pair<double, double> check_star_independence(
    DyadicSpace space, const std::vector<int>& coins, const std::vector<double>& alphas) {
    if (coins.empty()) {
        throw std::domain_error("check_star_independence: empty coin set");
    }
    if (coins.size() != alphas.size()) {
        throw std::invalid_argument("check_star_independence: size mismatch");
    }
    for (int j : coins) {
        if (j < 1 || j > space.depth()) {
            throw std::domain_error("check_star_independence: coin out of range");
        }
    }
    const double total = static_cast<double>(space.size());
    std::size_t joint = 0;
    for (std::size_t m = 0; m < space.size(); ++m) {
        bool all = true;
        for (std::size_t k = 0; k < coins.size(); ++k) {
            if (!(space.sign(m, coins[k]) < alphas[k])) {
                all = false;
                break;
            }
        }
        if (all) ++joint;
    }
    double product = 1.0;
    for (std::size_t k = 0; k < coins.size(); ++k) {
        std::size_t count = 0;
        for (std::size_t m = 0; m < space.size(); ++m) {
            if (space.sign(m, coins[k]) < alphas[k]) ++count;
        }
        product *= static_cast<double>(count) / total;
    }
    return {static_cast<double>(joint) / total, product};
}

}  // namespace dymart

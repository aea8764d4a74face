#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dymart/rng.hpp"
#include "dymart/space.hpp"

using namespace dymart;

namespace {

// Oracle: Walsh function built straight from the binary expansion, no parity
// tricks shared with the implementation.
RandomVariable naive_walsh(DyadicSpace space, WalshMask mask) {
    std::vector<double> v(space.size(), 1.0);
    for (std::size_t m = 0; m < v.size(); ++m) {
        const SignPath path = binary_signs(m, space.depth());
        for (int j = 1; j <= space.depth(); ++j) {
            if (mask.contains(j)) v[m] *= path.signs[static_cast<std::size_t>(j - 1)];
        }
    }
    return RandomVariable(space, std::move(v));
}

// Oracle: O(N^2) transform by separate inner products.
std::vector<double> naive_transform(const RandomVariable& f) {
    std::vector<double> coeffs(f.size());
    for (std::size_t mask = 0; mask < coeffs.size(); ++mask) {
        coeffs[mask] = inner_product(f, naive_walsh(f.space(), WalshMask(mask)));
    }
    return coeffs;
}

RandomVariable random_function(DyadicSpace space, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> v(space.size());
    for (double& x : v) x = rng.next_symmetric();
    return RandomVariable(space, std::move(v));
}

}  // namespace

TEST_CASE("binary_signs examples") {
    CHECK(binary_signs(0, 2).signs == std::vector<int>{-1, -1});
    CHECK(binary_signs(3, 2).signs == std::vector<int>{+1, +1});
    CHECK(binary_signs(2, 2).signs == std::vector<int>{+1, -1});
    CHECK_THROWS_AS(binary_signs(4, 2), std::domain_error);
}

TEST_CASE("rademacher examples") {
    const DyadicSpace space(2);
    const RandomVariable w1 = rademacher(space, 1);
    const RandomVariable w2 = rademacher(space, 2);
    CHECK(std::vector<double>(w1.values().begin(), w1.values().end()) ==
          std::vector<double>{-1, -1, +1, +1});
    CHECK(std::vector<double>(w2.values().begin(), w2.values().end()) ==
          std::vector<double>{-1, +1, -1, +1});
    CHECK_THROWS_AS(rademacher(space, 0), std::domain_error);
    CHECK_THROWS_AS(rademacher(space, 3), std::domain_error);
    for (int n : {1, 3, 6}) {
        const DyadicSpace s(n);
        for (int j = 1; j <= n; ++j) CHECK(expectation(rademacher(s, j)) == 0.0);
    }
}

TEST_CASE("rademacher matches binary_signs on every atom") {
    const DyadicSpace space(5);
    for (int j = 1; j <= 5; ++j) {
        const RandomVariable w = rademacher(space, j);
        for (std::size_t m = 0; m < space.size(); ++m) {
            CHECK(w[m] == binary_signs(m, 5).signs[static_cast<std::size_t>(j - 1)]);
        }
    }
}

TEST_CASE("walsh examples") {
    const DyadicSpace space(2);
    const RandomVariable one = walsh(space, WalshMask{});
    CHECK(std::vector<double>(one.values().begin(), one.values().end()) ==
          std::vector<double>{1, 1, 1, 1});
    const RandomVariable w12 = walsh(space, WalshMask::from_coins({1, 2}));
    CHECK(std::vector<double>(w12.values().begin(), w12.values().end()) ==
          std::vector<double>{+1, -1, -1, +1});
    for (int j = 1; j <= 2; ++j) {
        const RandomVariable single = walsh(space, WalshMask::from_coins({j}));
        const RandomVariable rad = rademacher(space, j);
        for (std::size_t m = 0; m < space.size(); ++m) CHECK(single[m] == rad[m]);
    }
    CHECK_THROWS_AS(walsh(space, WalshMask(4)), std::domain_error);
}

TEST_CASE("walsh matches the binary-expansion oracle") {
    const DyadicSpace space(6);
    for (std::size_t mask = 0; mask < space.size(); ++mask) {
        const RandomVariable fast = walsh(space, WalshMask(mask));
        const RandomVariable slow = naive_walsh(space, WalshMask(mask));
        for (std::size_t m = 0; m < space.size(); ++m) CHECK(fast[m] == slow[m]);
    }
}

TEST_CASE("expectation and variance of Walsh functions") {
    const DyadicSpace space(5);
    CHECK(expectation(RandomVariable::constant(space, 3.25)) == 3.25);
    for (std::size_t mask = 1; mask < space.size(); ++mask) {
        const RandomVariable w = walsh(space, WalshMask(mask));
        CHECK(expectation(w) == 0.0);
        CHECK(expectation(w * w) == 1.0);
    }
}

TEST_CASE("inner_product orthonormality and Parseval") {
    const DyadicSpace space(4);
    for (std::size_t s = 0; s < space.size(); ++s) {
        for (std::size_t t = 0; t < space.size(); ++t) {
            const double ip = inner_product(walsh(space, WalshMask(s)), walsh(space, WalshMask(t)));
            CHECK(ip == (s == t ? 1.0 : 0.0));
        }
    }
    const RandomVariable f = random_function(space, 11);
    CHECK(inner_product(f, RandomVariable::constant(space, 1.0)) ==
          Catch::Approx(expectation(f)).margin(1e-15));

    // Parseval against the naive double-loop spectrum at n = 8.
    const DyadicSpace big(8);
    const RandomVariable g = random_function(big, 12);
    const std::vector<double> coeffs = naive_transform(g);
    double sum_sq = 0.0;
    for (double c : coeffs) sum_sq += c * c;
    CHECK(inner_product(g, g) == Catch::Approx(sum_sq).margin(1e-10));

    const DyadicSpace other(3);
    CHECK_THROWS_AS(inner_product(f, RandomVariable::constant(other, 0.0)), std::domain_error);
}

TEST_CASE("walsh product law: walsh(s) * walsh(t) = walsh(s ^ t)") {
    const DyadicSpace space(6);
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const WalshMask s(rng.next_below(space.size()));
        const WalshMask t(rng.next_below(space.size()));
        const RandomVariable prod = walsh(space, s) * walsh(space, t);
        const RandomVariable direct = walsh(space, s ^ t);
        for (std::size_t m = 0; m < space.size(); ++m) CHECK(prod[m] == direct[m]);
    }
}

TEST_CASE("wht_forward examples and oracle agreement") {
    const DyadicSpace space(4);
    const WalshSpectrum flat = wht_forward(RandomVariable::constant(space, 2.5));
    CHECK(flat[WalshMask{}] == 2.5);
    for (std::size_t mask = 1; mask < space.size(); ++mask) {
        CHECK(flat[WalshMask(mask)] == 0.0);
    }
    for (std::size_t mask = 0; mask < space.size(); ++mask) {
        const WalshSpectrum s = wht_forward(walsh(space, WalshMask(mask)));
        for (std::size_t k = 0; k < space.size(); ++k) {
            CHECK(s.at_index(k) == (k == mask ? 1.0 : 0.0));
        }
    }
    const DyadicSpace big(8);
    const RandomVariable f = random_function(big, 21);
    const WalshSpectrum fast = wht_forward(f);
    const std::vector<double> slow = naive_transform(f);
    for (std::size_t k = 0; k < big.size(); ++k) {
        CHECK(fast.at_index(k) == Catch::Approx(slow[k]).margin(1e-12));
    }
}

TEST_CASE("wht_inverse examples and roundtrip") {
    const DyadicSpace space(4);
    const RandomVariable zero = wht_inverse(WalshSpectrum(space, std::vector<double>(space.size(), 0.0)));
    for (std::size_t m = 0; m < space.size(); ++m) CHECK(zero[m] == 0.0);
    for (std::size_t mask = 0; mask < space.size(); ++mask) {
        std::vector<double> coeffs(space.size(), 0.0);
        coeffs[mask] = 1.0;
        const RandomVariable synth = wht_inverse(WalshSpectrum(space, std::move(coeffs)));
        const RandomVariable direct = walsh(space, WalshMask(mask));
        for (std::size_t m = 0; m < space.size(); ++m) CHECK(synth[m] == direct[m]);
    }
    for (int n : {1, 4, 10, 16}) {
        const DyadicSpace s(n);
        const RandomVariable f = random_function(s, 1000 + static_cast<std::uint64_t>(n));
        const RandomVariable back = wht_inverse(wht_forward(f));
        double worst = 0.0;
        for (std::size_t m = 0; m < s.size(); ++m) {
            worst = std::max(worst, std::fabs(back[m] - f[m]));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("Parseval at larger depths") {
    for (int n : {8, 12, 16}) {
        const DyadicSpace space(n);
        const RandomVariable f = random_function(space, 7 + static_cast<std::uint64_t>(n));
        const WalshSpectrum s = wht_forward(f);
        double sum_sq = 0.0;
        for (std::size_t k = 0; k < space.size(); ++k) sum_sq += s.at_index(k) * s.at_index(k);
        CHECK(sum_sq == Catch::Approx(expectation(f * f)).margin(1e-10));
    }
}

TEST_CASE("star independence examples") {
    {
        const auto [lhs, rhs] = check_star_independence(DyadicSpace(2), {1, 2}, {0.0, 0.0});
        CHECK(lhs == 0.25);
        CHECK(rhs == 0.25);
    }
    {
        const auto [lhs, rhs] = check_star_independence(DyadicSpace(3), {1, 3}, {-1.0, 0.5});
        CHECK(lhs == 0.0);
        CHECK(rhs == 0.0);
    }
    {
        const auto [lhs, rhs] = check_star_independence(DyadicSpace(3), {1}, {2.0});
        CHECK(lhs == 1.0);
        CHECK(rhs == 1.0);
    }
    CHECK_THROWS_AS(check_star_independence(DyadicSpace(3), {}, {}), std::domain_error);
}

TEST_CASE("star independence holds for random instances") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(9));  // 2..10
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
            alphas.push_back(2.0 * rng.next_symmetric());  // [-2, 2)
        }
        const auto [lhs, rhs] = check_star_independence(space, coins, alphas);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("capacity and validation errors") {
    CHECK_THROWS_AS(DyadicSpace(0), std::domain_error);
    CHECK_THROWS_AS(DyadicSpace(25, 24), capacity_error);
    CHECK_NOTHROW(DyadicSpace(10, 24));
    CHECK_THROWS_AS(RandomVariable(DyadicSpace(2), {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(RandomVariable(DyadicSpace(1), {1.0, std::nan("")}), std::invalid_argument);
}

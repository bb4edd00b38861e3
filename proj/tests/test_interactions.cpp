#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "moralecon/errors.hpp"
#include "moralecon/interactions.hpp"
#include "moralecon/rng.hpp"

using namespace moralecon;

TEST_CASE("rng stream follows the standard engine") {
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    Rng rng(5489u);
    for (int i = 0; i < 9999; ++i) {
        rng.next_u64();
    }
    CHECK(rng.next_u64() == 9981545732273789042ULL);

    std::mt19937_64 ref(42);
    Rng mine(42);
    for (int i = 0; i < 100; ++i) {
        const double expected = static_cast<double>(ref() >> 11) / 9007199254740992.0;
        CHECK(mine.uniform01() == expected);
    }
}

TEST_CASE("rng bounded integers stay in range and cover it") {
    Rng rng(7);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 100000; ++i) {
        const auto v = rng.uniform_index(10);
        REQUIRE(v < 10);
        ++counts[v];
    }
    for (int c : counts) {
        CHECK(std::abs(c - 10000) < 500);
    }
    CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("ramp") {
    CHECK(ramp(3.5) == 3.5);
    CHECK(ramp(-2.0) == 0.0);
    CHECK(ramp(0.0) == 0.0);
}

TEST_CASE("joint business") {
    auto [a, b] = joint_business(2.0, 3.0, 0.25, 0.0);
    CHECK(a == 2.0);
    CHECK(b == 3.0);

    std::tie(a, b) = joint_business(2.0, 3.0, 0.25, 0.1);
    CHECK(a == doctest::Approx(2.15).epsilon(1e-15));
    CHECK(b == doctest::Approx(3.225).epsilon(1e-15));

    std::tie(a, b) = joint_business(1.0, 1.0, 1.0, 0.7);
    CHECK(a == 1.0);
    CHECK(b == 1.0);

    SUBCASE("sign, positivity and ratio") {
        Rng rng(11);
        for (int trial = 0; trial < 1000; ++trial) {
            const double ki = rng.uniform(0.01, 100.0);
            const double kj = rng.uniform(0.01, 100.0);
            const double lambda = rng.uniform(0.0, 0.99);
            const double eps = rng.uniform(-0.99, 0.99);
            const auto [ni, nj] = joint_business(ki, kj, lambda, eps);
            CHECK(ni > 0.0);
            CHECK(nj > 0.0);
            if (eps > 0.0) {
                CHECK(ni > ki);
                CHECK(nj > kj);
            } else if (eps < 0.0) {
                CHECK(ni < ki);
                CHECK(nj < kj);
            }
            CHECK(ni / nj == doctest::Approx(ki / kj).epsilon(1e-14));
        }
    }
}

TEST_CASE("pair selection") {
    Rng rng(3);
    SUBCASE("four agents, two pairs") {
        const auto pairs = select_pairs(rng, 4, 2);
        REQUIRE(pairs.size() == 2);
        std::set<std::size_t> seen{pairs[0].first, pairs[0].second, pairs[1].first, pairs[1].second};
        CHECK(seen == std::set<std::size_t>{0, 1, 2, 3});
    }
    SUBCASE("baseline size gives 34 distinct agents") {
        const auto pairs = select_pairs(rng, 1000, 17);
        std::set<std::size_t> seen;
        for (const AgentPair& p : pairs) {
            CHECK(p.first != p.second);
            seen.insert(p.first);
            seen.insert(p.second);
        }
        CHECK(seen.size() == 34);
        CHECK(*seen.rbegin() < 1000);
    }
    SUBCASE("two agents") {
        const auto pairs = select_pairs(rng, 2, 1);
        REQUIRE(pairs.size() == 1);
        CHECK(std::min(pairs[0].first, pairs[0].second) == 0);
        CHECK(std::max(pairs[0].first, pairs[0].second) == 1);
    }
    SUBCASE("too many pairs") {
        CHECK_THROWS_AS(select_pairs(rng, 5, 3), ValidationError);
    }
    SUBCASE("never self-pairs or repeats") {
        for (int trial = 0; trial < 500; ++trial) {
            const std::size_t n = 2 + rng.uniform_index(60);
            const std::size_t m = rng.uniform_index(n / 2 + 1);
            const auto pairs = select_pairs(rng, n, m);
            std::set<std::size_t> seen;
            for (const AgentPair& p : pairs) {
                CHECK(p.first != p.second);
                seen.insert(p.first);
                seen.insert(p.second);
            }
            CHECK(seen.size() == 2 * m);
        }
    }
    SUBCASE("same seed, same pairs") {
        Rng a(99);
        Rng b(99);
        CHECK(select_pairs(a, 1000, 17) == select_pairs(b, 1000, 17));
    }
}

TEST_CASE("profit rate draws") {
    Rng rng(5);
    CHECK(draw_profit_rate(rng, 0.0) == 0.0);

    double sum = 0.0;
    double lo = 1.0;
    double hi = -1.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        const double e = draw_profit_rate(rng, 0.1);
        sum += e;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    CHECK(std::fabs(sum / draws) < 0.001);
    CHECK(lo >= -0.1);
    CHECK(hi <= 0.1);

    Rng a(123);
    Rng b(123);
    for (int i = 0; i < 1000; ++i) {
        CHECK(draw_profit_rate(a, 0.1) == draw_profit_rate(b, 0.1));
    }
}

TEST_CASE("redistribution examples") {
    const std::vector<double> two{3.0, 1.0};
    auto out = redistribute(two, 2.0);
    CHECK(out[0] == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(1.75).epsilon(1e-15));

    const std::vector<double> flat{1.0, 1.0, 1.0};
    CHECK(redistribute(flat, 5.0) == flat);

    // pot 8.5 shared by 1/k weights 0.1, 1, 1/1.1
    const std::vector<double> three{10.0, 1.0, 1.1};
    out = redistribute(three, 1.5);
    const double inv = 0.1 + 1.0 + 1.0 / 1.1;
    CHECK(out[0] == doctest::Approx(1.5 + 0.1 / inv * 8.5).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(1.0 + 1.0 / inv * 8.5).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(1.1 + (1.0 / 1.1) / inv * 8.5).epsilon(1e-14));
    CHECK(std::fabs(out[0] - 1.923) < 1e-3);
    CHECK(std::fabs(out[1] - 5.230) < 1e-3);
    CHECK(std::fabs(out[2] - 4.946) < 1e-3);
    CHECK(out[0] + out[1] + out[2] == doctest::Approx(12.1).epsilon(1e-14));
}

TEST_CASE("redistribution rejects unusable capital") {
    std::vector<double> tiny{1.0, 1e-13};
    CHECK_THROWS_AS(redistribute(tiny, 0.5), DomainError);
    std::vector<double> nan{1.0, std::nan("")};
    CHECK_THROWS_AS(redistribute(nan, 0.5), DomainError);
    std::vector<double> ok{1.0, 2.0};
    CHECK_THROWS_AS(redistribute(ok, 0.0), DomainError);
}

TEST_CASE("redistribution properties on random populations") {
    Rng rng(2025);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(200);
        std::vector<double> k(n);
        for (double& v : k) {
            v = rng.uniform(0.01, 100.0);
        }
        const double k_max = *std::max_element(k.begin(), k.end());
        const double k_th = rng.uniform(0.01, 1.2 * k_max);
        const std::vector<double> out = redistribute(k, k_th);

        const double before = std::accumulate(k.begin(), k.end(), 0.0);
        const double after = std::accumulate(out.begin(), out.end(), 0.0);
        CHECK(std::fabs(after - before) <= 1e-9 * before);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(out[i] > 0.0);
            if (k[i] <= k_th) {
                CHECK(out[i] >= k[i]);
            }
        }
        if (k_th >= k_max) {
            CHECK(out == k);
        }
        CHECK(redistribute(k, k_max) == k);
    }
}

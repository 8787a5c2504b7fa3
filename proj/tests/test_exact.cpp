#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "cwpotts/error.hpp"
#include "cwpotts/exact.hpp"

using namespace cwpotts;

namespace {

// log Z by summing over all q^N configurations
double brute_log_partition(const ModelSpec& spec, int N)
{
    const int q = spec.q;
    std::vector<int> cfg(static_cast<std::size_t>(N), 0);
    std::vector<double> terms;
    while (true) {
        std::vector<double> c(static_cast<std::size_t>(q), 0.0);
        for (int x : cfg)
            c[static_cast<std::size_t>(x)] += 1.0;
        double e = spec.h * c[0];
        for (double v : c)
            e += N * spec.beta * std::pow(v / N, spec.p);
        terms.push_back(e);
        int i = 0;
        while (i < N && ++cfg[static_cast<std::size_t>(i)] == q)
            cfg[static_cast<std::size_t>(i++)] = 0;
        if (i == N)
            break;
    }
    double mx = -1e300;
    for (double t : terms)
        mx = std::max(mx, t);
    double acc = 0.0;
    for (double t : terms)
        acc += std::exp(t - mx);
    return mx + std::log(acc);
}

}  // namespace

TEST_CASE("composition count")
{
    CHECK(composition_count(10, 3) == 66u);
    CHECK(composition_count(1000, 3) == 501501u);
    CHECK(compositions(4, 3).size() == 15u);
    CHECK_THROWS_AS(check_enumeration(100000, 6), Error);
}

TEST_CASE("log partition matches brute force over configurations")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> beta(0.0, 2.0), h(0.0, 1.0);
    for (int q : {2, 3})
        for (int N : {1, 4, 7}) {
            const ModelSpec spec{3, q, beta(rng), h(rng)};
            const double want = brute_log_partition(spec, N);
            CHECK(std::abs(log_partition(spec, N) - want) <= 1e-12 * std::abs(want));
        }
}

TEST_CASE("independent sites at beta = h = 0")
{
    const ModelSpec spec{4, 3, 0.0, 0.0};
    CHECK(log_partition(spec, 9) == doctest::Approx(9 * std::log(3.0)).epsilon(1e-13));
    CHECK(expect_u1(spec, 9) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    const auto law = magnetization_law(spec, 6);
    const auto m = law.marginal_first();
    // Binomial(6, 1/3)
    for (int k = 0; k <= 6; ++k) {
        const double binom = std::tgamma(7.0) / (std::tgamma(k + 1.0) * std::tgamma(7.0 - k));
        CHECK(m[static_cast<std::size_t>(k)] == doctest::Approx(binom * std::pow(1.0 / 3, k) * std::pow(2.0 / 3, 6 - k)).epsilon(1e-12));
    }
}

TEST_CASE("color symmetry at h = 0")
{
    const ModelSpec spec{4, 3, 1.2, 0.0};
    const auto law = magnetization_law(spec, 30);
    const double e1 = law.expect([](auto c) { return double(c[0]); });
    const double e3 = law.expect([](auto c) { return double(c[2]); });
    CHECK(e1 == doctest::Approx(e3).epsilon(1e-12));
}

TEST_CASE("dump round trip")
{
    const ModelSpec spec{4, 3, 0.7, 0.3};
    const auto law = magnetization_law(spec, 12);
    char path[] = "/tmp/cwpotts_dumpXXXXXX";
    const int fd = mkstemp(path);
    REQUIRE(fd >= 0);
    law.save(path);
    const auto back = ExactLaw::load(path, spec);
    std::remove(path);
    REQUIRE(back.size() == law.size());
    for (std::size_t i = 0; i < law.size(); ++i) {
        CHECK(back.log_prob(i) == law.log_prob(i));
        for (int r = 0; r < 3; ++r)
            CHECK(back.composition(i)[static_cast<std::size_t>(r)] == law.composition(i)[static_cast<std::size_t>(r)]);
    }
    CHECK_THROWS_AS(ExactLaw::load("/nonexistent/dump.bin", spec), Error);
}

TEST_CASE("first-count profile reproduces the full enumeration")
{
    const ModelSpec spec{4, 3, 0.9, 0.0};
    const FirstCountProfile prof(spec, 40);
    for (double h : {0.0, 0.3, 1.7})
        CHECK(prof.u1(h) == doctest::Approx(expect_u1(spec.with_h(h), 40)).epsilon(1e-12));
}

TEST_CASE("moments increase in both parameters")
{
    const int N = 60;
    double prev_u1 = 0.0, prev_up = 0.0;
    for (double b : {0.2, 0.6, 1.0, 1.4}) {
        const auto m = exact_moments({4, 3, b, 0.3}, N);
        CHECK(m.u1 > prev_u1);
        CHECK(m.up > prev_up);
        prev_u1 = m.u1;
        prev_up = m.up;
    }
}

TEST_CASE("tail probability decays with N")
{
    const ModelSpec spec{4, 3, 0.616, 0.67};
    const double a = tail_prob(spec, 50, 0.1), b = tail_prob(spec, 150, 0.1);
    CHECK(a > b);
    CHECK(b > 0.0);
    CHECK(tail_prob(spec, 50, 0.0) == doctest::Approx(1.0));
}

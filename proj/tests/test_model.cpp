#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "cwpotts/error.hpp"
#include "cwpotts/model.hpp"

using namespace cwpotts;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

// f along the ray, evaluated directly from the Hamiltonian in 50-digit arithmetic
Big f_big(const ModelSpec& spec, const Big& s)
{
    const int q = spec.q;
    const Big a = (1 + (q - 1) * s) / q;
    const Big b = (1 - s) / q;
    auto k = [&](const Big& x) { return Big(spec.beta) * pow(x, spec.p) - x * log(x); };
    return (q - 1) * k(b) + k(a) + Big(spec.h) * a;
}

// n-th central difference with step d (exact binomial stencil)
double derivative_big(const ModelSpec& spec, double s, int n)
{
    const Big d("1e-6");
    Big acc = 0;
    Big binom = 1;
    for (int j = 0; j <= n; ++j) {
        const Big x = Big(s) + (Big(n) / 2 - j) * d;
        acc += ((j % 2) ? -1 : 1) * binom * f_big(spec, x);
        binom = binom * (n - j) / (j + 1);
    }
    return static_cast<double>(acc / pow(d, n));
}

}  // namespace

TEST_CASE("f derivatives agree with 50-digit finite differences")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> beta(0.1, 2.5), h(0.0, 1.0), s(0.05, 0.9);
    std::uniform_int_distribution<int> p(2, 7), q(2, 6);
    for (int i = 0; i < 30; ++i) {
        const ModelSpec spec{p(rng), q(rng), beta(rng), h(rng)};
        const double x = s(rng);
        for (int n = 1; n <= 5; ++n) {
            const double want = derivative_big(spec, x, n);
            CHECK(f_deriv(spec, x, n) == doctest::Approx(want).epsilon(1e-8).scale(1.0));
        }
        CHECK(f_deriv(spec, x, 0) == doctest::Approx(static_cast<double>(f_big(spec, Big(x)))).epsilon(1e-13));
    }
}

TEST_CASE("f equals the Hamiltonian on the ray")
{
    const ModelSpec spec{4, 3, 0.9, 0.3};
    for (double s : {0.0, 0.2, 0.7}) {
        const ProbVector x = x_of_s(3, s);
        CHECK(negative_free_energy(spec, x.values()) == doctest::Approx(f_deriv(spec, s, 0)).epsilon(1e-14));
        CHECK(s_of_x(x.values()) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("higher derivatives do not depend on h")
{
    for (int n = 2; n <= 6; ++n)
        CHECK(f_deriv({5, 4, 1.3, 0.0}, 0.4, n) == doctest::Approx(f_deriv({5, 4, 1.3, 0.8}, 0.4, n)).epsilon(1e-14));
}

TEST_CASE("extended ray reaches negative s")
{
    const ModelSpec spec{4, 3, 0.6, 0.0};
    CHECK(std::isfinite(f_deriv_extended(spec, -0.2, 2)));
    CHECK_THROWS_AS(f_deriv(spec, -0.2, 2), Error);
    CHECK(f_deriv_extended(spec, 0.3, 2) == doctest::Approx(f_deriv(spec, 0.3, 2)));
}

TEST_CASE("Sigma at beta = 0 is the multinomial covariance")
{
    for (int q : {2, 3, 5}) {
        for (double h : {0.0, 0.4}) {
            const ModelSpec spec{3, q, 0.0, h};
            // at beta = 0 the maximizer is the softmax of (h, 0, ..., 0)
            std::vector<double> m(static_cast<std::size_t>(q), 1.0);
            m[0] = std::exp(h);
            double z = 0.0;
            for (double v : m)
                z += v;
            for (auto& v : m)
                v /= z;
            const double s = (q * m[0] - 1.0) / (q - 1.0);
            const auto sig = sigma_matrix(spec, s);
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) {
                    const double want = (i == j ? m[static_cast<std::size_t>(i)] : 0.0) - m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)];
                    CHECK(sig[static_cast<std::size_t>(i * q + j)] == doctest::Approx(want).epsilon(1e-12).scale(1.0));
                }
        }
    }
}

TEST_CASE("quadratic form rejects vectors off the zero-sum plane")
{
    const ModelSpec spec{4, 3, 0.6, 0.2};
    std::vector<double> t{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(quadratic_form(spec, 0.3, t), Error);
    std::vector<double> u = u_direction(3);
    CHECK(std::isfinite(quadratic_form(spec, 0.3, u)));
}

TEST_CASE("spec validation")
{
    CHECK_THROWS_AS(ModelSpec({1, 3, 1.0, 0.0}).validate(), Error);
    CHECK_THROWS_AS(ModelSpec({2, 1, 1.0, 0.0}).validate(), Error);
    CHECK_THROWS_AS(ModelSpec({2, 3, 1.0, -0.1}).validate(), Error);
    CHECK_THROWS_AS(ProbVector({0.5, 0.6}), Error);
    CHECK_NOTHROW(ProbVector({0.25, 0.75}));
}

TEST_CASE("p-norm power")
{
    std::vector<double> v{0.5, 0.25, 0.25};
    CHECK(p_norm_pow(v, 3) == doctest::Approx(0.125 + 2 * 0.015625));
}

#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cwpotts/error.hpp"
#include "cwpotts/limit_laws.hpp"

using namespace cwpotts;

namespace {

// int_{-inf}^{inf} x^k exp(a x^n + b x) dx, split at zero
double tilt_integral(int n, double a, double b, int k)
{
    boost::math::quadrature::exp_sinh<double> es;
    auto pos = [&](double x) { return std::pow(x, k) * std::exp(a * std::pow(x, n) + b * x); };
    auto neg = [&](double x) { return std::pow(-x, k) * std::exp(a * std::pow(x, n) - b * x); };
    return es.integrate(pos) + es.integrate(neg);
}

double tilt_cdf(int n, double a, double b, double t)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto g = [&](double x) { return std::exp(a * std::pow(x, n) + b * x); };
    // mass below t: integrate (-inf, 0] then [0, t]
    const double left = es.integrate([&](double x) { return g(-x); });
    const double mid = t >= 0 ? ts.integrate(g, 0.0, t) : -ts.integrate(g, t, 0.0);
    return (left + mid) / tilt_integral(n, a, b, 0);
}

}  // namespace

TEST_CASE("tilted laws against adaptive quadrature")
{
    for (auto [n, a, b] : {std::tuple{4, -0.7, 0.0}, {4, -2.5, 1.3}, {6, -32.0 / 15.0, 0.0}, {6, -1.0, -2.0}}) {
        const ScalarLaw law = tilted_law(n, a, b);
        CHECK(law.normalization() == doctest::Approx(tilt_integral(n, a, b, 0)).epsilon(1e-10));
        const double mean = tilt_integral(n, a, b, 1) / tilt_integral(n, a, b, 0);
        CHECK(law.mean() == doctest::Approx(mean).epsilon(1e-9).scale(1.0));
        CHECK(law.second_moment() == doctest::Approx(tilt_integral(n, a, b, 2) / tilt_integral(n, a, b, 0)).epsilon(1e-9));
        for (double t : {-0.8, -0.1, 0.0, 0.35, 1.1})
            CHECK(law.cdf(t) == doctest::Approx(tilt_cdf(n, a, b, t)).epsilon(1e-9).scale(1.0));
        CHECK(law.pdf_integral() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(law.grid().richardson_error < 1e-10);
    }
}

TEST_CASE("zero tilt is symmetric and quantiles invert the cdf")
{
    const ScalarLaw law = tilted_law(4, -1.3, 0.0);
    CHECK(law.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (double x : {0.2, 0.7, 1.5})
        CHECK(law.pdf(x) == doctest::Approx(law.pdf(-x)).epsilon(1e-14));
    for (double u : {0.01, 0.3, 0.5, 0.97})
        CHECK(law.cdf(law.quantile(u)) == doctest::Approx(u).epsilon(1e-11));
    CHECK_THROWS_AS(tilted_law(4, 0.5, 0.0), Error);
}

TEST_CASE("sampling agrees with the cdf")
{
    const ScalarLaw laws[] = {tilted_law(4, -0.9, 0.6), sextic_law(0.0), normal_law(1.0, 2.0),
                              half_normal_law(0.7, false)};
    for (const auto& law : laws) {
        const auto xs = law.sample(20000, 4);
        CHECK(ks_distance(xs, law) < 0.015);
    }
}

TEST_CASE("mixture bookkeeping")
{
    const ScalarLaw m = mixture_law({{0.3, half_normal_law(1.0, false)}, {0.2, half_normal_law(2.0, true)}},
                                    {{0.0, 0.4}}, 0.1, 0.0);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.cdf(0.0) - m.cdf_left(0.0) == doctest::Approx(0.4));
    CHECK(m.cdf(-1e300) == doctest::Approx(0.1));
    CHECK(std::isinf(m.quantile(0.05)));
    const auto xs = m.sample(20000, 8);
    CHECK(ks_distance(xs, m) < 0.015);
    CHECK_THROWS_AS(mixture_law({}, {{0.0, 0.5}}, 0.0, 0.0), Error);
}

TEST_CASE("composed laws are increasing distribution functions")
{
    const PointClass special = classify_point({4, 3, 0.778, 0.485});
    const ScalarLaw laws[] = {hhat_limit(special), bhat_limit(special), hhat_limit(classify_point({4, 2, 2.0 / 3.0, 0.0}))};
    for (const auto& law : laws) {
        const GridSpec g = law.grid();
        double prev = -1.0;
        for (int i = 0; i < 200; ++i) {
            const double t = g.lo + (g.hi - g.lo) * i / 199.0;
            const double c = law.cdf(t);
            CHECK(c >= prev);
            prev = c;
        }
        CHECK(law.cdf(g.lo) < 1e-10);
        CHECK(law.cdf(g.hi) > 1 - 1e-10);
        CHECK(law.pdf_integral() == doctest::Approx(1.0).epsilon(1e-8));
    }
    // the literal composition runs the other way
    CHECK(composed_cdf_as_stated(4, -1.0, -2.0, -1.0) > composed_cdf_as_stated(4, -1.0, -2.0, 1.0));
}

TEST_CASE("gamma1 matches the chi-square probability")
{
    const ModelSpec spec{4, 3, 0.5, 0.0};
    const auto sig = sigma_matrix(spec, 0.0);
    // Sigma at x0 is lambda (I - J/q), one eigenvalue lambda of multiplicity q-1
    const double lambda = sig[0] * 3.0 / 2.0;
    const double thr = -2.0 / k_deriv(spec, 1.0 / 3.0, 2);
    const double exact = boost::math::cdf(boost::math::chi_squared(2), thr / lambda);
    const auto mc = gamma1(spec, 200000, 3);
    CHECK(std::abs(mc.value - exact) < 4 * mc.standard_error);
}

TEST_CASE("alpha and gamma2 against quadrature")
{
    auto centred = [](int n, double a) {
        const double m2 = tilt_integral(n, a, 0.0, 2) / tilt_integral(n, a, 0.0, 0);
        const double r = std::sqrt(m2);
        return tilt_cdf(n, a, 0.0, r) - tilt_cdf(n, a, 0.0, -r);
    };
    CHECK(gamma2() == doctest::Approx(centred(6, -32.0 / 15.0)).epsilon(1e-9));
    const ModelSpec at22{2, 2, 1.0, 0.0};
    const PointClass cls = classify_point(at22);
    REQUIRE(cls.tag == PhaseTag::SpecialTypeI);
    const double a = std::pow(2.0, 4) * f_deriv(at22, 0.0, 4) / 24.0;
    CHECK(alpha_constant(at22) == doctest::Approx(centred(4, a)).epsilon(1e-9));
    const ScalarLaw b = bhat_limit(cls);
    CHECK(b.cdf(0.0) == doctest::Approx(alpha_constant(at22)).epsilon(1e-12));
}

TEST_CASE("sextic law at the type-II point")
{
    CHECK(f_deriv({4, 2, 2.0 / 3.0, 0.0}, 0.0, 6) == doctest::Approx(-24.0).epsilon(1e-9));
    const ScalarLaw law = sextic_law(0.0);
    CHECK(law.kind() == LawKind::SexticTilt);
    CHECK(law.cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("regular Gaussian limit")
{
    const PointClass cls = classify_point({4, 3, 0.616, 0.67});
    const VectorLaw g = gaussian_limit_regular(cls, 0.0, 0.0);
    CHECK(g.rank() == 2);
    std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(g.projection(ones), Error);  // zero variance along 1
    const ScalarLaw h = hhat_limit(cls);
    const double s = cls.witness.s_values.front();
    CHECK(h.variance() == doctest::Approx(-9.0 / 4.0 * f_deriv(cls.effective, s, 2)).epsilon(1e-12));
    // drift from the local tilt
    const VectorLaw shifted = gaussian_limit_regular(cls, 0.0, 1.0);
    CHECK(shifted.means.front()[0] == doctest::Approx(g.covariances.front()[0]).epsilon(1e-12));
}

TEST_CASE("critical mixture weights and laws")
{
    const PointClass cls = classify_point({4, 3, 0.965, 0.2});
    const auto w = mixture_weights(cls);
    REQUIRE(w.size() == 2);
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(w[0] > 0.0);
    const ScalarLaw laws[] = {hhat_limit(cls), bhat_limit(cls), norm_p_limit(cls, 0.0)};
    for (const auto& law : laws)
        CHECK(law.total_mass() == doctest::Approx(1.0).epsilon(1e-8));
    const VectorLaw v = critical_gaussian_mixture(cls);
    CHECK(v.weights.size() == 2);
    CHECK(v.rank(0) == 2);
    CHECK(v.rank(1) == 2);
}

TEST_CASE("weights at the beta_c point are symmetric over the permutations")
{
    const PointClass cls = classify_point({4, 3, landmarks(4, 3).beta_c, 0.0});
    const auto w = mixture_weights(cls);
    REQUIRE(w.size() == 4);
    double perm = -1.0;
    for (std::size_t k = 0; k < 4; ++k)
        if (cls.witness.vector_s[k] > 0.0) {
            if (perm < 0)
                perm = w[k];
            CHECK(w[k] == doctest::Approx(perm).epsilon(1e-12));
        }
    CHECK(bhat_limit(cls).total_mass() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("V covariance at a type-I point")
{
    const PointClass cls = classify_point({7, 5, landmarks(7, 5).special.beta_tilde, landmarks(7, 5).special.h_tilde});
    REQUIRE(cls.tag == PhaseTag::SpecialTypeI);
    const VectorLaw v = v_limit_covariance(cls);
    CHECK(v.rank() == 3);  // q - 2
    const auto u = u_direction(5);
    const auto& c = v.covariances.front();
    for (int i = 0; i < 5; ++i) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < 5; ++j) {
            a += c[static_cast<std::size_t>(i * 5 + j)];
            b += c[static_cast<std::size_t>(i * 5 + j)] * u[static_cast<std::size_t>(j)];
        }
        CHECK(std::abs(a) < 1e-12);
        CHECK(std::abs(b) < 1e-12);
    }
}

TEST_CASE("p-norm limits")
{
    const PointClass low = classify_point({4, 3, 0.5, 0.0});
    const ScalarLaw chi = norm_p_limit(low, 0.0);
    CHECK(chi.kind() == LawKind::GeneralizedChiSq);
    CHECK(chi.pdf_integral() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ks_distance(chi.sample(20000, 2), chi) < 0.015);
    CHECK_THROWS_AS(generalized_chi_square({1.0, 2.0}, 1.0), Error);

    const PointClass reg = classify_point({4, 3, 0.616, 0.67});
    const ScalarLaw n = norm_p_limit(reg, 0.4);
    CHECK(n.mean() == doctest::Approx(0.4 * n.variance()).epsilon(1e-12));

    const PointClass sq = classify_point({2, 2, 1.0, 0.0});
    const ScalarLaw s = norm_p_limit(sq, 0.0);
    CHECK(s.kind() == LawKind::SquaredTilt);
    CHECK(s.pdf_integral() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ks_distance(s.sample(20000, 5), s) < 0.015);

    const PointClass special = classify_point({4, 3, 0.778, 0.485});
    CHECK(norm_p_limit(special, 0.0).kind() == LawKind::Affine);
    CHECK(norm_p_limit(classify_point({4, 2, 2.0 / 3.0, 0.0}), 0.0).kind() == LawKind::SquaredTilt);
}

TEST_CASE("KS distance handles ties and atoms")
{
    const ScalarLaw atom = mixture_law({}, {{0.0, 0.5}, {1.0, 0.5}}, 0.0, 0.0);
    std::vector<double> xs{0.0, 0.0, 1.0, 1.0};
    CHECK(ks_distance(xs, atom) == doctest::Approx(0.0));
    std::vector<double> ys{0.0, 0.0, 0.0, 1.0};
    CHECK(ks_distance(ys, atom) == doctest::Approx(0.25));
}

TEST_CASE("law descriptors serialize")
{
    const auto j = hhat_limit(classify_point({4, 3, 0.965, 0.2})).to_json();
    CHECK(j["kind"] == "AtomMixture");
    CHECK(j["params"]["components"].size() == 2);
    const auto rows = sextic_law(0.0).density_table(11);
    CHECK(rows.size() == 11u);
    CHECK(rows[5][2] == doctest::Approx(0.5));
}

// Acceptance checks; one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (no arguments runs all)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "cwpotts/exact.hpp"
#include "cwpotts/inference.hpp"
#include "cwpotts/limit_laws.hpp"
#include "cwpotts/phase.hpp"
#include "cwpotts/sampler.hpp"

using namespace cwpotts;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- 1 ----
Outcome landmark_exactness()
{
    const SpecialPoint sp = compute_special_point(4, 2);
    bool ok = std::abs(sp.beta_tilde - 2.0 / 3.0) <= 1e-8 && std::abs(sp.h_tilde) <= 1e-8 && sp.type == SpecialType::II;
    double worst = 0.0;
    for (int p : {2, 3, 4}) {
        const double err = std::abs(compute_beta_c(p, 2) - std::pow(2.0, p - 1) / (p * (p - 1.0)));
        worst = std::max(worst, err);
    }
    ok = ok && worst <= 1e-8;
    return {ok, fmt("special(4,2)=(%.10f, %.2e) type %s, max beta_c err %.2e", sp.beta_tilde, sp.h_tilde,
                    sp.type == SpecialType::II ? "II" : "I", worst)};
}

// ---- 2 ----
Outcome phase_structure()
{
    const double bc = compute_beta_c(7, 5);
    const SpecialPoint sp = compute_special_point(7, 5);
    const auto curve = critical_curve(7, 5, 1000);
    bool decreasing = true;
    for (std::size_t i = 1; i < curve.size(); ++i)
        decreasing = decreasing && curve[i].beta < curve[i - 1].beta && curve[i].h > curve[i - 1].h;
    const double start_err = curve.empty() ? 1.0 : std::abs(curve.front().beta - bc);
    const double end_gap = curve.empty() ? 1.0 : std::abs(curve.back().beta - sp.beta_tilde);
    const bool ok = std::isfinite(bc) && bc > 0.0 && sp.h_tilde > 0.0 && sp.type == SpecialType::I &&
                    curve.size() >= 100 && decreasing && start_err <= 1e-6 && end_gap <= 1e-3;
    return {ok, fmt("beta_c=%.10f h_tilde=%.6f type %s, %zu samples, decreasing=%d, |phi(0)-beta_c|=%.1e, "
                    "terminal gap %.1e",
                    bc, sp.h_tilde, sp.type == SpecialType::I ? "I" : "II", curve.size(), int(decreasing), start_err,
                    end_gap)};
}

// ---- 3 ----
double brute_log_partition(const ModelSpec& spec, int N)
{
    const int q = spec.q;
    std::vector<int> cfg(static_cast<std::size_t>(N), 0);
    std::vector<double> terms;
    for (;;) {
        std::vector<int> c(static_cast<std::size_t>(q), 0);
        for (int x : cfg)
            ++c[static_cast<std::size_t>(x)];
        double e = spec.h * c[0];
        for (int v : c)
            e += N * spec.beta * std::pow(double(v) / N, spec.p);
        terms.push_back(e);
        int i = 0;
        while (i < N && ++cfg[static_cast<std::size_t>(i)] == q)
            cfg[static_cast<std::size_t>(i++)] = 0;
        if (i == N)
            break;
    }
    double mx = -1e300, acc = 0.0;
    for (double t : terms)
        mx = std::max(mx, t);
    for (double t : terms)
        acc += std::exp(t - mx);
    return mx + std::log(acc);
}

Outcome oracle_equivalence()
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> beta(0.0, 2.0), h(0.0, 1.0);
    std::uniform_int_distribution<int> p(2, 5);
    double worst = 0.0;
    int cases = 0;
    for (int q : {2, 3})
        for (int N = 1; N <= 8; ++N)
            for (int k = 0; k < 5; ++k) {
                const ModelSpec spec{p(rng), q, beta(rng), h(rng)};
                const double want = brute_log_partition(spec, N);
                worst = std::max(worst, std::abs(log_partition(spec, N) - want) / std::abs(want));
                ++cases;
            }
    return {worst <= 1e-12, fmt("%d cases, max rel err %.2e", cases, worst)};
}

// ---- 4 ----
Outcome monotone_likelihood()
{
    const int N = 200;
    const double betas[] = {0.2, 0.6, 1.0, 1.4, 1.8};
    const double hs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    ExactMoments m[5][5];
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            m[i][j] = exact_moments({4, 3, betas[i], hs[j]}, N);
    // [0] u_p in beta, [1] u_1 in h, [2] u_1 in beta, [3] u_p in h
    int violations[4] = {0, 0, 0, 0};
    int on_h0 = 0;
    double spread_h0 = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (i > 0) {
                violations[0] += !(m[i][j].up > m[i - 1][j].up);
                const bool bad = !(m[i][j].u1 > m[i - 1][j].u1);
                violations[2] += bad;
                on_h0 += bad && j == 0;
            }
            if (j > 0) {
                violations[1] += !(m[i][j].u1 > m[i][j - 1].u1);
                violations[3] += !(m[i][j].up > m[i][j - 1].up);
            }
            if (j == 0)
                spread_h0 = std::max(spread_h0, std::abs(m[i][0].u1 - 1.0 / 3.0));
        }
    const int total = violations[0] + violations[1] + violations[2] + violations[3];
    return {total == 0,
            fmt("5x5 grid beta {0.2..1.8} x h {0..1} at N=%d, q=3, p=4: violations u_p(beta) %d, u_1(h) %d, "
                "u_1(beta) %d (%d on h=0, where max |u_1 - 1/3| = %.1e), u_p(h) %d",
                N, violations[0], violations[1], violations[2], on_h0, spread_h0, violations[3])};
}

// ---- 5 ----
using Big = boost::multiprecision::cpp_dec_float_50;

Big f_big(const ModelSpec& spec, const Big& s)
{
    const int q = spec.q;
    const Big a = (1 + (q - 1) * s) / q, b = (1 - s) / q;
    auto k = [&](const Big& x) { return Big(spec.beta) * pow(x, spec.p) - x * log(x); };
    return (q - 1) * k(b) + k(a) + Big(spec.h) * a;
}

Outcome derivative_suite()
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> beta(0.1, 2.5), h(0.0, 1.0), s(0.02, 0.95);
    std::uniform_int_distribution<int> p(2, 7), q(2, 6);
    const Big d("1e-8");
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const ModelSpec spec{p(rng), q(rng), beta(rng), h(rng)};
        const double x = s(rng);
        for (int n = 1; n <= 5; ++n) {
            Big acc = 0, binom = 1;
            for (int j = 0; j <= n; ++j) {
                acc += ((j % 2) ? -1 : 1) * binom * f_big(spec, Big(x) + (Big(n) / 2 - j) * d);
                binom = binom * (n - j) / (j + 1);
            }
            const double fd = static_cast<double>(acc / pow(d, n));
            const double got = f_deriv(spec, x, n);
            worst = std::max(worst, std::abs(got - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    return {worst <= 1e-6, fmt("50 random (spec, s), orders 1-5: max rel err %.2e", worst)};
}

// ---- 6 ----
Outcome sigma_properties()
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> beta(0.1, 2.0), h(0.0, 1.5);
    std::uniform_int_distribution<int> p(2, 6), q(2, 6);
    int points = 0, bad = 0;
    double worst_row = 0.0;
    while (points < 20) {
        const ModelSpec spec{p(rng), q(rng), beta(rng), h(rng)};
        const PointClass cls = classify_point(spec);
        if (cls.tag != PhaseTag::Regular)
            continue;
        ++points;
        const int n = spec.q;
        const auto sig = sigma_matrix(spec, cls.witness.s_values.front());
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = sig[static_cast<std::size_t>(i * n + j)];
        worst_row = std::max(worst_row, m.rowwise().sum().cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        const auto ev = es.eigenvalues();
        const double top = ev.maxCoeff();
        int rank = 0;
        for (int i = 0; i < n; ++i) {
            if (ev(i) < -1e-12 * top)
                ++bad;
            rank += ev(i) > 1e-10 * top;
        }
        bad += rank != n - 1;
    }
    return {bad == 0 && worst_row <= 1e-12, fmt("20 regular points: max |row sum| %.1e, %d PSD/rank failures", worst_row, bad)};
}

std::vector<RescaledSample> draw_rescaled(const PointClass& cls, int N, std::size_t n, std::uint64_t seed)
{
    const auto law = magnetization_law(cls.effective, N);
    const auto xs = exact_sample(law, n, seed);
    return rescale(xs, N, cls);
}

// ---- 7 ----
Outcome clt_reproduction()
{
    const PointClass cls = classify_point({4, 3, 0.616, 0.67});
    const std::vector<double> v{0.157, 0.396, 0.323};
    const auto rs = draw_rescaled(cls, 1000, 20000, 42);
    std::vector<double> proj;
    for (const auto& r : rs)
        proj.push_back(project(r.w, v));
    const ScalarLaw law = gaussian_limit_regular(cls, 0.0, 0.0).projection(v);
    const double ks = ks_distance(proj, law);
    return {ks <= 0.02, fmt("KS %.4f (limit sd %.4f), threshold 0.02", ks, std::sqrt(law.variance()))};
}

// ---- 8 ----
Outcome mixture_weights_check()
{
    const PointClass cls = classify_point({4, 3, 0.965, 0.2});
    if (cls.tag != PhaseTag::StronglyCritical)
        return {false, "point did not classify as strongly critical"};
    const auto w = mixture_weights(cls);
    const int N = 800;
    const auto law = magnetization_law(cls.effective, N);
    std::vector<double> mass(w.size(), 0.0);
    for (std::size_t i = 0; i < law.size(); ++i) {
        const auto c = law.composition(i);
        std::size_t best = 0;
        double bd = 1e300;
        for (std::size_t k = 0; k < cls.witness.vectors.size(); ++k) {
            double d2 = 0.0;
            for (int r = 0; r < 3; ++r) {
                const double diff = double(c[static_cast<std::size_t>(r)]) / N - cls.witness.vectors[k][static_cast<std::size_t>(r)];
                d2 += diff * diff;
            }
            if (d2 < bd) {
                bd = d2;
                best = k;
            }
        }
        mass[best] += std::exp(law.log_prob(i));
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
        worst = std::max(worst, std::abs(mass[k] - w[k]));
    return {worst <= 0.02, fmt("tau weights (%.4f, %.4f), basin masses (%.4f, %.4f), max diff %.4f", w[0], w[1], mass[0],
                               mass[1], worst)};
}

// ---- 9 ----
Outcome type_two_scaling()
{
    const PointClass cls = classify_point({4, 2, 2.0 / 3.0, 0.0});
    if (cls.tag != PhaseTag::SpecialTypeII)
        return {false, "point did not classify as type II"};
    const int N = 4000;
    const auto law = magnetization_law(cls.effective, N);
    const auto xs = exact_sample(law, 20000, 42);
    std::vector<double> t;
    for (const auto& x : xs)
        t.push_back(std::pow(double(N), 1.0 / 6.0) * (x[1] - 0.5));
    const double ks = ks_distance(t, sextic_law(0.0));
    return {ks <= 0.05, fmt("KS %.4f, threshold 0.05", ks)};
}

// ---- 10 ----
Outcome type_one_scaling()
{
    const PointClass cls = classify_point({4, 3, 0.778, 0.485});
    if (cls.tag != PhaseTag::SpecialTypeI)
        return {false, "point did not classify as type I"};
    const auto rs = draw_rescaled(cls, 1000, 20000, 42);
    std::vector<double> t;
    for (const auto& r : rs)
        t.push_back(r.t_n);
    const double ks = ks_distance(t, quartic_law(cls, 0.0, 0.0));
    return {ks <= 0.05, fmt("KS %.4f at snapped (%.6f, %.6f), threshold 0.05", ks, cls.effective.beta, cls.effective.h)};
}

// ---- 11 ----
Outcome estimator_coverage()
{
    const ModelSpec spec{4, 3, 0.616, 0.67};
    const int N = 1000, reps = 500;
    const PointClass cls = classify_point(spec);
    const double sd_theory =
        std::sqrt(-9.0 / 4.0 * f_deriv(spec, cls.witness.s_values.front(), 2));
    const FirstCountProfile profile(spec.with_h(0.0), N);
    const auto xs = exact_sample(magnetization_law(spec, N), reps, 42);
    double m1 = 0.0, m2 = 0.0;
    int covered = 0, failed = 0;
    for (const auto& x : xs) {
        const EstimationResult r = mle_h(profile, x[0]);
        if (!r.converged) {
            ++failed;
            continue;
        }
        const double z = std::sqrt(double(N)) * (r.estimate - spec.h);
        m1 += z;
        m2 += z * z;
        const ConfidenceSet cs = ci_h(spec, r.estimate, x, N, 0.05, false);
        covered += cs.lower <= spec.h && spec.h <= cs.upper;
    }
    const int n = reps - failed;
    const double sd = std::sqrt(m2 / n - (m1 / n) * (m1 / n));
    const double rel = std::abs(sd / sd_theory - 1.0);
    const double coverage = double(covered) / n;
    const bool ok = failed == 0 && rel <= 0.15 && coverage >= 0.92 && coverage <= 0.98;
    return {ok, fmt("sd %.4f vs theory %.4f (rel diff %.3f), coverage %.3f, %d failed fits", sd, sd_theory, rel, coverage,
                    failed)};
}

// ---- 12 ----
Outcome tail_decay()
{
    const ModelSpec spec{4, 3, 0.616, 0.67};
    const double t1 = tail_prob(spec, 100, 0.1), t2 = tail_prob(spec, 200, 0.1), t3 = tail_prob(spec, 400, 0.1);
    const double r1 = (std::log(t2) - std::log(t1)) / 100.0, r2 = (std::log(t3) - std::log(t2)) / 200.0;
    const double ratio = std::max(std::abs(r1), std::abs(r2)) / std::min(std::abs(r1), std::abs(r2));
    const bool ok = t1 > t2 && t2 > t3 && t3 > 0.0 && r1 < 0.0 && r2 < 0.0 && ratio <= 2.0;
    return {ok, fmt("P = %.3e, %.3e, %.3e; log-slopes %.5f, %.5f (ratio %.2f)", t1, t2, t3, r1, r2, ratio)};
}

// ---- 13 ----
double mixture_mass(const nlohmann::json& params)
{
    double acc = params["mass_neg_inf"].get<double>() + params["mass_pos_inf"].get<double>();
    for (const auto& c : params["components"])
        acc += c["weight"].get<double>();
    for (const auto& a : params["atoms"])
        acc += a["weight"].get<double>();
    return acc;
}

Outcome law_sanity()
{
    const PointClass regular = classify_point({4, 3, 0.616, 0.67});
    const PointClass low = classify_point({4, 3, 0.5, 0.0});
    const PointClass strong = classify_point({4, 3, 0.965, 0.2});
    const PointClass betac = classify_point({4, 3, landmarks(4, 3).beta_c, 0.0});
    const PointClass weak = classify_point({7, 5, 2.0, 0.0});
    const PointClass one = classify_point({4, 3, 0.778, 0.485});
    const PointClass two = classify_point({4, 2, 2.0 / 3.0, 0.0});
    const PointClass one22 = classify_point({2, 2, 1.0, 0.0});

    std::vector<std::pair<std::string, ScalarLaw>> laws;
    for (const auto* c : {&regular, &strong, &betac, &weak, &one, &two}) {
        laws.emplace_back("hhat/" + tag_name(c->tag), hhat_limit(*c));
        laws.emplace_back("bhat/" + tag_name(c->tag), bhat_limit(*c));
        laws.emplace_back("norm_p/" + tag_name(c->tag), norm_p_limit(*c, 0.3));
    }
    laws.emplace_back("bhat/x0", bhat_limit(low));
    laws.emplace_back("norm_p/x0", norm_p_limit(low, 0.0));
    laws.emplace_back("bhat/(2,2)", bhat_limit(one22));
    laws.emplace_back("norm_p/(2,2)", norm_p_limit(one22, 0.0));
    laws.emplace_back("T", quartic_law(one, 0.5, 0.2));
    laws.emplace_back("sextic", sextic_law(0.4));
    laws.emplace_back("projection", critical_gaussian_mixture(strong).projection(std::vector<double>{1.0, -0.5, -0.5}));

    int bad_mass = 0;
    double worst = 0.0, worst_mix = 0.0;
    for (const auto& [name, law] : laws) {
        const double err = std::abs(law.total_mass() - 1.0);
        worst = std::max(worst, err);
        if (err > 1e-8) {
            ++bad_mass;
            std::printf("  mass off for %s: %.3e\n", name.c_str(), err);
        }
        if (law.kind() == LawKind::AtomMixture)
            worst_mix = std::max(worst_mix, std::abs(mixture_mass(law.to_json()["params"]) - 1.0));
    }
    int non_monotone = 0;
    for (const ScalarLaw& law : {hhat_limit(one), hhat_limit(two), bhat_limit(one)}) {
        const GridSpec g = law.grid();
        double prev = -1.0;
        for (int i = 0; i < 200; ++i) {
            const double c = law.cdf(g.lo + (g.hi - g.lo) * i / 199.0);
            non_monotone += c < prev;
            prev = c;
        }
    }
    const bool ok = bad_mass == 0 && non_monotone == 0 && worst_mix <= 1e-12;
    return {ok, fmt("%zu laws, max |mass-1| %.2e, G1/G2/L1 monotonicity violations %d, max mixture mass error %.1e",
                    laws.size(), worst, non_monotone, worst_mix)};
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {"landmark exactness", 1.0, landmark_exactness},
        {"phase structure (7,5)", 30.0, phase_structure},
        {"oracle equivalence", 10.0, oracle_equivalence},
        {"monotone likelihood", 20.0, monotone_likelihood},
        {"derivative suite", 1.0, derivative_suite},
        {"Sigma properties", 1.0, sigma_properties},
        {"CLT reproduction", 120.0, clt_reproduction},
        {"mixture weights", 60.0, mixture_weights_check},
        {"type-II scaling", 120.0, type_two_scaling},
        {"type-I scaling", 120.0, type_one_scaling},
        {"estimator consistency and coverage", 600.0, estimator_coverage},
        {"LLN/LDP decay", 60.0, tail_decay},
        {"law sanity", 60.0, law_sanity},
    };
    std::vector<int> which;
    for (int i = 1; i < argc; ++i)
        which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= static_cast<int>(all.size()); ++i)
            which.push_back(i);

    int failures = 0;
    for (int id : which) {
        if (id < 1 || id > static_cast<int>(all.size())) {
            std::printf("criterion %d: unknown\n", id);
            ++failures;
            continue;
        }
        const Criterion& c = all[static_cast<std::size_t>(id - 1)];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("[%s] criterion %2d %s: %s; %.2f s of %.0f s budget\n", pass ? "PASS" : "FAIL", id, c.name,
                    o.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

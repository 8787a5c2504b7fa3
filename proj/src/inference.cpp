#include "cwpotts/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/distributions/normal.hpp>

#include "cwpotts/error.hpp"
#include "cwpotts/phase.hpp"

namespace cwpotts {

namespace {

EstimationResult solve_increasing(const std::function<double(double)>& u, double observed)
{
    EstimationResult r;
    r.observed_statistic = observed;
    const double u0 = u(0.0);
    if (observed <= u0) {
        r.boundary = true;
        r.converged = true;
        r.residual = u0 - observed;
        r.bracket_hi = 0.0;
        return r;
    }
    double lo = 0.0, hi = 1.0;
    double uhi = u(hi);
    while (uhi < observed) {
        if (hi >= kEstimateCap) {
            r.estimate = hi;
            r.bracket_lo = lo;
            r.bracket_hi = hi;
            r.residual = uhi - observed;
            return r;
        }
        lo = hi;
        hi = std::min(2.0 * hi, kEstimateCap);
        uhi = u(hi);
    }
    double mid = 0.5 * (lo + hi), umid = u(mid);
    for (r.iterations = 1; r.iterations < 200; ++r.iterations) {
        if (umid < observed)
            lo = mid;
        else
            hi = mid;
        if (std::abs(umid - observed) <= kRootTolerance && hi - lo <= 1e-12 * std::max(1.0, hi))
            break;
        const double next = 0.5 * (lo + hi);
        if (next <= lo || next >= hi)
            break;
        mid = next;
        umid = u(mid);
    }
    require(u(lo) <= observed + kRootTolerance && u(hi) >= observed - kRootTolerance, ErrorCode::NonConvergence,
            "moment function is not increasing across the final bracket");
    r.estimate = mid;
    r.residual = umid - observed;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.converged = std::abs(r.residual) <= kRootTolerance;
    return r;
}

double plugin_f2(const ModelSpec& spec, const ProbVector& data)
{
    require(static_cast<int>(data.size()) == spec.q, ErrorCode::Shape, "data vector has the wrong length");
    const double s = 1.0 - spec.q * data[data.size() - 1];
    const double f2 = f_deriv_extended(spec.with_h(0.0), s, 2);
    require(f2 < 0.0, ErrorCode::Degenerate, "plug-in f'' is not negative; the data look near-critical");
    return f2;
}

double rate_exponent(PhaseTag tag)
{
    switch (tag) {
    case PhaseTag::SpecialTypeI: return 0.75;
    case PhaseTag::SpecialTypeII: return 5.0 / 6.0;
    default: return 0.5;
    }
}

// h on [0, h_tilde] with phi(h) = beta; phi decreases from beta_c to beta_tilde.
std::optional<double> curve_h_for_beta(int p, int q, double beta)
{
    const Landmarks& lm = landmarks(p, q);
    const double ht = lm.special.h_tilde;
    if (ht <= 0.0)
        return std::nullopt;
    if (std::abs(beta - lm.beta_c) <= 1e-12)
        return 0.0;
    if (std::abs(beta - lm.special.beta_tilde) <= 1e-12)
        return ht;
    double lo = 0.0, hi = ht;
    auto phi = [&](double h) {
        auto c = critical_curve_at(p, q, h);
        require(c.has_value(), ErrorCode::NonConvergence, "critical curve not found inside (0, h_tilde)");
        return c->beta;
    };
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) > beta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::string method_name(CiMethod m)
{
    switch (m) {
    case CiMethod::Plain: return "plain";
    case CiMethod::Augmented: return "augmented";
    case CiMethod::TwoStep: return "two_step";
    }
    return "unknown";
}

EstimationResult mle_h(const FirstCountProfile& profile, double observed_x1)
{
    require(observed_x1 > 0.0 && observed_x1 < 1.0, ErrorCode::Domain, "observed first-coordinate mean must lie in (0, 1)");
    return solve_increasing([&](double h) { return profile.u1(h); }, observed_x1);
}

EstimationResult mle_h(const ModelSpec& spec, double observed_x1, int N, std::uint64_t cap)
{
    return mle_h(FirstCountProfile(spec, N, cap), observed_x1);
}

EstimationResult mle_beta(const ModelSpec& spec, double observed_pnorm, int N, std::uint64_t cap)
{
    const double floor = std::pow(static_cast<double>(spec.q), 1.0 - spec.p);
    require(observed_pnorm > floor && observed_pnorm <= 1.0, ErrorCode::Domain,
            "observed p-norm must lie in (q^(1-p), 1]");
    check_enumeration(N, spec.q, cap);
    return solve_increasing([&](double b) { return expect_up(spec.with_beta(b), N, cap); }, observed_pnorm);
}

double normal_critical(double alpha)
{
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::Domain, "alpha must lie in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), alpha / 2.0));
}

ConfidenceSet ci_h(const ModelSpec& spec, double h_hat, const ProbVector& data, int N, double alpha,
                   bool require_regular)
{
    require(N > 0, ErrorCode::InvalidArgument, "N must be positive");
    if (require_regular) {
        const PointClass cls = classify_point(spec.with_h(h_hat));
        require(cls.tag == PhaseTag::Regular, ErrorCode::Classification,
                "interval I assumes a regular point; got " + tag_name(cls.tag));
    }
    const int q = spec.q;
    const double f2 = plugin_f2(spec, data);
    const double half = q / (q - 1.0) * std::sqrt(-f2 / N) * normal_critical(alpha);
    ConfidenceSet cs;
    cs.lower = h_hat - half;
    cs.upper = h_hat + half;
    cs.level = 1.0 - alpha;
    return cs;
}

ConfidenceSet ci_beta(const ModelSpec& spec, double beta_hat, const ProbVector& data, int N, double alpha)
{
    require(N > 0, ErrorCode::InvalidArgument, "N must be positive");
    require(spec.h != 0.0, ErrorCode::Domain, "interval J needs h != 0");
    const int p = spec.p, q = spec.q;
    const double f2 = plugin_f2(spec.with_beta(beta_hat), data);
    const double denom = p * (q - 1.0) * (std::pow(data[0], p - 1) - std::pow(data[1], p - 1));
    require(std::abs(denom) >= 1e-9, ErrorCode::Degenerate, "interval J denominator vanishes");
    const double half = std::abs(q * std::sqrt(-f2) / (std::sqrt(static_cast<double>(N)) * denom)) * normal_critical(alpha);
    ConfidenceSet cs;
    cs.lower = beta_hat - half;
    cs.upper = beta_hat + half;
    cs.level = 1.0 - alpha;
    return cs;
}

std::vector<double> critical_h_slice(int p, int q, double beta)
{
    ModelSpec{p, q, beta, 0.0}.validate();
    const Landmarks& lm = landmarks(p, q);
    if (beta >= lm.beta_c)
        return {0.0};
    if (lm.special.h_tilde > 0.0 && beta >= lm.special.beta_tilde) {
        if (auto h = curve_h_for_beta(p, q, beta))
            return {*h};
    }
    return {};
}

std::vector<double> critical_beta_slice(int p, int q, double h)
{
    require(h >= 0.0, ErrorCode::Domain, "h must be nonnegative");
    const Landmarks& lm = landmarks(p, q);
    if (h == 0.0)
        return {lm.beta_c};
    if (h > lm.special.h_tilde)
        return {};
    if (h == lm.special.h_tilde)
        return {lm.special.beta_tilde};
    auto c = critical_curve_at(p, q, h);
    require(c.has_value(), ErrorCode::NonConvergence, "critical curve not found");
    return {c->beta};
}

ConfidenceSet augment_ci(const ConfidenceSet& cs, const ModelSpec& spec, Axis axis)
{
    ConfidenceSet out = cs;
    out.appended = axis == Axis::H ? critical_h_slice(spec.p, spec.q, spec.beta)
                                   : critical_beta_slice(spec.p, spec.q, spec.h);
    out.method = CiMethod::Augmented;
    return out;
}

ConfidenceSet two_step_ci(const ModelSpec& spec, double estimate, const ProbVector& data, int N, double alpha,
                          Axis axis)
{
    const bool on_h = axis == Axis::H;
    ConfidenceSet plain = on_h ? ci_h(spec, estimate, data, N, alpha, false) : ci_beta(spec, estimate, data, N, alpha);
    const auto slice = on_h ? critical_h_slice(spec.p, spec.q, spec.beta) : critical_beta_slice(spec.p, spec.q, spec.h);
    plain.method = CiMethod::TwoStep;
    if (slice.empty())
        return plain;
    const double null_value = slice.front();
    const ModelSpec at_null = on_h ? spec.with_h(null_value) : spec.with_beta(null_value);
    const PointClass cls = classify_point(at_null);
    require(cls.tag != PhaseTag::Regular, ErrorCode::Classification, "critical slice point classified as regular");
    const ScalarLaw law = on_h ? hhat_limit(cls) : bhat_limit(cls);
    const double centre = on_h ? cls.effective.h : cls.effective.beta;
    const double t = std::pow(static_cast<double>(N), rate_exponent(cls.tag)) * (estimate - centre);
    const double pv = std::min(1.0, 2.0 * std::min(law.cdf(t), 1.0 - law.cdf_left(t)));
    plain.p_value = pv;
    if (pv < alpha)
        return plain;
    ConfidenceSet single;
    single.lower = single.upper = null_value;
    single.appended = {null_value};
    single.level = 1.0 - alpha;
    single.method = CiMethod::TwoStep;
    single.p_value = pv;
    return single;
}

}  // namespace cwpotts

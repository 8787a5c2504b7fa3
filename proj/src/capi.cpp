#include "cwpotts/cwpotts.h"

#include <cstring>
#include <new>
#include <string>

#include "cwpotts/error.hpp"
#include "cwpotts/exact.hpp"
#include "cwpotts/inference.hpp"
#include "cwpotts/limit_laws.hpp"
#include "cwpotts/phase.hpp"
#include "cwpotts/sampler.hpp"
#include "json_io.hpp"

using namespace cwpotts;

struct cwp_exact_law {
    ExactLaw law;
};

struct cwp_law {
    ScalarLaw law;
};

struct cwp_diagram {
    PhaseDiagram diagram;
};

namespace {

thread_local std::string last_error;

cwp_status status_of(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return CWP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return CWP_ERR_DOMAIN;
    case ErrorCode::Shape: return CWP_ERR_SHAPE;
    case ErrorCode::Classification: return CWP_ERR_CLASSIFICATION;
    case ErrorCode::Size: return CWP_ERR_SIZE;
    case ErrorCode::NonConvergence: return CWP_ERR_NON_CONVERGENCE;
    case ErrorCode::Degenerate: return CWP_ERR_DEGENERATE;
    case ErrorCode::Io: return CWP_ERR_IO;
    }
    return CWP_ERR_INTERNAL;
}

template <class F>
cwp_status guard(F&& body) noexcept
{
    try {
        const cwp_status s = body();
        if (s == CWP_OK)
            last_error.clear();
        return s;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CWP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CWP_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return CWP_ERR_INTERNAL;
    }
}

cwp_status too_small(std::size_t need, std::size_t have)
{
    last_error = "buffer holds " + std::to_string(have) + " elements, " + std::to_string(need) + " needed";
    return CWP_ERR_BUFFER_TOO_SMALL;
}

cwp_status put_string(const std::string& text, char* buf, std::size_t capacity, std::size_t* needed)
{
    if (needed)
        *needed = text.size() + 1;
    if (!buf || capacity < text.size() + 1)
        return too_small(text.size() + 1, capacity);
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return CWP_OK;
}

void need(const void* ptr, const char* what)
{
    require(ptr != nullptr, ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

ModelSpec to_spec(const cwp_spec* s)
{
    need(s, "spec");
    ModelSpec spec{s->p, s->q, s->beta, s->h};
    spec.validate();
    return spec;
}

void put_estimate(const EstimationResult& r, cwp_estimate* out)
{
    out->estimate = r.estimate;
    out->observed_statistic = r.observed_statistic;
    out->residual = r.residual;
    out->bracket_lo = r.bracket_lo;
    out->bracket_hi = r.bracket_hi;
    out->iterations = r.iterations;
    out->converged = r.converged ? 1 : 0;
    out->boundary = r.boundary ? 1 : 0;
}

ProbVector to_data(const double* data, std::size_t q, const ModelSpec& spec)
{
    need(data, "data");
    require(static_cast<int>(q) == spec.q, ErrorCode::Shape, "data length differs from q");
    return ProbVector(std::vector<double>(data, data + q));
}

EstimationResult estimate_axis(const ModelSpec& spec, cwp_axis axis, const ProbVector& x, int N)
{
    if (axis == CWP_AXIS_H)
        return mle_h(spec, x[0], N);
    return mle_beta(spec, p_norm_pow(x.values(), spec.p), N);
}

ConfidenceSet build_set(const ModelSpec& spec, cwp_axis axis, cwp_ci_method method, double estimate,
                        const ProbVector& x, int N, double alpha)
{
    const Axis ax = axis == CWP_AXIS_H ? Axis::H : Axis::Beta;
    switch (method) {
    case CWP_CI_PLAIN:
    case CWP_CI_AUGMENTED: {
        ConfidenceSet cs = ax == Axis::H ? ci_h(spec, estimate, x, N, alpha, false) : ci_beta(spec, estimate, x, N, alpha);
        return method == CWP_CI_AUGMENTED ? augment_ci(cs, spec, ax) : cs;
    }
    case CWP_CI_TWO_STEP: return two_step_ci(spec, estimate, x, N, alpha, ax);
    }
    fail(ErrorCode::InvalidArgument, "unknown interval method");
}

}  // namespace

extern "C" {

const char* cwp_last_error(void) { return last_error.c_str(); }
const char* cwp_version(void) { return "1.0.0"; }

cwp_status cwp_f_deriv(const cwp_spec* spec, double s, int order, double* out)
{
    return guard([&] {
        need(out, "out");
        *out = f_deriv(to_spec(spec), s, order);
        return CWP_OK;
    });
}

cwp_status cwp_sigma_matrix(const cwp_spec* spec, double s, double* out, size_t capacity)
{
    return guard([&] {
        const auto m = sigma_matrix(to_spec(spec), s);
        if (!out || capacity < m.size())
            return too_small(m.size(), capacity);
        std::copy(m.begin(), m.end(), out);
        return CWP_OK;
    });
}

cwp_status cwp_landmarks_get(int p, int q, cwp_landmarks* out)
{
    return guard([&] {
        need(out, "out");
        const Landmarks& lm = landmarks(p, q);
        *out = {lm.beta_c, lm.special.beta_tilde, lm.special.h_tilde, lm.special.s_pq,
                lm.special.type == SpecialType::I ? 1 : 2};
        return CWP_OK;
    });
}

cwp_status cwp_landmarks_json(int p, int q, char* buf, size_t capacity, size_t* needed)
{
    return guard([&] { return put_string(landmarks_json(p, q, landmarks(p, q)).dump(), buf, capacity, needed); });
}

cwp_status cwp_classify(const cwp_spec* spec, cwp_tag* tag, cwp_spec* effective)
{
    return guard([&] {
        need(tag, "tag");
        const PointClass cls = classify_point(to_spec(spec));
        *tag = static_cast<cwp_tag>(static_cast<int>(cls.tag));
        if (effective)
            *effective = {cls.effective.p, cls.effective.q, cls.effective.beta, cls.effective.h};
        return CWP_OK;
    });
}

cwp_status cwp_classify_json(const cwp_spec* spec, char* buf, size_t capacity, size_t* needed)
{
    return guard([&] { return put_string(point_class_json(classify_point(to_spec(spec))).dump(), buf, capacity, needed); });
}

cwp_status cwp_critical_curve(int p, int q, int n_samples, double* h, double* beta, double* s_low, double* s_high,
                              size_t capacity, size_t* count)
{
    return guard([&] {
        need(count, "count");
        const auto curve = critical_curve(p, q, n_samples);
        *count = curve.size();
        if (capacity < curve.size() || (!curve.empty() && (!h || !beta)))
            return too_small(curve.size(), capacity);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            h[i] = curve[i].h;
            beta[i] = curve[i].beta;
            if (s_low)
                s_low[i] = curve[i].s_low;
            if (s_high)
                s_high[i] = curve[i].s_high;
        }
        return CWP_OK;
    });
}

cwp_status cwp_diagram_create(int p, int q, double beta_lo, double beta_hi, double h_lo, double h_hi, int n_beta,
                              int n_h, cwp_diagram** out)
{
    return guard([&] {
        need(out, "out");
        *out = new cwp_diagram{phase_diagram(p, q, beta_lo, beta_hi, h_lo, h_hi, n_beta, n_h)};
        return CWP_OK;
    });
}

void cwp_diagram_free(cwp_diagram* d) { delete d; }

cwp_status cwp_diagram_tags(const cwp_diagram* d, int* tags, size_t capacity)
{
    return guard([&] {
        need(d, "diagram");
        const auto& t = d->diagram.tags;
        if (!tags || capacity < t.size())
            return too_small(t.size(), capacity);
        for (std::size_t i = 0; i < t.size(); ++i)
            tags[i] = static_cast<int>(t[i]);
        return CWP_OK;
    });
}

cwp_status cwp_diagram_cell(const cwp_diagram* d, int ib, int ih, double* beta, double* h)
{
    return guard([&] {
        need(d, "diagram");
        need(beta, "beta");
        need(h, "h");
        require(ib >= 0 && ib < d->diagram.n_beta && ih >= 0 && ih < d->diagram.n_h, ErrorCode::InvalidArgument,
                "cell index out of range");
        *beta = d->diagram.beta_at(ib);
        *h = d->diagram.h_at(ih);
        return CWP_OK;
    });
}

cwp_status cwp_diagram_json(const cwp_diagram* d, char* buf, size_t capacity, size_t* needed)
{
    return guard([&] {
        need(d, "diagram");
        const PhaseDiagram& pd = d->diagram;
        nlohmann::json curve = nlohmann::json::array();
        for (const auto& c : pd.curve)
            curve.push_back({{"h", c.h}, {"beta", c.beta}, {"s_low", c.s_low}, {"s_high", c.s_high}});
        nlohmann::json j = {{"landmarks", landmarks_json(pd.p, pd.q, pd.marks)},
                            {"rect", {pd.beta_lo, pd.beta_hi, pd.h_lo, pd.h_hi}},
                            {"resolution", {pd.n_beta, pd.n_h}},
                            {"curve", curve}};
        return put_string(j.dump(), buf, capacity, needed);
    });
}

cwp_status cwp_exact_moments(const cwp_spec* spec, int N, double* log_partition, double* u1, double* up)
{
    return guard([&] {
        const ExactMoments m = exact_moments(to_spec(spec), N);
        if (log_partition)
            *log_partition = m.log_partition;
        if (u1)
            *u1 = m.u1;
        if (up)
            *up = m.up;
        return CWP_OK;
    });
}

cwp_status cwp_tail_prob(const cwp_spec* spec, int N, double eps, double* out)
{
    return guard([&] {
        need(out, "out");
        *out = tail_prob(to_spec(spec), N, eps);
        return CWP_OK;
    });
}

cwp_status cwp_exact_law_create(const cwp_spec* spec, int N, cwp_exact_law** out)
{
    return guard([&] {
        need(out, "out");
        *out = new cwp_exact_law{magnetization_law(to_spec(spec), N)};
        return CWP_OK;
    });
}

cwp_status cwp_exact_law_load(const char* path, const cwp_spec* spec, cwp_exact_law** out)
{
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new cwp_exact_law{ExactLaw::load(path, to_spec(spec))};
        return CWP_OK;
    });
}

void cwp_exact_law_free(cwp_exact_law* law) { delete law; }

size_t cwp_exact_law_size(const cwp_exact_law* law) { return law ? law->law.size() : 0; }

cwp_status cwp_exact_law_save(const cwp_exact_law* law, const char* path)
{
    return guard([&] {
        need(law, "law");
        need(path, "path");
        law->law.save(path);
        return CWP_OK;
    });
}

cwp_status cwp_exact_law_marginal_first(const cwp_exact_law* law, double* out, size_t capacity)
{
    return guard([&] {
        need(law, "law");
        const auto m = law->law.marginal_first();
        if (!out || capacity < m.size())
            return too_small(m.size(), capacity);
        std::copy(m.begin(), m.end(), out);
        return CWP_OK;
    });
}

cwp_status cwp_exact_sample(const cwp_exact_law* law, size_t n, uint64_t seed, double* out, size_t capacity)
{
    return guard([&] {
        need(law, "law");
        const std::size_t q = static_cast<std::size_t>(law->law.q());
        if (!out || capacity < n * q)
            return too_small(n * q, capacity);
        const auto draws = exact_sample(law->law, n, seed);
        for (std::size_t i = 0; i < draws.size(); ++i)
            std::copy(draws[i].values().begin(), draws[i].values().end(), out + i * q);
        return CWP_OK;
    });
}

cwp_status cwp_gibbs_chain(const cwp_spec* spec, int N, int sweeps, int burn_in, int thin, uint64_t seed,
                           double* out, size_t capacity, size_t* count)
{
    return guard([&] {
        need(count, "count");
        const ModelSpec s = to_spec(spec);
        const auto draws = gibbs_chain(s, ChainConfig{N, sweeps, burn_in, thin, seed});
        const std::size_t q = static_cast<std::size_t>(s.q);
        *count = draws.size();
        if (!out || capacity < draws.size() * q)
            return too_small(draws.size() * q, capacity);
        for (std::size_t i = 0; i < draws.size(); ++i)
            std::copy(draws[i].values().begin(), draws[i].values().end(), out + i * q);
        return CWP_OK;
    });
}

cwp_status cwp_rescale(const cwp_spec* spec, int N, const double* samples, size_t n, double* w_out, double* t_out,
                       size_t* basin_out, double* exponent)
{
    return guard([&] {
        const ModelSpec s = to_spec(spec);
        need(samples, "samples");
        const std::size_t q = static_cast<std::size_t>(s.q);
        std::vector<ProbVector> xs;
        xs.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            xs.emplace_back(std::vector<double>(samples + i * q, samples + (i + 1) * q));
        const PointClass cls = classify_point(s);
        const auto r = rescale(xs, N, cls);
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (w_out)
                std::copy(r[i].w.begin(), r[i].w.end(), w_out + i * q);
            if (t_out)
                t_out[i] = r[i].t_n;
            if (basin_out)
                basin_out[i] = r[i].basin;
        }
        if (exponent)
            *exponent = scale_exponent_for(cls.tag);
        return CWP_OK;
    });
}

cwp_status cwp_law_create(const cwp_spec* spec, cwp_law_kind kind, double beta_bar, double h_bar, cwp_law** out)
{
    return guard([&] {
        need(out, "out");
        if (kind == CWP_LAW_SEXTIC) {
            *out = new cwp_law{sextic_law(h_bar)};
            return CWP_OK;
        }
        const PointClass cls = classify_point(to_spec(spec));
        switch (kind) {
        case CWP_LAW_HHAT: *out = new cwp_law{hhat_limit(cls)}; break;
        case CWP_LAW_BHAT: *out = new cwp_law{bhat_limit(cls)}; break;
        case CWP_LAW_NORM_P: *out = new cwp_law{norm_p_limit(cls, beta_bar)}; break;
        case CWP_LAW_T:
            *out = new cwp_law{cls.tag == PhaseTag::SpecialTypeII ? sextic_law(h_bar) : quartic_law(cls, beta_bar, h_bar)};
            break;
        default: fail(ErrorCode::InvalidArgument, "unknown law kind");
        }
        return CWP_OK;
    });
}

cwp_status cwp_law_projection(const cwp_spec* spec, const double* direction, size_t q, cwp_law** out)
{
    return guard([&] {
        need(out, "out");
        need(direction, "direction");
        const PointClass cls = classify_point(to_spec(spec));
        std::span<const double> dir(direction, q);
        if (cls.tag == PhaseTag::Regular)
            *out = new cwp_law{gaussian_limit_regular(cls, 0.0, 0.0).projection(dir)};
        else if (cls.is_critical())
            *out = new cwp_law{critical_gaussian_mixture(cls).projection(dir)};
        else
            fail(ErrorCode::Classification, "no Gaussian limit at a special point; use the T law");
        return CWP_OK;
    });
}

void cwp_law_free(cwp_law* law) { delete law; }

cwp_status cwp_law_pdf(const cwp_law* law, double x, double* out)
{
    return guard([&] {
        need(law, "law");
        need(out, "out");
        *out = law->law.pdf(x);
        return CWP_OK;
    });
}

cwp_status cwp_law_cdf(const cwp_law* law, double x, double* out)
{
    return guard([&] {
        need(law, "law");
        need(out, "out");
        *out = law->law.cdf(x);
        return CWP_OK;
    });
}

cwp_status cwp_law_quantile(const cwp_law* law, double u, double* out)
{
    return guard([&] {
        need(law, "law");
        need(out, "out");
        require(u >= 0.0 && u <= 1.0, ErrorCode::Domain, "quantile level must lie in [0, 1]");
        *out = law->law.quantile(u);
        return CWP_OK;
    });
}

cwp_status cwp_law_moments(const cwp_law* law, double* mean, double* variance)
{
    return guard([&] {
        need(law, "law");
        if (mean)
            *mean = law->law.mean();
        if (variance)
            *variance = law->law.variance();
        return CWP_OK;
    });
}

cwp_status cwp_law_total_mass(const cwp_law* law, double* out)
{
    return guard([&] {
        need(law, "law");
        need(out, "out");
        *out = law->law.total_mass();
        return CWP_OK;
    });
}

cwp_status cwp_law_sample(const cwp_law* law, size_t n, uint64_t seed, double* out)
{
    return guard([&] {
        need(law, "law");
        need(out, "out");
        const auto xs = law->law.sample(n, seed);
        std::copy(xs.begin(), xs.end(), out);
        return CWP_OK;
    });
}

cwp_status cwp_law_density_table(const cwp_law* law, int points, double* out, size_t capacity)
{
    return guard([&] {
        need(law, "law");
        const std::size_t want = 3 * static_cast<std::size_t>(std::max(points, 0));
        if (!out || capacity < want)
            return too_small(want, capacity);
        const auto rows = law->law.density_table(points);
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::copy(rows[i].begin(), rows[i].end(), out + 3 * i);
        return CWP_OK;
    });
}

cwp_status cwp_law_json(const cwp_law* law, char* buf, size_t capacity, size_t* needed)
{
    return guard([&] {
        need(law, "law");
        return put_string(law->law.to_json().dump(), buf, capacity, needed);
    });
}

cwp_status cwp_ks_distance(const cwp_law* law, const double* samples, size_t n, double* out)
{
    return guard([&] {
        need(law, "law");
        need(samples, "samples");
        need(out, "out");
        *out = ks_distance(std::span<const double>(samples, n), law->law);
        return CWP_OK;
    });
}

cwp_status cwp_mle_h(const cwp_spec* spec, double observed_x1, int N, cwp_estimate* out)
{
    return guard([&] {
        need(out, "out");
        put_estimate(mle_h(to_spec(spec), observed_x1, N), out);
        return CWP_OK;
    });
}

cwp_status cwp_mle_beta(const cwp_spec* spec, double observed_pnorm, int N, cwp_estimate* out)
{
    return guard([&] {
        need(out, "out");
        put_estimate(mle_beta(to_spec(spec), observed_pnorm, N), out);
        return CWP_OK;
    });
}

cwp_status cwp_confidence_set(const cwp_spec* spec, cwp_axis axis, cwp_ci_method method, double estimate,
                              const double* data, size_t q, int N, double alpha, cwp_interval* out)
{
    return guard([&] {
        need(out, "out");
        const ModelSpec s = to_spec(spec);
        const ConfidenceSet cs = build_set(s, axis, method, estimate, to_data(data, q, s), N, alpha);
        *out = {cs.lower, cs.upper, cs.level, cs.appended.empty() ? 0 : 1,
                cs.appended.empty() ? 0.0 : cs.appended.front(), static_cast<int>(cs.method),
                cs.p_value ? 1 : 0, cs.p_value.value_or(0.0)};
        return CWP_OK;
    });
}

cwp_status cwp_estimate_json(const cwp_spec* spec, cwp_axis axis, cwp_ci_method method, const double* data, size_t q,
                             int N, double alpha, char* buf, size_t capacity, size_t* needed)
{
    return guard([&] {
        const ModelSpec s = to_spec(spec);
        const ProbVector x = to_data(data, q, s);
        const EstimationResult r = estimate_axis(s, axis, x, N);
        require(r.converged, ErrorCode::NonConvergence, "estimator bracket reached its cap");
        const ConfidenceSet cs = build_set(s, axis, method, r.estimate, x, N, alpha);
        nlohmann::json j = estimation_json(r);
        j["axis"] = axis == CWP_AXIS_H ? "h" : "beta";
        j["ci"] = confidence_json(cs);
        return put_string(j.dump(), buf, capacity, needed);
    });
}

}  // extern "C"

#include "cwpotts/phase.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "cwpotts/error.hpp"
#include "cwpotts/roots.hpp"

namespace cwpotts {

namespace {

constexpr double kSMax = 1.0 - kBoundaryGuard;

// Roots of g on [0, kSMax] given the monotone-piece boundaries of g.
template <class G, class D>
std::vector<double> roots_on_pieces(G&& g, D&& dg, const std::vector<double>& bounds, double zero_tol)
{
    std::vector<double> out;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        const double a = bounds[j], b = bounds[j + 1];
        const double ga = g(a), gb = g(b);
        if (std::abs(ga) <= zero_tol)
            out.push_back(a);
        if (ga * gb < 0.0 && std::abs(ga) > zero_tol && std::abs(gb) > zero_tol)
            out.push_back(roots::safe_newton(g, dg, a, b));
    }
    if (!bounds.empty() && bounds.back() < kSMax && std::abs(g(bounds.back())) <= zero_tol)
        out.push_back(bounds.back());
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double r : out)
        if (uniq.empty() || r - uniq.back() > 1e-12)
            uniq.push_back(r);
    return uniq;
}

// Boundaries of the monotone pieces of f'' (0, roots of f''', end).
std::vector<double> f2_piece_bounds(const ModelSpec& spec, int cells)
{
    auto f3 = [&](double s) { return f_deriv(spec, s, 3); };
    auto f4 = [&](double s) { return f_deriv(spec, s, 4); };
    std::vector<double> bounds{0.0};
    const double step = kSMax / cells;
    double prev = f3(0.0);
    for (int i = 1; i <= cells; ++i) {
        const double s1 = (i == cells) ? kSMax : i * step;
        const double cur = f3(s1);
        const double s0 = (i - 1) * step;
        if (prev * cur < 0.0) {
            bounds.push_back(roots::safe_newton(f3, f4, s0, s1));
        } else if (cur == 0.0 && i < cells) {
            bounds.push_back(s1);
        }
        prev = cur;
    }
    bounds.push_back(kSMax);
    std::vector<double> uniq;
    for (double b : bounds)
        if (uniq.empty() || b - uniq.back() > 1e-14)
            uniq.push_back(b);
    return uniq;
}

bool is_local_max(const ModelSpec& spec, const StationaryPoint& sp)
{
    if (sp.f2 < -1e-12)
        return true;
    if (sp.f2 > 1e-12)
        return false;
    const double d = 1e-5;
    const bool right_down = f_deriv(spec, std::min(sp.s + d, kSMax), 1) < 0.0;
    const bool left_up = sp.s == 0.0 || f_deriv(spec, std::max(sp.s - d, 0.0), 1) > 0.0;
    return right_down && left_up;
}

std::vector<StationaryPoint> local_maxima(const ModelSpec& spec)
{
    std::vector<StationaryPoint> out;
    for (const auto& sp : find_stationary_points(spec))
        if (is_local_max(spec, sp))
            out.push_back(sp);
    return out;
}

// Whether the global maximizer of f_{beta,h} lies above the region where f'' > 0.
bool high_branch_wins(const ModelSpec& spec)
{
    const auto maxima = local_maxima(spec);
    if (maxima.size() >= 2)
        return maxima.back().f_value - maxima.front().f_value > 0.0;
    if (maxima.empty())
        return false;
    const double f2_at0 = f_deriv(spec, 0.0, 2);
    if (f2_at0 > 0.0)
        return true;
    const auto r = f2_roots(spec);
    if (r.empty())
        return false;
    return maxima.front().s > r.front();
}

void order_vectors(const ModelSpec& spec, MaximizerSet& ms)
{
    const std::size_t n = ms.vectors.size();
    std::vector<double> first(n), norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        first[i] = ms.vectors[i][0];
        norm[i] = p_norm_pow(ms.vectors[i].values(), spec.p);
    }
    ms.ordering_by_first_coord.resize(n);
    ms.ordering_by_p_norm.resize(n);
    std::iota(ms.ordering_by_first_coord.begin(), ms.ordering_by_first_coord.end(), std::size_t{0});
    std::iota(ms.ordering_by_p_norm.begin(), ms.ordering_by_p_norm.end(), std::size_t{0});
    std::stable_sort(ms.ordering_by_first_coord.begin(), ms.ordering_by_first_coord.end(),
                     [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
    std::stable_sort(ms.ordering_by_p_norm.begin(), ms.ordering_by_p_norm.end(),
                     [&](std::size_t a, std::size_t b) { return norm[a] < norm[b]; });
}

}  // namespace

std::string tag_name(PhaseTag tag)
{
    switch (tag) {
    case PhaseTag::Regular: return "Regular";
    case PhaseTag::StronglyCritical: return "StronglyCritical";
    case PhaseTag::WeaklyCritical: return "WeaklyCritical";
    case PhaseTag::SpecialTypeI: return "SpecialTypeI";
    case PhaseTag::SpecialTypeII: return "SpecialTypeII";
    }
    return "Unknown";
}

bool PointClass::is_beta_c_point() const
{
    return tag == PhaseTag::StronglyCritical && effective.h == 0.0 && witness.s_values.size() == 2 &&
           witness.s_values.front() == 0.0;
}

std::vector<double> f2_roots(const ModelSpec& spec, int grid_cells)
{
    spec.validate();
    const auto bounds = f2_piece_bounds(spec, grid_cells);
    auto f2 = [&](double s) { return f_deriv(spec, s, 2); };
    auto f3 = [&](double s) { return f_deriv(spec, s, 3); };
    return roots_on_pieces(f2, f3, bounds, 0.0);
}

std::vector<StationaryPoint> find_stationary_points(const ModelSpec& spec, int grid_cells)
{
    spec.validate();
    auto f1 = [&](double s) { return f_deriv(spec, s, 1); };
    auto f2 = [&](double s) { return f_deriv(spec, s, 2); };
    auto f3 = [&](double s) { return f_deriv(spec, s, 3); };

    const auto b2 = f2_piece_bounds(spec, grid_cells);
    const auto r2 = roots_on_pieces(f2, f3, b2, 0.0);

    std::vector<double> b1{0.0};
    for (double r : r2)
        if (r > b1.back())
            b1.push_back(r);
    if (b1.back() < kSMax)
        b1.push_back(kSMax);

    auto roots1 = roots_on_pieces(f1, f2, b1, 1e-12);
    std::vector<StationaryPoint> out;
    for (double s : roots1)
        out.push_back({s, f_deriv(spec, s, 0), f2(s)});
    return out;
}

std::vector<StationaryPoint> global_maximizers_1d(const ModelSpec& spec, double tie_tol)
{
    require(tie_tol > 0.0, ErrorCode::InvalidArgument, "tie tolerance must be positive");
    const auto pts = find_stationary_points(spec);
    require(!pts.empty(), ErrorCode::NonConvergence, "no stationary point of f was found");
    double best = -INFINITY;
    for (const auto& sp : pts)
        best = std::max(best, sp.f_value);
    std::vector<StationaryPoint> out;
    for (const auto& sp : pts)
        if (sp.f_value >= best - tie_tol && is_local_max(spec, sp))
            out.push_back(sp);
    if (out.empty()) {
        for (const auto& sp : pts)
            if (sp.f_value == best)
                out.push_back(sp);
    }
    require(out.size() <= 2, ErrorCode::Classification, "more than two tied maximizers of f");
    return out;
}

MaximizerSet maximizer_set_from_s(const ModelSpec& spec, const std::vector<double>& s_values)
{
    MaximizerSet ms;
    ms.s_values = s_values;
    std::sort(ms.s_values.begin(), ms.s_values.end());
    for (double s : ms.s_values) {
        ms.f_values.push_back(f_deriv(spec, s, 0));
        const ProbVector base = x_of_s(spec.q, s);
        if (spec.h == 0.0 && s > 0.0) {
            for (int r = 0; r < spec.q; ++r) {
                std::vector<double> v(static_cast<std::size_t>(spec.q), base[1]);
                v[static_cast<std::size_t>(r)] = base[0];
                ms.vectors.emplace_back(std::move(v));
                ms.vector_s.push_back(s);
            }
        } else {
            ms.vectors.push_back(base);
            ms.vector_s.push_back(s);
        }
    }
    order_vectors(spec, ms);
    return ms;
}

MaximizerSet full_maximizer_set(const ModelSpec& spec, double tie_tol)
{
    std::vector<double> s;
    for (const auto& sp : global_maximizers_1d(spec, tie_tol))
        s.push_back(sp.s);
    return maximizer_set_from_s(spec, s);
}

namespace {

PointClass classify_strict(const ModelSpec& spec, const ClassifyOptions& opts)
{
    PointClass pc;
    pc.requested = spec;
    pc.effective = spec;
    pc.witness = full_maximizer_set(spec, opts.tie_tol);
    const auto& ms = pc.witness;
    if (ms.s_values.size() >= 2) {
        pc.tag = PhaseTag::StronglyCritical;
        return pc;
    }
    const double s = ms.s_values.front();
    const double f2 = f_deriv(spec, s, 2);
    if (std::abs(f2) > opts.tol_class && std::abs(f2) < 10.0 * opts.tol_class) {
        std::ostringstream os;
        os << "f'' = " << f2 << " at the maximizer is within 10x the classification tolerance";
        pc.warnings.push_back(os.str());
    }
    if (ms.vectors.size() > 1) {
        pc.tag = PhaseTag::WeaklyCritical;
        return pc;
    }
    if (f2 < -opts.tol_class) {
        pc.tag = PhaseTag::Regular;
        return pc;
    }
    const double f4 = f_deriv(spec, s, 4);
    if (f2 > opts.tol_class)
        pc.warnings.push_back("maximizer has f'' > 0; numerical trouble");
    if (std::abs(f4) <= opts.tol_class) {
        pc.tag = PhaseTag::SpecialTypeII;
    } else {
        pc.tag = PhaseTag::SpecialTypeI;
        if (f4 > 0.0)
            pc.warnings.push_back("f'''' > 0 at a flat maximizer");
    }
    return pc;
}

std::string fmt_point(double b, double h)
{
    std::ostringstream os;
    os.precision(10);
    os << "(" << b << ", " << h << ")";
    return os.str();
}

}  // namespace

PointClass classify_point(const ModelSpec& spec, const ClassifyOptions& opts)
{
    spec.validate();
    require(opts.tol_class > 0.0 && opts.tie_tol > 0.0 && opts.snap_radius >= 0.0, ErrorCode::InvalidArgument,
            "classification tolerances must be positive");
    PointClass pc = classify_strict(spec, opts);
    if (pc.tag != PhaseTag::Regular || opts.snap_radius == 0.0)
        return pc;

    const Landmarks& lm = landmarks(spec.p, spec.q);
    const SpecialPoint& sp = lm.special;
    if (std::hypot(spec.beta - sp.beta_tilde, spec.h - sp.h_tilde) <= opts.snap_radius) {
        PointClass snapped;
        snapped.requested = spec;
        snapped.effective = {spec.p, spec.q, sp.beta_tilde, sp.h_tilde};
        snapped.snapped = true;
        snapped.tag = sp.type == SpecialType::I ? PhaseTag::SpecialTypeI : PhaseTag::SpecialTypeII;
        snapped.witness = maximizer_set_from_s(snapped.effective, {sp.s_pq});
        snapped.warnings.push_back("snapped from " + fmt_point(spec.beta, spec.h) + " to the special point " +
                                   fmt_point(sp.beta_tilde, sp.h_tilde));
        return snapped;
    }
    if (sp.h_tilde > 0.0 && spec.h < sp.h_tilde && spec.beta >= sp.beta_tilde - opts.snap_radius &&
        spec.beta <= lm.beta_c + opts.snap_radius) {
        const auto cs = critical_curve_at(spec.p, spec.q, spec.h);
        if (cs && std::abs(spec.beta - cs->beta) <= opts.snap_radius) {
            PointClass snapped;
            snapped.requested = spec;
            snapped.effective = {spec.p, spec.q, cs->beta, spec.h};
            snapped.snapped = true;
            snapped.tag = PhaseTag::StronglyCritical;
            snapped.witness = maximizer_set_from_s(snapped.effective, {cs->s_low, cs->s_high});
            snapped.warnings.push_back("snapped from " + fmt_point(spec.beta, spec.h) +
                                       " to the strongly critical curve at " + fmt_point(cs->beta, spec.h));
            return snapped;
        }
    }
    return pc;
}

std::pair<double, double> sup_f2(int p, int q, double beta)
{
    const ModelSpec spec{p, q, beta, 0.0};
    spec.validate();
    const auto bounds = f2_piece_bounds(spec, 4096);
    double best = f_deriv(spec, 0.0, 2);
    double arg = 0.0;
    for (std::size_t j = 1; j + 1 < bounds.size(); ++j) {
        const double v = f_deriv(spec, bounds[j], 2);
        if (v > best + 1e-13 || (std::abs(v - best) <= 1e-13 && bounds[j] > arg)) {
            best = std::max(best, v);
            arg = bounds[j];
        }
    }
    return {best, arg};
}

double compute_beta_c(int p, int q)
{
    ModelSpec{p, q, 0.0, 0.0}.validate();
    auto positive_max = [&](double beta) {
        const ModelSpec spec{p, q, beta, 0.0};
        const double f0 = f_deriv(spec, 0.0, 0);
        if (f_deriv(spec, 0.0, 2) > 0.0)
            return true;
        for (const auto& sp : local_maxima(spec))
            if (sp.s > 0.0 && sp.f_value > f0)
                return true;
        return false;
    };
    double hi = 1.0;
    while (!positive_max(hi)) {
        hi *= 2.0;
        require(hi < 1e6, ErrorCode::NonConvergence, "no bracket for beta_c");
    }
    return roots::bisect_predicate(positive_max, 0.0, hi, 1e-13);
}

SpecialPoint compute_special_point(int p, int q)
{
    ModelSpec{p, q, 0.0, 0.0}.validate();
    auto w_positive = [&](double beta) { return sup_f2(p, q, beta).first >= 0.0; };
    double hi = 1.0;
    while (!w_positive(hi)) {
        hi *= 2.0;
        require(hi < 1e6, ErrorCode::NonConvergence, "no bracket for the special point");
    }
    SpecialPoint sp;
    sp.beta_tilde = roots::bisect_predicate(w_positive, 0.0, hi, 1e-14);
    const ModelSpec spec{p, q, sp.beta_tilde, 0.0};
    sp.s_pq = sup_f2(p, q, sp.beta_tilde).second;
    const double a = (1.0 + (q - 1) * sp.s_pq) / q;
    const double b = (1.0 - sp.s_pq) / q;
    sp.h_tilde = std::max(0.0, k_deriv(spec, b, 1) - k_deriv(spec, a, 1));
    sp.type = std::abs(f_deriv(spec, sp.s_pq, 4)) <= ClassifyOptions{}.tol_class ? SpecialType::II : SpecialType::I;
    return sp;
}

const Landmarks& landmarks(int p, int q)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, Landmarks> cache;
    {
        std::lock_guard lock(mu);
        auto it = cache.find({p, q});
        if (it != cache.end())
            return it->second;
    }
    Landmarks lm{compute_beta_c(p, q), compute_special_point(p, q)};
    std::lock_guard lock(mu);
    return cache.emplace(std::make_pair(p, q), lm).first->second;
}

std::optional<CriticalCurveSample> critical_curve_at(int p, int q, double h)
{
    const Landmarks& lm = landmarks(p, q);
    if (!(lm.special.h_tilde > 0.0) || h < 0.0 || h >= lm.special.h_tilde)
        return std::nullopt;
    auto high = [&](double beta) { return high_branch_wins({p, q, beta, h}); };
    double lo = lm.special.beta_tilde;
    double hi = lm.beta_c + 1e-9;
    int expand = 0;
    while (high(lo) && expand < 40) {
        lo -= 0.01 * (1 << std::min(expand, 10));
        lo = std::max(lo, 0.0);
        ++expand;
    }
    expand = 0;
    while (!high(hi) && expand < 40) {
        hi += 0.01 * (1 << std::min(expand, 10));
        ++expand;
    }
    require(!high(lo) && high(hi), ErrorCode::NonConvergence, "critical curve bracket could not be established");

    // gap between the outer local maxima, when both exist
    auto gap = [&](double beta) -> std::optional<double> {
        const auto m = local_maxima({p, q, beta, h});
        if (m.size() < 2)
            return std::nullopt;
        return m.back().f_value - m.front().f_value;
    };
    std::optional<double> glo, ghi;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        glo = gap(lo);
        ghi = gap(hi);
        if (glo && ghi)
            break;
        const double mid = 0.5 * (lo + hi);
        if (high(mid))
            hi = mid;
        else
            lo = mid;
    }
    double beta = 0.5 * (lo + hi);
    if (glo && ghi && *glo < 0.0 && *ghi > 0.0) {
        // Illinois regula falsi on the smooth gap function
        double a = lo, b = hi, fa = *glo, fb = *ghi;
        int side = 0;
        for (int it = 0; it < 100; ++it) {
            double c = (a * fb - b * fa) / (fb - fa);
            if (!(c > a && c < b))
                c = 0.5 * (a + b);
            const auto gc = gap(c);
            if (!gc) {
                if (high(c)) {
                    b = c;
                    fb = 1.0;
                } else {
                    a = c;
                    fa = -1.0;
                }
                continue;
            }
            const double fc = *gc;
            beta = c;
            if (fc == 0.0 || b - a < 1e-14)
                break;
            if (fc < 0.0) {
                a = c;
                fa = fc;
                if (side == -1)
                    fb *= 0.5;
                side = -1;
            } else {
                b = c;
                fb = fc;
                if (side == 1)
                    fa *= 0.5;
                side = 1;
            }
            if (std::abs(fc) < 1e-15)
                break;
        }
    }
    const ModelSpec spec{p, q, beta, h};
    const auto maxima = local_maxima(spec);
    require(maxima.size() >= 2, ErrorCode::NonConvergence,
            "fewer than two local maximizers at the computed critical curve point");
    return CriticalCurveSample{h, beta, maxima.front().s, maxima.back().s};
}

std::vector<CriticalCurveSample> critical_curve(int p, int q, int n_samples)
{
    require(n_samples >= 1, ErrorCode::InvalidArgument, "n_samples must be >= 1");
    const Landmarks& lm = landmarks(p, q);
    std::vector<CriticalCurveSample> out;
    if (!(lm.special.h_tilde > 0.0))
        return out;
    for (int i = 0; i < n_samples; ++i) {
        const double h = lm.special.h_tilde * i / n_samples;
        if (auto cs = critical_curve_at(p, q, h))
            out.push_back(*cs);
    }
    return out;
}

PhaseDiagram phase_diagram(int p, int q, double beta_lo, double beta_hi, double h_lo, double h_hi, int n_beta,
                           int n_h, const ClassifyOptions& opts, int curve_samples)
{
    require(beta_lo >= 0.0 && beta_hi > beta_lo && h_lo >= 0.0 && h_hi > h_lo, ErrorCode::InvalidArgument,
            "phase diagram rectangle must lie in beta >= 0, h >= 0 with positive extent");
    require(n_beta >= 1 && n_h >= 1, ErrorCode::InvalidArgument, "resolution must be positive");
    PhaseDiagram pd;
    pd.p = p;
    pd.q = q;
    pd.beta_lo = beta_lo;
    pd.beta_hi = beta_hi;
    pd.h_lo = h_lo;
    pd.h_hi = h_hi;
    pd.n_beta = n_beta;
    pd.n_h = n_h;
    pd.marks = landmarks(p, q);
    pd.curve = critical_curve(p, q, curve_samples);
    pd.tags.assign(static_cast<std::size_t>(n_beta) * n_h, PhaseTag::Regular);

    const SpecialPoint& sp = pd.marks.special;
    auto curve_beta = [&](double h) -> std::optional<double> {
        if (pd.curve.empty() || h >= sp.h_tilde)
            return std::nullopt;
        auto it = std::upper_bound(pd.curve.begin(), pd.curve.end(), h,
                                   [](double v, const CriticalCurveSample& c) { return v < c.h; });
        const CriticalCurveSample& left = *(it - 1);
        const double h1 = it == pd.curve.end() ? sp.h_tilde : it->h;
        const double b1 = it == pd.curve.end() ? sp.beta_tilde : it->beta;
        return left.beta + (b1 - left.beta) * (h - left.h) / (h1 - left.h);
    };

    ClassifyOptions strict = opts;
    strict.snap_radius = 0.0;
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const int ib = static_cast<int>(idx % static_cast<std::size_t>(n_beta));
            const int ih = static_cast<int>(idx / static_cast<std::size_t>(n_beta));
            const double b = pd.beta_at(ib), h = pd.h_at(ih);
            PhaseTag tag = classify_point({p, q, b, h}, strict).tag;
            if (tag == PhaseTag::Regular && opts.snap_radius > 0.0) {
                if (std::hypot(b - sp.beta_tilde, h - sp.h_tilde) <= opts.snap_radius) {
                    tag = sp.type == SpecialType::I ? PhaseTag::SpecialTypeI : PhaseTag::SpecialTypeII;
                } else if (auto cb = curve_beta(h); cb && std::abs(b - *cb) <= opts.snap_radius) {
                    tag = PhaseTag::StronglyCritical;
                }
            }
            pd.tags[idx] = tag;
        }
    };
    const std::size_t total = pd.tags.size();
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (workers == 1 || total < 64) {
        work(0, total);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk, e = std::min(total, b + chunk);
            if (b < e)
                pool.emplace_back(work, b, e);
        }
    }
    return pd;
}

}  // namespace cwpotts

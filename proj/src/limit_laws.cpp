#include "cwpotts/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "cwpotts/error.hpp"
#include "cwpotts/roots.hpp"

namespace cwpotts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailLog = -32.236191301916641;  // log(1e-14)

double simpson(std::span<const double> g, double step)
{
    const std::size_t n = g.size();
    double acc = g.front() + g.back();
    for (std::size_t i = 1; i + 1 < n; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * g[i];
    return acc * step / 3.0;
}

template <class F>
double simpson_fn(F&& f, double lo, double hi, int points)
{
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = f(lo + i * step);
    return simpson(g, step);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double normal_quantile(double u)
{
    if (u <= 0.0)
        return -kInf;
    if (u >= 1.0)
        return kInf;
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

// Generalized inverse of a cdf by bisection on [lo, hi].
template <class Cdf>
double invert_cdf(Cdf&& cdf, double u, double lo, double hi)
{
    while (cdf(lo) >= u && std::isfinite(lo))
        lo = lo - std::max(1.0, std::abs(lo));
    while (cdf(hi) < u && std::isfinite(hi))
        hi = hi + std::max(1.0, std::abs(hi));
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= u)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Cumulative integral at every node of a Simpson grid.
std::vector<double> cumulative(std::span<const double> g, double step)
{
    std::vector<double> c(g.size(), 0.0);
    for (std::size_t i = 0; i + 2 < g.size(); i += 2) {
        c[i + 1] = c[i] + step / 12.0 * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
        c[i + 2] = c[i] + step / 3.0 * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
    }
    return c;
}

// Cubic Hermite value on [x0, x0 + step] with endpoint values and slopes.
double hermite(double c0, double c1, double d0, double d1, double step, double t)
{
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * c0 + (t3 - 2 * t2 + t) * step * d0 + (-2 * t3 + 3 * t2) * c1 +
           (t3 - t2) * step * d1;
}

// A tabulated continuous law: node cdf values and exact node densities.
struct Table {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> cdf;
    std::vector<double> pdf;

    double hi() const { return lo + step * static_cast<double>(cdf.size() - 1); }

    double eval(double x) const
    {
        if (x <= lo)
            return cdf.front();
        if (x >= hi())
            return cdf.back();
        auto j = std::min(static_cast<std::size_t>((x - lo) / step), cdf.size() - 2);
        const double t = (x - (lo + static_cast<double>(j) * step)) / step;
        return std::clamp(hermite(cdf[j], cdf[j + 1], pdf[j], pdf[j + 1], step, t), 0.0, 1.0);
    }

    double invert(double u) const
    {
        if (u <= cdf.front())
            return lo;
        if (u >= cdf.back())
            return hi();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        j = std::clamp<std::size_t>(j, 1, cdf.size() - 1) - 1;
        const double a = lo + static_cast<double>(j) * step;
        auto f = [&](double x) { return eval(x) - u; };
        auto df = [&](double x) {
            const double t = std::clamp((x - a) / step, 0.0, 1.0);
            return (1 - t) * pdf[j] + t * pdf[j + 1];
        };
        return roots::safe_newton(f, df, a, a + step, 1e-15);
    }
};

// ---- Normal ----

class NormalImpl final : public detail::LawImpl {
public:
    NormalImpl(double mean, double sd) : mu_(mean), sd_(sd) {}
    LawKind kind() const override { return LawKind::Normal; }
    double pdf(double x) const override { return normal_pdf((x - mu_) / sd_) / sd_; }
    double cdf(double x) const override { return normal_cdf((x - mu_) / sd_); }
    double mean() const override { return mu_; }
    double second_moment() const override { return sd_ * sd_ + mu_ * mu_; }
    double quantile(double u) const override { return mu_ + sd_ * normal_quantile(u); }
    double sample(Rng& rng) const override { return quantile(uniform01(rng)); }
    double pdf_integral() const override
    {
        return simpson_fn([&](double x) { return pdf(x); }, mu_ - 40 * sd_, mu_ + 40 * sd_, 8193);
    }
    GridSpec grid() const override { return {mu_ - 8 * sd_, mu_ + 8 * sd_, 0, 0.0}; }
    nlohmann::json params() const override { return {{"mean", mu_}, {"sd", sd_}}; }

private:
    double mu_, sd_;
};

class HalfNormalImpl final : public detail::LawImpl {
public:
    HalfNormalImpl(double sd, bool positive) : sd_(sd), pos_(positive) {}
    LawKind kind() const override { return pos_ ? LawKind::HalfNormalPlus : LawKind::HalfNormalMinus; }
    double pdf(double x) const override
    {
        if ((pos_ && x < 0.0) || (!pos_ && x > 0.0))
            return 0.0;
        return 2.0 * normal_pdf(x / sd_) / sd_;
    }
    double cdf(double x) const override
    {
        if (pos_)
            return x <= 0.0 ? 0.0 : std::erf(x / (sd_ * std::sqrt(2.0)));
        return x >= 0.0 ? 1.0 : std::erfc(-x / (sd_ * std::sqrt(2.0)));
    }
    double mean() const override { return (pos_ ? 1.0 : -1.0) * sd_ * std::sqrt(2.0 / M_PI); }
    double second_moment() const override { return sd_ * sd_; }
    double quantile(double u) const override
    {
        return pos_ ? sd_ * normal_quantile(0.5 + 0.5 * u) : -sd_ * normal_quantile(1.0 - 0.5 * u);
    }
    double sample(Rng& rng) const override { return quantile(uniform01(rng)); }
    double pdf_integral() const override
    {
        const double a = pos_ ? 0.0 : -40 * sd_, b = pos_ ? 40 * sd_ : 0.0;
        return simpson_fn([&](double x) { return pdf(x); }, a, b, 8193);
    }
    GridSpec grid() const override { return {pos_ ? 0.0 : -8 * sd_, pos_ ? 8 * sd_ : 0.0, 0, 0.0}; }
    nlohmann::json params() const override { return {{"sd", sd_}}; }

private:
    double sd_;
    bool pos_;
};

// ---- Polynomial tilt exp(a x^n + b x) ----

struct TiltShape {
    int degree;
    double leading;
    double linear;

    double exponent(double x) const { return leading * std::pow(x, degree) + linear * x; }
    double mode() const
    {
        if (linear == 0.0)
            return 0.0;
        const double r = std::abs(linear / (degree * leading));
        return std::copysign(std::pow(r, 1.0 / (degree - 1)), linear);
    }
};

struct TiltGrid {
    double lo, hi, peak;
};

TiltGrid tilt_range(const TiltShape& sh)
{
    const double x0 = sh.mode();
    const double peak = sh.exponent(x0);
    auto below = [&](double x) { return sh.exponent(x) - peak < kTailLog; };
    auto edge = [&](double dir) {
        double d = std::pow(-kTailLog / -sh.leading, 1.0 / sh.degree);
        while (!below(x0 + dir * d))
            d *= 2.0;
        double a = 0.0, b = d;
        for (int it = 0; it < 200 && b - a > 1e-14 * d; ++it) {
            const double m = 0.5 * (a + b);
            if (below(x0 + dir * m))
                b = m;
            else
                a = m;
        }
        return x0 + dir * b;
    };
    return {edge(-1.0), edge(1.0), peak};
}

struct TiltMoments {
    double log_norm;
    double mean;
    double second;
    double richardson;
};

TiltMoments tilt_moments(const TiltShape& sh, int points, std::vector<double>* g_out = nullptr,
                         TiltGrid* grid_out = nullptr)
{
    const TiltGrid tg = tilt_range(sh);
    const double step = (tg.hi - tg.lo) / (points - 1);
    std::vector<double> g(static_cast<std::size_t>(points)), gx(g.size()), gxx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = tg.lo + static_cast<double>(i) * step;
        g[i] = std::exp(sh.exponent(x) - tg.peak);
        gx[i] = x * g[i];
        gxx[i] = x * gx[i];
    }
    const double z = simpson(g, step);
    std::vector<double> coarse;
    for (std::size_t i = 0; i < g.size(); i += 2)
        coarse.push_back(g[i]);
    const double z2 = simpson(coarse, 2 * step);
    TiltMoments m{std::log(z) + tg.peak, simpson(gx, step) / z, simpson(gxx, step) / z, std::abs(z - z2) / 15.0 / z};
    if (g_out)
        *g_out = std::move(g);
    if (grid_out)
        *grid_out = tg;
    return m;
}

class TiltImpl final : public detail::LawImpl {
public:
    TiltImpl(TiltShape sh, int points) : sh_(sh)
    {
        require(sh.leading < 0.0 && std::isfinite(sh.leading), ErrorCode::Degenerate,
                "tilted law needs a negative leading coefficient");
        require(sh.degree == 4 || sh.degree == 6, ErrorCode::InvalidArgument, "tilt degree must be 4 or 6");
        require(points >= 5 && points % 2 == 1, ErrorCode::InvalidArgument, "Simpson grid needs an odd point count");
        std::vector<double> g;
        TiltGrid tg{};
        mom_ = tilt_moments(sh, points, &g, &tg);
        range_ = tg;
        table_.lo = tg.lo;
        table_.step = (tg.hi - tg.lo) / (points - 1);
        const double z = std::exp(mom_.log_norm - tg.peak);
        table_.cdf = cumulative(g, table_.step);
        const double total = table_.cdf.back();
        for (auto& c : table_.cdf)
            c /= total;
        table_.pdf.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            table_.pdf[i] = g[i] / z;
    }
    LawKind kind() const override { return sh_.degree == 4 ? LawKind::QuarticTilt : LawKind::SexticTilt; }
    double pdf(double x) const override { return std::exp(sh_.exponent(x) - mom_.log_norm); }
    double cdf(double x) const override { return table_.eval(x); }
    double mean() const override { return mom_.mean; }
    double second_moment() const override { return mom_.second; }
    double quantile(double u) const override { return table_.invert(u); }
    double sample(Rng& rng) const override { return quantile(uniform01(rng)); }
    double normalization() const override { return std::exp(mom_.log_norm); }
    double pdf_integral() const override
    {
        const double pad = 0.25 * (range_.hi - range_.lo);
        return simpson_fn([&](double x) { return pdf(x); }, range_.lo - pad, range_.hi + pad, 16385);
    }
    GridSpec grid() const override
    {
        return {range_.lo, range_.hi, static_cast<int>(table_.cdf.size()), mom_.richardson};
    }
    nlohmann::json params() const override
    {
        return {{"degree", sh_.degree}, {"leading", sh_.leading}, {"linear", sh_.linear}};
    }
    const TiltShape& shape() const { return sh_; }

private:
    TiltShape sh_;
    TiltMoments mom_{};
    TiltGrid range_{};
    Table table_;
};

// ---- transforms ----

class SquaredImpl final : public detail::LawImpl {
public:
    SquaredImpl(ScalarLaw base, double scale) : base_(std::move(base)), c_(scale)
    {
        require(scale > 0.0, ErrorCode::InvalidArgument, "squared law needs a positive scale");
    }
    LawKind kind() const override { return LawKind::SquaredTilt; }
    double pdf(double y) const override
    {
        if (y <= 0.0)
            return 0.0;
        const double r = std::sqrt(y / c_);
        return (base_.pdf(r) + base_.pdf(-r)) / (2.0 * std::sqrt(c_ * y));
    }
    double cdf(double y) const override
    {
        if (y <= 0.0)
            return 0.0;
        const double r = std::sqrt(y / c_);
        return std::clamp(base_.cdf(r) - base_.cdf_left(-r), 0.0, 1.0);
    }
    double mean() const override { return c_ * base_.second_moment(); }
    double second_moment() const override
    {
        const GridSpec g = base_.grid();
        return c_ * c_ * simpson_fn([&](double x) { return std::pow(x, 4) * base_.pdf(x); }, g.lo, g.hi, 8193);
    }
    double quantile(double u) const override
    {
        const GridSpec g = base_.grid();
        const double top = c_ * std::max(g.lo * g.lo, g.hi * g.hi);
        return invert_cdf([&](double y) { return cdf(y); }, u, 0.0, top);
    }
    double sample(Rng& rng) const override
    {
        const double t = base_.sample(rng);
        return c_ * t * t;
    }
    // y = c x^2 turns the singular density into the smooth f(x) + f(-x)
    double pdf_integral() const override
    {
        const GridSpec g = base_.grid();
        const double r = 1.25 * std::max(std::abs(g.lo), std::abs(g.hi));
        auto integrand = [&](double x) {
            return x > 0.0 ? 2.0 * c_ * x * pdf(c_ * x * x) : base_.pdf(0.0) + base_.pdf(-0.0);
        };
        return simpson_fn(integrand, 0.0, r, 16385);
    }
    GridSpec grid() const override
    {
        const GridSpec g = base_.grid();
        return {0.0, c_ * std::max(g.lo * g.lo, g.hi * g.hi), 0, g.richardson_error};
    }
    nlohmann::json params() const override
    {
        return {{"scale", c_}, {"base", base_.to_json()}};
    }

private:
    ScalarLaw base_;
    double c_;
};

class AffineImpl final : public detail::LawImpl {
public:
    AffineImpl(ScalarLaw base, double scale, double shift) : base_(std::move(base)), a_(scale), b_(shift)
    {
        require(scale != 0.0 && std::isfinite(scale), ErrorCode::Degenerate, "affine law needs a nonzero scale");
    }
    LawKind kind() const override { return LawKind::Affine; }
    double pdf(double y) const override { return base_.pdf((y - b_) / a_) / std::abs(a_); }
    double cdf(double y) const override
    {
        const double x = (y - b_) / a_;
        return a_ > 0.0 ? base_.cdf(x) : 1.0 - base_.cdf_left(x);
    }
    double mean() const override { return a_ * base_.mean() + b_; }
    double second_moment() const override
    {
        return a_ * a_ * base_.second_moment() + 2 * a_ * b_ * base_.mean() + b_ * b_;
    }
    double quantile(double u) const override
    {
        return a_ > 0.0 ? a_ * base_.quantile(u) + b_ : a_ * base_.quantile(1.0 - u) + b_;
    }
    double sample(Rng& rng) const override { return a_ * base_.sample(rng) + b_; }
    double pdf_integral() const override { return base_.pdf_integral(); }
    GridSpec grid() const override
    {
        GridSpec g = base_.grid();
        const double lo = a_ * g.lo + b_, hi = a_ * g.hi + b_;
        g.lo = std::min(lo, hi);
        g.hi = std::max(lo, hi);
        return g;
    }
    nlohmann::json params() const override
    {
        return {{"scale", a_}, {"shift", b_}, {"base", base_.to_json()}};
    }

private:
    ScalarLaw base_;
    double a_, b_;
};

// ---- mixtures ----

class MixtureImpl final : public detail::LawImpl {
public:
    MixtureImpl(std::vector<MixtureComponent> comps, std::vector<Atom> atoms, double neg, double pos)
        : comps_(std::move(comps)), atoms_(std::move(atoms)), neg_(neg), pos_(pos)
    {
        double total = neg_ + pos_;
        require(neg_ >= 0.0 && pos_ >= 0.0, ErrorCode::InvalidArgument, "negative mass at infinity");
        for (const auto& c : comps_) {
            require(c.weight >= 0.0, ErrorCode::InvalidArgument, "negative mixture weight");
            total += c.weight;
        }
        for (const auto& a : atoms_) {
            require(a.weight >= 0.0 && std::isfinite(a.value), ErrorCode::InvalidArgument, "invalid atom");
            total += a.weight;
        }
        require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "mixture masses do not sum to 1");
        std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    }
    LawKind kind() const override { return LawKind::AtomMixture; }
    double pdf(double x) const override
    {
        double acc = 0.0;
        for (const auto& c : comps_)
            acc += c.weight * c.law.pdf(x);
        return acc;
    }
    double cdf(double x) const override { return eval(x, false); }
    double cdf_left(double x) const override { return eval(x, true); }
    double mean() const override
    {
        if (neg_ > 0.0 && pos_ > 0.0)
            return std::numeric_limits<double>::quiet_NaN();
        if (neg_ > 0.0)
            return -kInf;
        if (pos_ > 0.0)
            return kInf;
        double acc = 0.0;
        for (const auto& c : comps_)
            acc += c.weight * c.law.mean();
        for (const auto& a : atoms_)
            acc += a.weight * a.value;
        return acc;
    }
    double second_moment() const override
    {
        if (neg_ > 0.0 || pos_ > 0.0)
            return kInf;
        double acc = 0.0;
        for (const auto& c : comps_)
            acc += c.weight * c.law.second_moment();
        for (const auto& a : atoms_)
            acc += a.weight * a.value * a.value;
        return acc;
    }
    double quantile(double u) const override
    {
        if (u <= neg_)
            return -kInf;
        if (u > 1.0 - pos_)
            return kInf;
        const GridSpec g = grid();
        return invert_cdf([&](double x) { return cdf(x); }, u, g.lo, g.hi);
    }
    double sample(Rng& rng) const override
    {
        double u = uniform01(rng);
        if (u < neg_)
            return -kInf;
        u -= neg_;
        for (const auto& c : comps_) {
            if (u < c.weight)
                return c.law.sample(rng);
            u -= c.weight;
        }
        for (const auto& a : atoms_) {
            if (u < a.weight)
                return a.value;
            u -= a.weight;
        }
        return pos_ > 0.0 ? kInf : (atoms_.empty() ? comps_.back().law.sample(rng) : atoms_.back().value);
    }
    double pdf_integral() const override
    {
        double acc = 0.0;
        for (const auto& c : comps_)
            acc += c.weight * c.law.pdf_integral();
        return acc;
    }
    double atom_mass() const override
    {
        double acc = neg_ + pos_;
        for (const auto& a : atoms_)
            acc += a.weight;
        return acc;
    }
    GridSpec grid() const override
    {
        double lo = kInf, hi = -kInf;
        for (const auto& c : comps_) {
            const GridSpec g = c.law.grid();
            lo = std::min(lo, g.lo);
            hi = std::max(hi, g.hi);
        }
        for (const auto& a : atoms_) {
            lo = std::min(lo, a.value - 1.0);
            hi = std::max(hi, a.value + 1.0);
        }
        if (!std::isfinite(lo)) {
            lo = -1.0;
            hi = 1.0;
        }
        return {lo, hi, 0, 0.0};
    }
    nlohmann::json params() const override
    {
        nlohmann::json comps = nlohmann::json::array(), atoms = nlohmann::json::array();
        for (const auto& c : comps_)
            comps.push_back({{"weight", c.weight}, {"law", c.law.to_json()}});
        for (const auto& a : atoms_)
            atoms.push_back({{"value", a.value}, {"weight", a.weight}});
        return {{"components", comps}, {"atoms", atoms}, {"mass_neg_inf", neg_}, {"mass_pos_inf", pos_}};
    }

private:
    double eval(double x, bool left) const
    {
        double acc = neg_;
        if (x == kInf)
            return left ? 1.0 - pos_ : 1.0;
        if (x == -kInf)
            return left ? 0.0 : neg_;
        for (const auto& c : comps_)
            acc += c.weight * (left ? c.law.cdf_left(x) : c.law.cdf(x));
        for (const auto& a : atoms_)
            if (left ? a.value < x : a.value <= x)
                acc += a.weight;
        return std::clamp(acc, 0.0, 1.0);
    }

    std::vector<MixtureComponent> comps_;
    std::vector<Atom> atoms_;
    double neg_, pos_;
};

// ---- weighted chi-square with equal weights ----

class ChiSquareImpl final : public detail::LawImpl {
public:
    ChiSquareImpl(std::vector<double> eig, double scale) : eig_(std::move(eig)), scale_(scale)
    {
        require(!eig_.empty(), ErrorCode::Degenerate, "generalized chi-square needs a nonzero eigenvalue");
        const double l0 = eig_.front();
        for (double l : eig_)
            require(std::abs(l - l0) <= 1e-9 * std::abs(l0), ErrorCode::Degenerate,
                    "generalized chi-square with unequal eigenvalues is not supported");
        require(l0 > 0.0 && scale > 0.0, ErrorCode::Degenerate, "chi-square weights must be positive");
        dist_ = boost::math::gamma_distribution<double>(0.5 * static_cast<double>(eig_.size()), 2.0 * scale_ * l0);
    }
    LawKind kind() const override { return LawKind::GeneralizedChiSq; }
    double pdf(double y) const override
    {
        if (y <= 0.0)
            return 0.0;
        return boost::math::pdf(dist_, y);
    }
    double cdf(double y) const override { return y <= 0.0 ? 0.0 : (y == kInf ? 1.0 : boost::math::cdf(dist_, y)); }
    double mean() const override { return boost::math::mean(dist_); }
    double second_moment() const override
    {
        const double m = boost::math::mean(dist_);
        return boost::math::variance(dist_) + m * m;
    }
    double quantile(double u) const override
    {
        if (u <= 0.0)
            return 0.0;
        if (u >= 1.0)
            return kInf;
        return boost::math::quantile(dist_, u);
    }
    double sample(Rng& rng) const override
    {
        std::normal_distribution<double> z;
        double acc = 0.0;
        for (double l : eig_) {
            const double v = z(rng);
            acc += l * v * v;
        }
        return scale_ * acc;
    }
    double pdf_integral() const override
    {
        const double r = std::sqrt(boost::math::quantile(boost::math::complement(dist_, 1e-17)));
        return simpson_fn([&](double x) { return 2.0 * x * pdf(x * x); }, 0.0, r, 16385);
    }
    GridSpec grid() const override { return {0.0, boost::math::quantile(boost::math::complement(dist_, 1e-6)), 0, 0.0}; }
    nlohmann::json params() const override { return {{"eigenvalues", eig_}, {"scale", scale_}}; }

private:
    std::vector<double> eig_;
    double scale_;
    boost::math::gamma_distribution<double> dist_{1.0, 1.0};
};

// ---- composed cdf t -> outer(-mean(t)) ----

class ComposedImpl final : public detail::LawImpl {
public:
    ComposedImpl(int degree, double leading, double slope)
        : degree_(degree), leading_(leading), slope_(slope), outer_(tilted_law(degree, leading, 0.0))
    {
        require(slope < 0.0, ErrorCode::Degenerate, "composed law needs a negative tilt slope");
        auto tail_lo = [&](double t) { return cdf(t) < 1e-13; };
        auto tail_hi = [&](double t) { return cdf(t) > 1.0 - 1e-13; };
        double lo = -1.0, hi = 1.0;
        while (!tail_lo(lo))
            lo *= 2.0;
        while (!tail_hi(hi))
            hi *= 2.0;
        const int points = 2049;
        table_.lo = lo;
        table_.step = (hi - lo) / (points - 1);
        table_.cdf.resize(points);
        table_.pdf.resize(points);
        std::vector<double> tp(points), ttp(points);
        for (int i = 0; i < points; ++i) {
            const double t = lo + i * table_.step;
            const auto [c, d] = eval(t);
            table_.cdf[static_cast<std::size_t>(i)] = c;
            table_.pdf[static_cast<std::size_t>(i)] = d;
            tp[static_cast<std::size_t>(i)] = t * d;
            ttp[static_cast<std::size_t>(i)] = t * t * d;
        }
        mass_ = simpson(table_.pdf, table_.step);
        mean_ = simpson(tp, table_.step);
        second_ = simpson(ttp, table_.step);
    }
    LawKind kind() const override { return LawKind::Composed; }
    double pdf(double t) const override { return eval(t).second; }
    double cdf(double t) const override { return eval(t).first; }
    double mean() const override { return mean_; }
    double second_moment() const override { return second_; }
    double quantile(double u) const override { return table_.invert(u); }
    double sample(Rng& rng) const override { return quantile(uniform01(rng)); }
    double normalization() const override { return mass_; }
    double pdf_integral() const override { return mass_ + table_.cdf.front() + (1.0 - table_.cdf.back()); }
    GridSpec grid() const override { return {table_.lo, table_.hi(), static_cast<int>(table_.cdf.size()), 0.0}; }
    nlohmann::json params() const override
    {
        return {{"degree", degree_}, {"leading", leading_}, {"slope", slope_}, {"inner_mean_sign", -1}};
    }

private:
    std::pair<double, double> eval(double t) const
    {
        const TiltMoments m = tilt_moments({degree_, leading_, slope_ * t}, 4097);
        const double var = m.second - m.mean * m.mean;
        return {outer_.cdf(-m.mean), outer_.pdf(-m.mean) * (-slope_) * var};
    }

    int degree_;
    double leading_, slope_;
    ScalarLaw outer_;
    Table table_;
    double mass_ = 1.0, mean_ = 0.0, second_ = 0.0;
};

// ---- helpers over point classes ----

double f2_at(const ModelSpec& spec, double s) { return f_deriv(spec, s, 2); }

double rho_at(const ModelSpec& spec, double s)
{
    const int q = spec.q;
    return k_deriv(spec, (1.0 + (q - 1) * s) / q, 2) / k_deriv(spec, (1.0 - s) / q, 2);
}

double power_gap(const ProbVector& m, int p)
{
    // first coordinate minus any other coordinate, each to the power p-1; the vector is x_s up to permutation
    return std::pow(m[0], p - 1) - std::pow(m[1], p - 1);
}

double bhat_variance(const ModelSpec& spec, double s)
{
    const int p = spec.p, q = spec.q;
    const ProbVector x = x_of_s(q, s);
    const double d = power_gap(x, p);
    require(std::abs(d) > 1e-12, ErrorCode::Degenerate, "beta estimator variance needs m_1 != m_2");
    return -static_cast<double>(q) * q * f2_at(spec, s) / (static_cast<double>(p) * p * (q - 1) * (q - 1)) / (d * d);
}

double hhat_variance(const ModelSpec& spec, double s)
{
    const int q = spec.q;
    return -static_cast<double>(q) * q / ((q - 1.0) * (q - 1.0)) * f2_at(spec, s);
}

double hhat_variance_weak(const ModelSpec& spec, double s)
{
    const int q = spec.q;
    return -static_cast<double>(q) * q * f2_at(spec, s) / ((q - 1.0) * (1.0 + (q - 2) * rho_at(spec, s)));
}

void require_tag(const PointClass& cls, std::initializer_list<PhaseTag> tags, const char* what)
{
    for (PhaseTag t : tags)
        if (cls.tag == t)
            return;
    fail(ErrorCode::Classification, std::string(what) + ": not available for a " + tag_name(cls.tag) + " point");
}

std::vector<double> inner_tilt_vector(const ModelSpec& spec, const ProbVector& m)
{
    std::vector<double> g(m.size());
    for (std::size_t r = 0; r < m.size(); ++r)
        g[r] = std::pow(m[r], spec.p - 1);
    return g;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double quartic_leading(const ModelSpec& spec, double s) { return std::pow(spec.q, 4) * f_deriv(spec, s, 4) / 24.0; }
double sextic_leading(const ModelSpec& spec, double s) { return std::pow(spec.q, 6) * f_deriv(spec, s, 6) / 720.0; }

Eigen::MatrixXd to_matrix(const std::vector<double>& m, int n)
{
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = m[static_cast<std::size_t>(i * n + j)];
    return out;
}

std::vector<double> positive_eigenvalues(const std::vector<double>& m, int n, double tol = 1e-10)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_matrix(m, n));
    const auto& ev = es.eigenvalues();
    const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        if (ev(i) > tol * top)
            out.push_back(ev(i));
    return out;
}

}  // namespace

std::string kind_name(LawKind kind)
{
    switch (kind) {
    case LawKind::Normal: return "Normal";
    case LawKind::HalfNormalPlus: return "HalfNormalPlus";
    case LawKind::HalfNormalMinus: return "HalfNormalMinus";
    case LawKind::QuarticTilt: return "QuarticTilt";
    case LawKind::SexticTilt: return "SexticTilt";
    case LawKind::AtomMixture: return "AtomMixture";
    case LawKind::GeneralizedChiSq: return "GeneralizedChiSq";
    case LawKind::Composed: return "Composed";
    case LawKind::SquaredTilt: return "SquaredTilt";
    case LawKind::Affine: return "Affine";
    }
    return "Unknown";
}

std::string vector_kind_name(VectorLaw::Kind kind)
{
    switch (kind) {
    case VectorLaw::Kind::GaussianSimplex: return "GaussianSimplex";
    case VectorLaw::Kind::MixtureGaussianSimplex: return "MixtureGaussianSimplex";
    case VectorLaw::Kind::ProductTV: return "ProductTV";
    }
    return "Unknown";
}

std::vector<double> ScalarLaw::sample(std::size_t n, std::uint64_t seed) const
{
    Rng rng = make_stream(seed, 0);
    std::vector<double> out(n);
    for (auto& x : out)
        x = sample(rng);
    return out;
}

nlohmann::json ScalarLaw::to_json() const
{
    const GridSpec g = grid();
    return {{"kind", kind_name(kind())},
            {"params", impl_->params()},
            {"normalization", normalization()},
            {"grid_spec", {{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}, {"richardson_error", g.richardson_error}}}};
}

std::vector<std::array<double, 3>> ScalarLaw::density_table(int points) const
{
    require(points >= 2, ErrorCode::InvalidArgument, "density table needs at least two points");
    const GridSpec g = grid();
    std::vector<std::array<double, 3>> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x = g.lo + (g.hi - g.lo) * i / (points - 1);
        rows.push_back({x, pdf(x), cdf(x)});
    }
    return rows;
}

ScalarLaw normal_law(double mean, double sd)
{
    require(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0, ErrorCode::Degenerate,
            "normal law needs a finite mean and positive sd");
    return ScalarLaw(std::make_shared<NormalImpl>(mean, sd));
}

ScalarLaw half_normal_law(double sd, bool positive)
{
    require(std::isfinite(sd) && sd > 0.0, ErrorCode::Degenerate, "half-normal law needs a positive sd");
    return ScalarLaw(std::make_shared<HalfNormalImpl>(sd, positive));
}

ScalarLaw tilted_law(int degree, double leading, double linear, int points)
{
    return ScalarLaw(std::make_shared<TiltImpl>(TiltShape{degree, leading, linear}, points));
}

ScalarLaw squared_law(const ScalarLaw& base, double scale) { return ScalarLaw(std::make_shared<SquaredImpl>(base, scale)); }

ScalarLaw affine_law(const ScalarLaw& base, double scale, double shift)
{
    return ScalarLaw(std::make_shared<AffineImpl>(base, scale, shift));
}

ScalarLaw mixture_law(std::vector<MixtureComponent> components, std::vector<Atom> atoms, double mass_neg_inf,
                      double mass_pos_inf)
{
    return ScalarLaw(std::make_shared<MixtureImpl>(std::move(components), std::move(atoms), mass_neg_inf, mass_pos_inf));
}

ScalarLaw generalized_chi_square(std::vector<double> eigenvalues, double scale)
{
    return ScalarLaw(std::make_shared<ChiSquareImpl>(std::move(eigenvalues), scale));
}

ScalarLaw composed_law(int degree, double leading, double slope)
{
    return ScalarLaw(std::make_shared<ComposedImpl>(degree, leading, slope));
}

double composed_cdf_as_stated(int degree, double leading, double slope, double t)
{
    const ScalarLaw outer = tilted_law(degree, leading, 0.0);
    return outer.cdf(tilt_moments({degree, leading, slope * t}, 4097).mean);
}

ScalarLaw quartic_law(const PointClass& cls, double beta_bar, double h_bar)
{
    require_tag(cls, {PhaseTag::SpecialTypeI}, "quartic law");
    const ModelSpec& spec = cls.effective;
    const double s = cls.witness.s_values.front();
    const double a = quartic_leading(spec, s);
    require(a < 0.0, ErrorCode::Degenerate, "quartic law needs f''''(s) < 0");
    const auto g = inner_tilt_vector(spec, cls.witness.vectors.front());
    const auto u = u_direction(spec.q);
    const double linear = beta_bar * spec.p * dot(g, u) + h_bar * (1.0 - spec.q);
    return tilted_law(4, a, linear);
}

ScalarLaw sextic_law(double h_bar) { return tilted_law(6, -32.0 / 15.0, -h_bar); }

std::vector<double> mixture_weights(const PointClass& cls)
{
    require(cls.is_critical(), ErrorCode::Classification, "mixture weights need a critical point");
    const ModelSpec& spec = cls.effective;
    const int q = spec.q;
    std::vector<double> tau;
    for (std::size_t k = 0; k < cls.witness.vectors.size(); ++k) {
        const double s = cls.witness.vector_s[k];
        const double f2 = f2_at(spec, s);
        const double kb = k_deriv(spec, (1.0 - s) / q, 2);
        require(f2 < 0.0 && kb < 0.0, ErrorCode::Degenerate, "tau weight needs f'' < 0 and k'' < 0");
        double prod = 1.0;
        for (double m : cls.witness.vectors[k].values())
            prod *= m;
        tau.push_back(std::sqrt(1.0 / (-f2) * std::pow(-kb, 2 - q) / prod));
    }
    const double total = std::accumulate(tau.begin(), tau.end(), 0.0);
    for (auto& t : tau)
        t /= total;
    return tau;
}

MonteCarloEstimate gamma1(const ModelSpec& spec, std::size_t draws, std::uint64_t seed)
{
    spec.validate();
    require(draws > 0, ErrorCode::InvalidArgument, "gamma1 needs at least one draw");
    const int q = spec.q;
    const auto sigma = sigma_matrix(spec, 0.0);
    const auto eig = positive_eigenvalues(sigma, q);
    const double thr = (1.0 - q) / k_deriv(spec, 1.0 / q, 2);
    Rng rng = make_stream(seed, 0);
    std::normal_distribution<double> z;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        double acc = 0.0;
        for (double l : eig) {
            const double v = z(rng);
            acc += l * v * v;
        }
        if (acc <= thr)
            ++hits;
    }
    const double g = static_cast<double>(hits) / static_cast<double>(draws);
    return {g, std::sqrt(g * (1.0 - g) / static_cast<double>(draws))};
}

double alpha_constant(const ModelSpec& spec)
{
    const PointClass cls = classify_point(spec);
    require_tag(cls, {PhaseTag::SpecialTypeI}, "alpha");
    const ScalarLaw t = quartic_law(cls, 0.0, 0.0);
    const double r = std::sqrt(t.second_moment());
    return t.cdf(r) - t.cdf(-r);
}

double gamma2(int points)
{
    const ScalarLaw f = tilted_law(6, -32.0 / 15.0, 0.0, points);
    const double r = std::sqrt(f.second_moment());
    return f.cdf(r) - f.cdf(-r);
}

ScalarLaw hhat_limit(const PointClass& cls)
{
    const ModelSpec& spec = cls.effective;
    const int q = spec.q;
    const auto& ms = cls.witness;
    switch (cls.tag) {
    case PhaseTag::Regular: return normal_law(0.0, std::sqrt(hhat_variance(spec, ms.s_values.front())));
    case PhaseTag::SpecialTypeI: return composed_law(4, quartic_leading(spec, ms.s_values.front()), 1.0 - q);
    case PhaseTag::SpecialTypeII: return composed_law(6, sextic_leading(spec, ms.s_values.front()), 1.0 - q);
    case PhaseTag::WeaklyCritical: {
        const auto w = mixture_weights(cls);
        const double pq = w[ms.ordering_by_first_coord[static_cast<std::size_t>(q - 1)]];
        const double s = ms.s_values.front();
        return mixture_law({{(1.0 - pq) / 2.0, half_normal_law(std::sqrt(hhat_variance_weak(spec, s)), false)},
                            {pq / 2.0, half_normal_law(std::sqrt(hhat_variance(spec, s)), true)}},
                           {{0.0, 0.5}}, 0.0, 0.0);
    }
    case PhaseTag::StronglyCritical: {
        const auto w = mixture_weights(cls);
        const auto& ord = ms.ordering_by_first_coord;
        if (cls.is_beta_c_point()) {
            const double pq = w[ord[static_cast<std::size_t>(q - 1)]];
            const double s = ms.s_values.back();
            const double wneg = (1.0 - pq) * (q - 1) / (2.0 * q);
            const double wpos = (1.0 - pq) / (2.0 * q);
            return mixture_law({{wneg, half_normal_law(std::sqrt(hhat_variance_weak(spec, s)), false)},
                                {wpos, half_normal_law(std::sqrt(hhat_variance(spec, s)), true)}},
                               {{0.0, 1.0 - wneg - wpos}}, 0.0, 0.0);
        }
        const double p1 = w[ord[0]];
        const double s1 = ms.vector_s[ord[0]], s2 = ms.vector_s[ord[1]];
        return mixture_law({{p1 / 2.0, half_normal_law(std::sqrt(hhat_variance(spec, s1)), false)},
                            {(1.0 - p1) / 2.0, half_normal_law(std::sqrt(hhat_variance(spec, s2)), true)}},
                           {{0.0, 0.5}}, 0.0, 0.0);
    }
    }
    fail(ErrorCode::Classification, "unknown point class");
}

ScalarLaw bhat_limit(const PointClass& cls)
{
    const ModelSpec& spec = cls.effective;
    const int p = spec.p, q = spec.q;
    const auto& ms = cls.witness;
    switch (cls.tag) {
    case PhaseTag::Regular: {
        const double s = ms.s_values.front();
        if (s > 0.0)
            return normal_law(0.0, std::sqrt(bhat_variance(spec, s)));
        const double g = gamma1(spec).value;
        return mixture_law({}, {}, g, 1.0 - g);
    }
    case PhaseTag::SpecialTypeI: {
        if (q == 2 && (p == 2 || p == 3)) {
            const ScalarLaw t = quartic_law(cls, 0.0, 0.0);
            const double r = std::sqrt(t.second_moment());
            const double a = t.cdf(r) - t.cdf(-r);
            return mixture_law({}, {}, a, 1.0 - a);
        }
        const auto g = inner_tilt_vector(spec, ms.vectors.front());
        const double slope = p * dot(g, u_direction(q));
        return composed_law(4, quartic_leading(spec, ms.s_values.front()), slope);
    }
    case PhaseTag::SpecialTypeII: {
        const double g = gamma2();
        return mixture_law({}, {}, g, 1.0 - g);
    }
    case PhaseTag::WeaklyCritical: return normal_law(0.0, std::sqrt(bhat_variance(spec, ms.s_values.front())));
    case PhaseTag::StronglyCritical: {
        const auto w = mixture_weights(cls);
        const auto& ord = ms.ordering_by_p_norm;
        const double p1 = w[ord[0]];
        if (cls.is_beta_c_point()) {
            const double s = ms.s_values.back();
            const double g = gamma1(spec).value;
            const double wpos = (1.0 - p1) / 2.0;
            return mixture_law({{wpos, half_normal_law(std::sqrt(bhat_variance(spec, s)), true)}},
                               {{0.0, 1.0 - p1 * g - wpos}}, p1 * g, 0.0);
        }
        const double s1 = ms.vector_s[ord[0]], s2 = ms.vector_s[ord[1]];
        return mixture_law({{p1 / 2.0, half_normal_law(std::sqrt(bhat_variance(spec, s1)), false)},
                            {(1.0 - p1) / 2.0, half_normal_law(std::sqrt(bhat_variance(spec, s2)), true)}},
                           {{0.0, 0.5}}, 0.0, 0.0);
    }
    }
    fail(ErrorCode::Classification, "unknown point class");
}

ScalarLaw norm_p_limit(const PointClass& cls, double beta_bar)
{
    const ModelSpec& spec = cls.effective;
    const int p = spec.p, q = spec.q;
    const auto& ms = cls.witness;
    switch (cls.tag) {
    case PhaseTag::Regular: {
        const double s = ms.s_values.front();
        if (s > 0.0) {
            const double d = power_gap(ms.vectors.front(), p);
            const double var = -static_cast<double>(p) * p * (q - 1) * (q - 1) * d * d / (static_cast<double>(q) * q * f2_at(spec, s));
            return normal_law(beta_bar * var, std::sqrt(var));
        }
        return generalized_chi_square(positive_eigenvalues(sigma_matrix(spec, 0.0), q),
                                      p * (p - 1.0) / (2.0 * std::pow(q, p - 2)));
    }
    case PhaseTag::SpecialTypeI: {
        const ScalarLaw t = quartic_law(cls, beta_bar, 0.0);
        if (q == 2 && (p == 2 || p == 3))
            return squared_law(t, p * (p - 1.0) / std::pow(2.0, p - 2));
        const double d = power_gap(ms.vectors.front(), p);
        return affine_law(t, -p * (q - 1.0) * d, 0.0);
    }
    case PhaseTag::SpecialTypeII: return squared_law(sextic_law(0.0), 3.0);
    case PhaseTag::StronglyCritical:
    case PhaseTag::WeaklyCritical: {
        const auto w = mixture_weights(cls);
        std::vector<Atom> atoms;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double v = p_norm_pow(ms.vectors[k].values(), p);
            auto it = std::find_if(atoms.begin(), atoms.end(), [&](const Atom& a) { return std::abs(a.value - v) <= 1e-14; });
            if (it == atoms.end())
                atoms.push_back({v, w[k]});
            else
                it->weight += w[k];
        }
        double total = 0.0;
        for (const auto& a : atoms)
            total += a.weight;
        atoms.back().weight += 1.0 - total;
        return mixture_law({}, std::move(atoms), 0.0, 0.0);
    }
    }
    fail(ErrorCode::Classification, "unknown point class");
}

std::vector<double> sigma_for_vector(const ModelSpec& spec, double s, std::size_t position)
{
    const auto base = sigma_matrix(spec, s);
    const auto n = static_cast<std::size_t>(spec.q);
    require(position < n, ErrorCode::InvalidArgument, "position out of range");
    // permutation swapping coordinates 0 and position
    auto perm = [&](std::size_t i) { return i == 0 ? position : (i == position ? 0 : i); };
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out[perm(i) * n + perm(j)] = base[i * n + j];
    return out;
}

VectorLaw gaussian_limit_regular(const PointClass& cls, double beta_bar, double h_bar)
{
    require_tag(cls, {PhaseTag::Regular}, "regular Gaussian limit");
    const ModelSpec& spec = cls.effective;
    const int q = spec.q;
    const ProbVector& m = cls.witness.vectors.front();
    const auto sigma = sigma_matrix(spec, cls.witness.s_values.front());
    std::vector<double> drift(static_cast<std::size_t>(q));
    for (int r = 0; r < q; ++r)
        drift[static_cast<std::size_t>(r)] = beta_bar * spec.p * std::pow(m[static_cast<std::size_t>(r)], spec.p - 1) + (r == 0 ? h_bar : 0.0);
    std::vector<double> mean(static_cast<std::size_t>(q), 0.0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            mean[static_cast<std::size_t>(i)] += sigma[static_cast<std::size_t>(i * q + j)] * drift[static_cast<std::size_t>(j)];
    VectorLaw law;
    law.kind = VectorLaw::Kind::GaussianSimplex;
    law.dim = q;
    law.weights = {1.0};
    law.means = {mean};
    law.covariances = {sigma};
    return law;
}

VectorLaw critical_gaussian_mixture(const PointClass& cls)
{
    require(cls.is_critical(), ErrorCode::Classification, "critical mixture needs a critical point");
    const ModelSpec& spec = cls.effective;
    VectorLaw law;
    law.kind = VectorLaw::Kind::MixtureGaussianSimplex;
    law.dim = spec.q;
    law.weights = mixture_weights(cls);
    for (std::size_t k = 0; k < cls.witness.vectors.size(); ++k) {
        const auto& v = cls.witness.vectors[k];
        const auto pos = static_cast<std::size_t>(std::max_element(v.values().begin(), v.values().end()) - v.values().begin());
        law.means.emplace_back(static_cast<std::size_t>(spec.q), 0.0);
        law.covariances.push_back(sigma_for_vector(spec, cls.witness.vector_s[k], pos));
    }
    return law;
}

VectorLaw v_limit_covariance(const PointClass& cls)
{
    require_tag(cls, {PhaseTag::SpecialTypeI}, "V covariance");
    const ModelSpec& spec = cls.effective;
    const int q = spec.q;
    const double s = cls.witness.s_values.front();
    const double scale = 1.0 / (-(q - 1.0) * k_deriv(spec, (1.0 - s) / q, 2));
    const auto n = static_cast<std::size_t>(q);
    std::vector<double> cov(n * n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            cov[i * n + j] = scale * (i == j ? q - 2.0 : -1.0);
    VectorLaw law;
    law.kind = VectorLaw::Kind::ProductTV;
    law.dim = q;
    law.weights = {1.0};
    law.means = {std::vector<double>(n, 0.0)};
    law.covariances = {cov};
    law.t_law = std::make_shared<ScalarLaw>(quartic_law(cls, 0.0, 0.0));
    return law;
}

int VectorLaw::rank(std::size_t component, double tol) const
{
    return static_cast<int>(positive_eigenvalues(covariances.at(component), dim, tol).size());
}

ScalarLaw VectorLaw::projection(std::span<const double> direction) const
{
    require(static_cast<int>(direction.size()) == dim, ErrorCode::Shape, "projection direction has the wrong length");
    std::vector<MixtureComponent> comps;
    for (std::size_t k = 0; k < covariances.size(); ++k) {
        const auto& c = covariances[k];
        double trace = 0.0, norm2 = dot(direction, direction);
        for (int i = 0; i < dim; ++i)
            trace += c[static_cast<std::size_t>(i * dim + i)];
        double var = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                var += direction[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i * dim + j)] * direction[static_cast<std::size_t>(j)];
        require(var > 1e-12 * trace * norm2, ErrorCode::Degenerate, "projection direction lies in the covariance kernel");
        comps.push_back({weights[k], normal_law(dot(means[k], direction), std::sqrt(var))});
    }
    if (comps.size() == 1)
        return comps.front().law;
    double total = 0.0;
    for (const auto& c : comps)
        total += c.weight;
    comps.back().weight += 1.0 - total;
    return mixture_law(std::move(comps), {}, 0.0, 0.0);
}

std::vector<double> VectorLaw::sample(Rng& rng) const
{
    std::size_t k = 0;
    if (weights.size() > 1) {
        double u = uniform01(rng);
        while (k + 1 < weights.size() && u >= weights[k]) {
            u -= weights[k];
            ++k;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_matrix(covariances[k], dim));
    std::normal_distribution<double> z;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        const double l = std::max(es.eigenvalues()(i), 0.0);
        x += std::sqrt(l) * z(rng) * es.eigenvectors().col(i);
    }
    std::vector<double> out(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        out[static_cast<std::size_t>(i)] = means[k][static_cast<std::size_t>(i)] + x(i);
    return out;
}

double ks_distance(std::span<const double> samples, const ScalarLaw& law)
{
    require(!samples.empty(), ErrorCode::InvalidArgument, "KS distance needs at least one sample");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i])
            ++j;
        const double before = static_cast<double>(i) / n, after = static_cast<double>(j) / n;
        d = std::max({d, std::abs(law.cdf(xs[i]) - after), std::abs(law.cdf_left(xs[i]) - before)});
        i = j;
    }
    return d;
}

}  // namespace cwpotts

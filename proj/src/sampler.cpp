#include "cwpotts/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cwpotts/error.hpp"
#include "cwpotts/rng.hpp"

namespace cwpotts {

namespace {

constexpr std::size_t kBlock = 1 << 16;

ProbVector to_prob(std::span<const std::uint32_t> c, int N)
{
    std::vector<double> v(c.size());
    for (std::size_t r = 0; r < c.size(); ++r)
        v[r] = static_cast<double>(c[r]) / N;
    return ProbVector(std::move(v));
}

}  // namespace

void ChainConfig::validate() const
{
    require(N >= 1, ErrorCode::InvalidArgument, "chain N must be >= 1");
    require(burn_in >= 0 && sweeps > burn_in, ErrorCode::InvalidArgument, "need sweeps > burn_in >= 0");
    require(thin >= 1, ErrorCode::InvalidArgument, "thin must be >= 1");
}

std::vector<std::size_t> exact_sample_indices(const ExactLaw& law, std::size_t n_samples, std::uint64_t seed)
{
    std::vector<double> cdf(law.size());
    double total = 0.0;
    for (std::size_t i = 0; i < law.size(); ++i) {
        total += std::exp(law.log_prob(i));
        cdf[i] = total;
    }
    std::vector<std::size_t> out(n_samples);
    for (std::size_t block = 0; block * kBlock < n_samples; ++block) {
        Rng rng = make_stream(seed, block);
        const std::size_t end = std::min(n_samples, (block + 1) * kBlock);
        for (std::size_t k = block * kBlock; k < end; ++k) {
            const double u = uniform01(rng) * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            out[k] = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), law.size() - 1);
        }
    }
    return out;
}

std::vector<ProbVector> exact_sample(const ExactLaw& law, std::size_t n_samples, std::uint64_t seed)
{
    std::vector<ProbVector> out;
    out.reserve(n_samples);
    for (std::size_t i : exact_sample_indices(law, n_samples, seed))
        out.push_back(to_prob(law.composition(i), law.N()));
    return out;
}

std::vector<double> heat_bath_conditional(const ModelSpec& spec, int N, std::span<const int> counts_without_site)
{
    spec.validate();
    require(static_cast<int>(counts_without_site.size()) == spec.q, ErrorCode::Shape, "count vector length differs from q");
    std::vector<double> logw(counts_without_site.size());
    for (std::size_t r = 0; r < logw.size(); ++r) {
        const double c = counts_without_site[r];
        logw[r] = spec.beta * N * (std::pow((c + 1.0) / N, spec.p) - std::pow(c / N, spec.p)) + (r == 0 ? spec.h : 0.0);
    }
    const double mx = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - mx);
        total += w;
    }
    for (double& w : logw)
        w /= total;
    return logw;
}

std::vector<ProbVector> gibbs_chain(const ModelSpec& spec, const ChainConfig& cfg)
{
    spec.validate();
    cfg.validate();
    const int N = cfg.N;
    const auto q = static_cast<std::size_t>(spec.q);
    Rng rng = make_stream(cfg.seed, 0);

    // energy increment of adding one site to a color with c sites
    std::vector<double> inc(static_cast<std::size_t>(N));
    for (int c = 0; c < N; ++c)
        inc[static_cast<std::size_t>(c)] =
            spec.beta * N * (std::pow((c + 1.0) / N, spec.p) - std::pow(static_cast<double>(c) / N, spec.p));

    std::vector<std::uint16_t> color(static_cast<std::size_t>(N));
    std::vector<int> counts(q, 0);
    std::uniform_int_distribution<int> pick(0, spec.q - 1);
    for (auto& c : color) {
        c = static_cast<std::uint16_t>(pick(rng));
        ++counts[c];
    }

    std::vector<ProbVector> out;
    out.reserve(static_cast<std::size_t>((cfg.sweeps - cfg.burn_in) / cfg.thin));
    std::vector<double> w(q);
    for (int sweep = 1; sweep <= cfg.sweeps; ++sweep) {
        for (auto& site : color) {
            --counts[site];
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < q; ++r) {
                w[r] = inc[static_cast<std::size_t>(counts[r])] + (r == 0 ? spec.h : 0.0);
                mx = std::max(mx, w[r]);
            }
            double total = 0.0;
            for (auto& x : w) {
                x = std::exp(x - mx);
                total += x;
            }
            double u = uniform01(rng) * total;
            std::size_t r = 0;
            while (r + 1 < q && u >= w[r]) {
                u -= w[r];
                ++r;
            }
            site = static_cast<std::uint16_t>(r);
            ++counts[r];
        }
        if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
            std::vector<double> v(q);
            for (std::size_t r = 0; r < q; ++r)
                v[r] = static_cast<double>(counts[r]) / N;
            out.emplace_back(std::move(v));
        }
    }
    return out;
}

double scale_exponent_for(PhaseTag tag)
{
    switch (tag) {
    case PhaseTag::SpecialTypeI: return 0.25;
    case PhaseTag::SpecialTypeII: return 1.0 / 6.0;
    default: return 0.5;
    }
}

std::vector<RescaledSample> rescale(std::span<const ProbVector> samples, int N, const PointClass& cls)
{
    require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
    const auto& maxima = cls.witness.vectors;
    require(!maxima.empty(), ErrorCode::InvalidArgument, "class carries no maximizer");
    const std::size_t q = maxima.front().size();
    const auto u = u_direction(static_cast<int>(q));
    const double uu = static_cast<double>(q) * (static_cast<double>(q) - 1.0);
    const double e = scale_exponent_for(cls.tag);
    const double rootN = std::sqrt(static_cast<double>(N));
    const double rateN = std::pow(static_cast<double>(N), e);

    std::vector<RescaledSample> out;
    out.reserve(samples.size());
    for (const auto& x : samples) {
        require(x.size() == q, ErrorCode::Shape, "sample length differs from q");
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < maxima.size(); ++k) {
            double d = 0.0;
            for (std::size_t r = 0; r < q; ++r)
                d += (x[r] - maxima[k][r]) * (x[r] - maxima[k][r]);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        const ProbVector& m = maxima[best];
        RescaledSample rs;
        rs.raw = x;
        rs.basin = best;
        rs.scale_exponent = e;
        rs.w.resize(q);
        rs.v_n.resize(q);
        double along = 0.0;
        for (std::size_t r = 0; r < q; ++r) {
            rs.w[r] = rootN * (x[r] - m[r]);
            along += (x[r] - m[r]) * u[r];
        }
        const double coef = along / uu;
        rs.t_n = rateN * coef;
        for (std::size_t r = 0; r < q; ++r)
            rs.v_n[r] = rootN * (x[r] - m[r] - coef * u[r]);
        out.push_back(std::move(rs));
    }
    return out;
}

double project(std::span<const double> w, std::span<const double> direction)
{
    require(w.size() == direction.size(), ErrorCode::Shape, "projection length mismatch");
    double acc = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r)
        acc += w[r] * direction[r];
    return acc;
}

}  // namespace cwpotts

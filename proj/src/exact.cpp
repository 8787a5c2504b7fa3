#include "cwpotts/exact.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include "cwpotts/error.hpp"
#include "cwpotts/phase.hpp"

namespace cwpotts {

namespace {

// Running-max weighted sum: tracks sum_i exp(lw_i - max) * g_i for several g.
template <std::size_t K>
struct StreamingSum {
    double max = -std::numeric_limits<double>::infinity();
    std::array<double, K> sums{};

    void add(double lw, const std::array<double, K>& g)
    {
        if (lw > max) {
            const double scale = std::exp(max - lw);
            for (auto& s : sums)
                s *= scale;
            max = lw;
        }
        const double w = std::exp(lw - max);
        for (std::size_t k = 0; k < K; ++k)
            sums[k] += w * g[k];
    }
    double log_total() const { return max + std::log(sums[0]); }
};

void put_u64(std::ostream& os, std::uint64_t v)
{
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is)
{
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_u32(std::ostream& os, std::uint32_t v)
{
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is)
{
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

std::uint64_t composition_count(int N, int q)
{
    require(N >= 0 && q >= 1, ErrorCode::InvalidArgument, "composition count needs N >= 0, q >= 1");
    // C(N+q-1, k) with k = min(q-1, N), computed incrementally (each partial product is a binomial)
    const std::uint64_t n = static_cast<std::uint64_t>(N) + static_cast<std::uint64_t>(q) - 1;
    const std::uint64_t k = std::min<std::uint64_t>(static_cast<std::uint64_t>(q) - 1, static_cast<std::uint64_t>(N));
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

void check_enumeration(int N, int q, std::uint64_t cap)
{
    require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
    require(q >= 2, ErrorCode::InvalidArgument, "q must be >= 2");
    const std::uint64_t count = composition_count(N, q);
    require(count <= cap, ErrorCode::Size,
            "composition count " + std::to_string(count) + " exceeds the cap " + std::to_string(cap));
}

std::vector<std::vector<int>> compositions(int N, int q, std::uint64_t cap)
{
    std::vector<std::vector<int>> out;
    for_each_composition(
        N, q, [&](std::span<const int> c) { out.emplace_back(c.begin(), c.end()); }, cap);
    return out;
}

WeightTable::WeightTable(const ModelSpec& spec, int N) : spec_(spec), N_(N)
{
    spec.validate();
    require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
    log_fact_.resize(static_cast<std::size_t>(N) + 1);
    power_.resize(static_cast<std::size_t>(N) + 1);
    for (int c = 0; c <= N; ++c) {
        log_fact_[static_cast<std::size_t>(c)] = std::lgamma(c + 1.0);
        power_[static_cast<std::size_t>(c)] = N * spec.beta * std::pow(static_cast<double>(c) / N, spec.p);
    }
}

double WeightTable::log_weight(std::span<const int> counts) const
{
    double lw = log_fact_[static_cast<std::size_t>(N_)] + spec_.h * counts[0];
    for (int c : counts)
        lw += power_[static_cast<std::size_t>(c)] - log_fact_[static_cast<std::size_t>(c)];
    return lw;
}

double log_weight(const ModelSpec& spec, int N, std::span<const int> counts)
{
    require(static_cast<int>(counts.size()) == spec.q, ErrorCode::Shape, "composition length differs from q");
    int total = 0;
    for (int c : counts) {
        require(c >= 0, ErrorCode::Domain, "negative count in composition");
        total += c;
    }
    require(total == N, ErrorCode::Domain, "composition does not sum to N");
    return WeightTable(spec, N).log_weight(counts);
}

ExactMoments exact_moments(const ModelSpec& spec, int N, std::uint64_t cap)
{
    const WeightTable wt(spec, N);
    StreamingSum<3> acc;
    const double invN = 1.0 / N;
    std::vector<double> pw(static_cast<std::size_t>(N) + 1);
    for (int c = 0; c <= N; ++c)
        pw[static_cast<std::size_t>(c)] = std::pow(c * invN, spec.p);
    for_each_composition(
        N, spec.q,
        [&](std::span<const int> c) {
            double pn = 0.0;
            for (int x : c)
                pn += pw[static_cast<std::size_t>(x)];
            acc.add(wt.log_weight(c), {1.0, c[0] * invN, pn});
        },
        cap);
    return {acc.log_total(), acc.sums[1] / acc.sums[0], acc.sums[2] / acc.sums[0]};
}

double log_partition(const ModelSpec& spec, int N, std::uint64_t cap)
{
    const WeightTable wt(spec, N);
    StreamingSum<1> acc;
    for_each_composition(
        N, spec.q, [&](std::span<const int> c) { acc.add(wt.log_weight(c), {1.0}); }, cap);
    return acc.log_total();
}

double expect_u1(const ModelSpec& spec, int N, std::uint64_t cap) { return exact_moments(spec, N, cap).u1; }
double expect_up(const ModelSpec& spec, int N, std::uint64_t cap) { return exact_moments(spec, N, cap).up; }

double expect_functional(const ModelSpec& spec, int N, const CompositionFunctional& g, std::uint64_t cap)
{
    const WeightTable wt(spec, N);
    StreamingSum<2> acc;
    for_each_composition(
        N, spec.q, [&](std::span<const int> c) { acc.add(wt.log_weight(c), {1.0, g(c)}); }, cap);
    return acc.sums[1] / acc.sums[0];
}

double tail_prob(const ModelSpec& spec, int N, double eps, std::uint64_t cap)
{
    require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
    const MaximizerSet ms = full_maximizer_set(spec);
    const int q = spec.q;
    return expect_functional(
        spec, N,
        [&](std::span<const int> c) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : ms.vectors) {
                double d2 = 0.0;
                for (int r = 0; r < q; ++r) {
                    const double diff = static_cast<double>(c[static_cast<std::size_t>(r)]) / N - m[static_cast<std::size_t>(r)];
                    d2 += diff * diff;
                }
                best = std::min(best, d2);
            }
            return std::sqrt(best) >= eps ? 1.0 : 0.0;
        },
        cap);
}

ExactLaw::ExactLaw(ModelSpec spec, int N, std::vector<std::uint32_t> counts, std::vector<double> log_probs)
    : spec_(spec), N_(N), counts_(std::move(counts)), log_probs_(std::move(log_probs))
{
    require(counts_.size() == log_probs_.size() * static_cast<std::size_t>(spec_.q), ErrorCode::Shape,
            "count records do not match the number of probabilities");
}

std::span<const std::uint32_t> ExactLaw::composition(std::size_t i) const
{
    const auto q = static_cast<std::size_t>(spec_.q);
    return std::span<const std::uint32_t>(counts_).subspan(i * q, q);
}

std::vector<double> ExactLaw::marginal_first() const
{
    std::vector<double> out(static_cast<std::size_t>(N_) + 1, 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        out[composition(i)[0]] += std::exp(log_probs_[i]);
    return out;
}

double ExactLaw::expect(const std::function<double(std::span<const std::uint32_t>)>& g) const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        acc += std::exp(log_probs_[i]) * g(composition(i));
    return acc;
}

void ExactLaw::save(const std::string& path) const
{
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorCode::Io, "cannot open " + path + " for writing");
    put_u64(os, static_cast<std::uint64_t>(N_));
    put_u64(os, static_cast<std::uint64_t>(spec_.q));
    put_u64(os, size());
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::uint32_t c : composition(i))
            put_u32(os, c);
        put_u64(os, std::bit_cast<std::uint64_t>(log_probs_[i]));
    }
    require(static_cast<bool>(os), ErrorCode::Io, "write failed for " + path);
}

ExactLaw ExactLaw::load(const std::string& path, const ModelSpec& spec)
{
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorCode::Io, "cannot open " + path);
    const auto N = get_u64(is);
    const auto q = get_u64(is);
    const auto count = get_u64(is);
    require(static_cast<bool>(is), ErrorCode::Io, "truncated header in " + path);
    require(static_cast<int>(q) == spec.q, ErrorCode::Shape, "dump q differs from the spec");
    require(N >= 1 && N < (1u << 31) && count == composition_count(static_cast<int>(N), static_cast<int>(q)),
            ErrorCode::Io, "inconsistent header in " + path);
    std::vector<std::uint32_t> counts(count * q);
    std::vector<double> lp(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (std::uint64_t r = 0; r < q; ++r)
            counts[i * q + r] = get_u32(is);
        lp[i] = std::bit_cast<double>(get_u64(is));
    }
    require(static_cast<bool>(is), ErrorCode::Io, "truncated records in " + path);
    return ExactLaw(spec, static_cast<int>(N), std::move(counts), std::move(lp));
}

ExactLaw magnetization_law(const ModelSpec& spec, int N, std::uint64_t cap)
{
    const WeightTable wt(spec, N);
    check_enumeration(N, spec.q, cap);
    const std::uint64_t count = composition_count(N, spec.q);
    std::vector<std::uint32_t> counts;
    std::vector<double> lw;
    counts.reserve(count * static_cast<std::uint64_t>(spec.q));
    lw.reserve(count);
    StreamingSum<1> acc;
    for_each_composition(
        N, spec.q,
        [&](std::span<const int> c) {
            for (int x : c)
                counts.push_back(static_cast<std::uint32_t>(x));
            const double w = wt.log_weight(c);
            lw.push_back(w);
            acc.add(w, {1.0});
        },
        cap);
    const double logz = acc.log_total();
    for (double& w : lw)
        w -= logz;
    return ExactLaw(spec, N, std::move(counts), std::move(lw));
}

FirstCountProfile::FirstCountProfile(const ModelSpec& spec, int N, std::uint64_t cap) : N_(N)
{
    const WeightTable wt(spec.with_h(0.0), N);
    std::vector<StreamingSum<1>> per(static_cast<std::size_t>(N) + 1);
    for_each_composition(
        N, spec.q, [&](std::span<const int> c) { per[static_cast<std::size_t>(c[0])].add(wt.log_weight(c), {1.0}); },
        cap);
    log_mass_.resize(per.size());
    for (std::size_t k = 0; k < per.size(); ++k)
        log_mass_[k] = per[k].log_total();
}

double FirstCountProfile::u1(double h) const
{
    StreamingSum<2> acc;
    for (std::size_t k = 0; k < log_mass_.size(); ++k)
        acc.add(log_mass_[k] + h * static_cast<double>(k), {1.0, static_cast<double>(k) / N_});
    return acc.sums[1] / acc.sums[0];
}

}  // namespace cwpotts

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cwpotts/model.hpp"

namespace cwpotts {

inline constexpr std::uint64_t kDefaultCompositionCap = 200'000'000;

// C(N+q-1, q-1), saturating at UINT64_MAX.
std::uint64_t composition_count(int N, int q);

void check_enumeration(int N, int q, std::uint64_t cap = kDefaultCompositionCap);

// Calls fn(std::span<const int>) for every composition of N into q parts, in lexicographic order.
template <class Fn>
void for_each_composition(int N, int q, Fn&& fn, std::uint64_t cap = kDefaultCompositionCap)
{
    check_enumeration(N, q, cap);
    std::vector<int> c(static_cast<std::size_t>(q), 0);
    c.back() = N;
    const int last = q - 1;
    while (true) {
        fn(std::span<const int>(c));
        // advance: bump the rightmost free slot that still has mass to its right
        int i = last - 1;
        while (i >= 0) {
            int tail = 0;
            for (int j = i + 1; j <= last; ++j)
                tail += c[static_cast<std::size_t>(j)];
            if (tail > 0)
                break;
            --i;
        }
        if (i < 0)
            return;
        ++c[static_cast<std::size_t>(i)];
        int used = 0;
        for (int j = 0; j <= i; ++j)
            used += c[static_cast<std::size_t>(j)];
        for (int j = i + 1; j < last; ++j)
            c[static_cast<std::size_t>(j)] = 0;
        c[static_cast<std::size_t>(last)] = N - used;
    }
}

std::vector<std::vector<int>> compositions(int N, int q, std::uint64_t cap = kDefaultCompositionCap);

// Precomputed log-factorials and power terms for one (spec, N).
class WeightTable {
public:
    WeightTable(const ModelSpec& spec, int N);

    double log_weight(std::span<const int> counts) const;
    int N() const { return N_; }
    const ModelSpec& spec() const { return spec_; }

private:
    ModelSpec spec_;
    int N_;
    std::vector<double> log_fact_;
    std::vector<double> power_;  // N * beta * (c/N)^p
};

double log_weight(const ModelSpec& spec, int N, std::span<const int> counts);
double log_partition(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);

struct ExactMoments {
    double log_partition = 0.0;
    double u1 = 0.0;  // E[Xbar_1]
    double up = 0.0;  // E[sum Xbar_r^p]
};

ExactMoments exact_moments(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);
double expect_u1(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);
double expect_up(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);

using CompositionFunctional = std::function<double(std::span<const int>)>;
double expect_functional(const ModelSpec& spec, int N, const CompositionFunctional& g,
                         std::uint64_t cap = kDefaultCompositionCap);

// P(dist(Xbar_N, maximizer set) >= eps), Euclidean distance.
double tail_prob(const ModelSpec& spec, int N, double eps, std::uint64_t cap = kDefaultCompositionCap);

// Normalized pmf over all compositions of N.
class ExactLaw {
public:
    ExactLaw(ModelSpec spec, int N, std::vector<std::uint32_t> counts, std::vector<double> log_probs);

    const ModelSpec& spec() const { return spec_; }
    int N() const { return N_; }
    int q() const { return spec_.q; }
    std::size_t size() const { return log_probs_.size(); }
    std::span<const std::uint32_t> composition(std::size_t i) const;
    double log_prob(std::size_t i) const { return log_probs_[i]; }
    std::span<const double> log_probs() const { return log_probs_; }

    // P(c_1 = k), k = 0..N
    std::vector<double> marginal_first() const;
    double expect(const std::function<double(std::span<const std::uint32_t>)>& g) const;

    void save(const std::string& path) const;
    // The dump carries N, q and the records only; spec is supplied by the caller.
    static ExactLaw load(const std::string& path, const ModelSpec& spec);

private:
    ModelSpec spec_;
    int N_;
    std::vector<std::uint32_t> counts_;  // size() * q, row-major
    std::vector<double> log_probs_;
};

ExactLaw magnetization_law(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);

// Exact law of c_1 at h = 0; the h-tilt is then an O(N) reweighting.
class FirstCountProfile {
public:
    FirstCountProfile(const ModelSpec& spec, int N, std::uint64_t cap = kDefaultCompositionCap);

    double u1(double h) const;
    int N() const { return N_; }

private:
    int N_;
    std::vector<double> log_mass_;  // unnormalized log P_{beta,0}(c_1 = k)
};

}  // namespace cwpotts

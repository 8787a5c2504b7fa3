#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cwpotts/exact.hpp"
#include "cwpotts/model.hpp"
#include "cwpotts/phase.hpp"

namespace cwpotts {

struct ChainConfig {
    int N = 0;
    int sweeps = 0;
    int burn_in = 0;
    int thin = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// Support indices of i.i.d. draws from the law.
std::vector<std::size_t> exact_sample_indices(const ExactLaw& law, std::size_t n_samples, std::uint64_t seed);
std::vector<ProbVector> exact_sample(const ExactLaw& law, std::size_t n_samples, std::uint64_t seed);

// Heat-bath probabilities for one site given the counts of the other N-1 sites.
std::vector<double> heat_bath_conditional(const ModelSpec& spec, int N, std::span<const int> counts_without_site);

std::vector<ProbVector> gibbs_chain(const ModelSpec& spec, const ChainConfig& cfg);

struct RescaledSample {
    ProbVector raw;
    std::vector<double> w;    // sqrt(N) (raw - m)
    double t_n = 0.0;         // coefficient along u at rate N^{scale_exponent}
    std::vector<double> v_n;  // sqrt(N) times the component orthogonal to u
    double scale_exponent = 0.5;
    std::size_t basin = 0;    // index of the nearest maximizer in the witness
};

double scale_exponent_for(PhaseTag tag);

std::vector<RescaledSample> rescale(std::span<const ProbVector> samples, int N, const PointClass& cls);

double project(std::span<const double> w, std::span<const double> direction);

}  // namespace cwpotts

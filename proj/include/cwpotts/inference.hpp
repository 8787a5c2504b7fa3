#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwpotts/exact.hpp"
#include "cwpotts/limit_laws.hpp"
#include "cwpotts/model.hpp"

namespace cwpotts {

struct EstimationResult {
    double estimate = 0.0;
    double observed_statistic = 0.0;
    double residual = 0.0;  // u(estimate) - observed
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool converged = false;
    bool boundary = false;  // the nonnegativity constraint is active
};

enum class CiMethod { Plain, Augmented, TwoStep };
std::string method_name(CiMethod m);

// Which parameter is estimated; the other one is known.
enum class Axis { H, Beta };

struct ConfidenceSet {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> appended;
    double level = 0.95;
    CiMethod method = CiMethod::Plain;
    std::optional<double> p_value;  // two-step test only
};

inline constexpr double kEstimateCap = 64.0;
inline constexpr double kRootTolerance = 1e-10;

// Root of h -> E_{beta,h}[Xbar_1] = observed, beta taken from the profile.
EstimationResult mle_h(const FirstCountProfile& profile, double observed_x1);
EstimationResult mle_h(const ModelSpec& spec, double observed_x1, int N, std::uint64_t cap = kDefaultCompositionCap);
// Root of beta -> E_{beta,h}[sum Xbar_r^p] = observed, h taken from spec.
EstimationResult mle_beta(const ModelSpec& spec, double observed_pnorm, int N,
                          std::uint64_t cap = kDefaultCompositionCap);

double normal_critical(double alpha);

// Plain intervals around a given estimate; spec carries the known parameter.
ConfidenceSet ci_h(const ModelSpec& spec, double h_hat, const ProbVector& data, int N, double alpha,
                   bool require_regular = true);
ConfidenceSet ci_beta(const ModelSpec& spec, double beta_hat, const ProbVector& data, int N, double alpha);

// Points of the closed critical set on the slice through the known parameter.
std::vector<double> critical_h_slice(int p, int q, double beta);     // S(beta)
std::vector<double> critical_beta_slice(int p, int q, double h);     // T(h)

ConfidenceSet augment_ci(const ConfidenceSet& cs, const ModelSpec& spec, Axis axis);

// Tests whether the parameter lies on the critical slice using the nonregular limit of the estimator.
ConfidenceSet two_step_ci(const ModelSpec& spec, double estimate, const ProbVector& data, int N, double alpha,
                          Axis axis);

}  // namespace cwpotts

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwpotts/model.hpp"

namespace cwpotts {

struct StationaryPoint {
    double s = 0.0;
    double f_value = 0.0;
    double f2 = 0.0;
};

// Global maximizers of f and of H, with the two orderings used by the limit laws.
struct MaximizerSet {
    std::vector<double> s_values;           // ascending
    std::vector<double> f_values;           // parallel to s_values
    std::vector<ProbVector> vectors;        // all maximizers of H
    std::vector<double> vector_s;           // ray parameter of each vector
    std::vector<std::size_t> ordering_by_first_coord;
    std::vector<std::size_t> ordering_by_p_norm;
};

enum class PhaseTag { Regular, StronglyCritical, WeaklyCritical, SpecialTypeI, SpecialTypeII };

std::string tag_name(PhaseTag tag);

struct PointClass {
    PhaseTag tag = PhaseTag::Regular;
    MaximizerSet witness;
    ModelSpec requested;
    ModelSpec effective;  // differs from requested only when snapped to a landmark
    bool snapped = false;
    std::vector<std::string> warnings;

    bool is_critical() const { return tag == PhaseTag::StronglyCritical || tag == PhaseTag::WeaklyCritical; }
    bool is_special() const { return tag == PhaseTag::SpecialTypeI || tag == PhaseTag::SpecialTypeII; }
    // (beta_c, 0) with x0 tied against the permutations of a positive-s maximizer
    bool is_beta_c_point() const;
};

enum class SpecialType { I, II };

struct SpecialPoint {
    double beta_tilde = 0.0;
    double h_tilde = 0.0;
    double s_pq = 0.0;
    SpecialType type = SpecialType::I;
};

struct CriticalCurveSample {
    double h = 0.0;
    double beta = 0.0;
    double s_low = 0.0;
    double s_high = 0.0;
};

struct Landmarks {
    double beta_c = 0.0;
    SpecialPoint special;
};

struct ClassifyOptions {
    double tol_class = 1e-7;
    double tie_tol = 1e-9;
    double snap_radius = 2.5e-3;
};

std::vector<StationaryPoint> find_stationary_points(const ModelSpec& spec, int grid_cells = 4096);

// Roots of f'' in [0, 1 - 1e-9], ascending.
std::vector<double> f2_roots(const ModelSpec& spec, int grid_cells = 4096);

std::vector<StationaryPoint> global_maximizers_1d(const ModelSpec& spec, double tie_tol = 1e-9);

MaximizerSet full_maximizer_set(const ModelSpec& spec, double tie_tol = 1e-9);
MaximizerSet maximizer_set_from_s(const ModelSpec& spec, const std::vector<double>& s_values);

PointClass classify_point(const ModelSpec& spec, const ClassifyOptions& opts = {});

// sup of f''_{beta,0} over [0, 1 - 1e-9]; value and location.
std::pair<double, double> sup_f2(int p, int q, double beta);

double compute_beta_c(int p, int q);
SpecialPoint compute_special_point(int p, int q);

// Cached per (p, q); thread safe.
const Landmarks& landmarks(int p, int q);

std::optional<CriticalCurveSample> critical_curve_at(int p, int q, double h);
std::vector<CriticalCurveSample> critical_curve(int p, int q, int n_samples);

struct PhaseDiagram {
    int p = 0;
    int q = 0;
    double beta_lo = 0.0, beta_hi = 0.0, h_lo = 0.0, h_hi = 0.0;
    int n_beta = 0, n_h = 0;
    std::vector<PhaseTag> tags;  // index ih * n_beta + ib, cell centers
    Landmarks marks;
    std::vector<CriticalCurveSample> curve;

    double beta_at(int ib) const { return beta_lo + (ib + 0.5) * (beta_hi - beta_lo) / n_beta; }
    double h_at(int ih) const { return h_lo + (ih + 0.5) * (h_hi - h_lo) / n_h; }
};

PhaseDiagram phase_diagram(int p, int q, double beta_lo, double beta_hi, double h_lo, double h_hi, int n_beta,
                           int n_h, const ClassifyOptions& opts = {}, int curve_samples = 200);

}  // namespace cwpotts

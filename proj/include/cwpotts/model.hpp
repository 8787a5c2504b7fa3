#pragma once

#include <array>
#include <span>
#include <vector>

namespace cwpotts {

// Model parameters (p, q, beta, h).
struct ModelSpec {
    int p = 2;
    int q = 2;
    double beta = 0.0;
    double h = 0.0;

    void validate() const;
    ModelSpec with_beta(double b) const { return {p, q, b, h}; }
    ModelSpec with_h(double hh) const { return {p, q, beta, hh}; }
};

// Length-q probability vector.
class ProbVector {
public:
    ProbVector() = default;
    explicit ProbVector(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& vec() const { return values_; }

private:
    std::vector<double> values_;
};

inline constexpr double kBoundaryGuard = 1e-9;
inline constexpr int kMaxOrder = 6;

// f and its derivatives at a single s, orders 0..6.
struct SDerivatives {
    double s = 0.0;
    std::array<double, kMaxOrder + 1> values{};
};

double negative_free_energy(const ModelSpec& spec, std::span<const double> v);

ProbVector x_of_s(int q, double s);
double s_of_x(std::span<const double> v);

// n-th derivative of beta x^p - x log x.
double k_deriv(const ModelSpec& spec, double x, int order);

// n-th derivative of f along the ray; requires 0 <= s <= 1 - 1e-9.
double f_deriv(const ModelSpec& spec, double s, int order);
SDerivatives f_derivatives(const ModelSpec& spec, double s);

// Same formula on the extended ray s in (-1/(q-1), 1), used for data plug-ins.
double f_deriv_extended(const ModelSpec& spec, double s, int order);

double quadratic_form(const ModelSpec& spec, double s, std::span<const double> t);

// Row-major q x q limit covariance at the ray point x_s.
std::vector<double> sigma_matrix(const ModelSpec& spec, double s);

// The direction (1-q, 1, ..., 1).
std::vector<double> u_direction(int q);

// sum_r v_r^p
double p_norm_pow(std::span<const double> v, int p);

}  // namespace cwpotts

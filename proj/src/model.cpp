#include "cwpotts/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cwpotts/error.hpp"

namespace cwpotts {

void ModelSpec::validate() const
{
    require(p >= 2, ErrorCode::InvalidArgument, "p must be >= 2, got " + std::to_string(p));
    require(q >= 2, ErrorCode::InvalidArgument, "q must be >= 2, got " + std::to_string(q));
    require(std::isfinite(beta) && beta >= 0.0, ErrorCode::InvalidArgument, "beta must be finite and >= 0");
    require(std::isfinite(h) && h >= 0.0, ErrorCode::InvalidArgument, "h must be finite and >= 0");
}

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values))
{
    require(!values_.empty(), ErrorCode::Shape, "empty probability vector");
    double total = 0.0;
    for (double v : values_) {
        require(std::isfinite(v) && v >= 0.0, ErrorCode::Domain, "probability vector has a negative or non-finite entry");
        total += v;
    }
    require(std::abs(total - 1.0) <= 1e-12 * static_cast<double>(values_.size()), ErrorCode::Domain,
            "probability vector does not sum to 1");
}

static double ipow(double x, int n)
{
    double r = 1.0;
    for (; n > 0; n >>= 1) {
        if (n & 1)
            r *= x;
        x *= x;
    }
    return r;
}

static double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double p_norm_pow(std::span<const double> v, int p)
{
    double acc = 0.0;
    for (double x : v)
        acc += ipow(x, p);
    return acc;
}

double negative_free_energy(const ModelSpec& spec, std::span<const double> v)
{
    require(static_cast<int>(v.size()) == spec.q, ErrorCode::Shape, "vector length differs from q");
    double ent = 0.0;
    for (double x : v)
        ent += xlogx(x);
    return spec.beta * p_norm_pow(v, spec.p) + spec.h * v[0] - ent;
}

ProbVector x_of_s(int q, double s)
{
    require(q >= 2, ErrorCode::InvalidArgument, "q must be >= 2");
    require(s >= 0.0 && s < 1.0, ErrorCode::Domain, "s must lie in [0, 1)");
    std::vector<double> v(static_cast<std::size_t>(q), (1.0 - s) / q);
    v[0] = (1.0 + (q - 1) * s) / q;
    return ProbVector(std::move(v));
}

double s_of_x(std::span<const double> v)
{
    require(v.size() >= 2, ErrorCode::Shape, "vector needs at least two coordinates");
    for (std::size_t r = 2; r < v.size(); ++r)
        require(std::abs(v[r] - v[1]) <= 1e-9, ErrorCode::Shape, "coordinates 2..q are not equal");
    return 1.0 - static_cast<double>(v.size()) * v[1];
}

double k_deriv(const ModelSpec& spec, double x, int order)
{
    require(x > 0.0, ErrorCode::Domain, "k is evaluated at x <= 0");
    require(order >= 0 && order <= kMaxOrder, ErrorCode::InvalidArgument, "derivative order must be in 0..6");
    const int p = spec.p;
    double poly = 0.0;
    if (order <= p) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j)
            falling *= p - j;
        poly = spec.beta * falling * ipow(x, p - order);
    }
    double ent;
    switch (order) {
    case 0: ent = -x * std::log(x); break;
    case 1: ent = -(std::log(x) + 1.0); break;
    default: {
        // d^n/dx^n (x log x) = (-1)^n (n-2)! / x^{n-1}
        double fact = 1.0;
        for (int j = 2; j <= order - 2; ++j)
            fact *= j;
        const double sign = (order % 2 == 0) ? 1.0 : -1.0;
        ent = -sign * fact / ipow(x, order - 1);
    }
    }
    return poly + ent;
}

static double f_deriv_raw(const ModelSpec& spec, double s, int order)
{
    const int q = spec.q;
    const double a = (1.0 + (q - 1) * s) / q;
    const double b = (1.0 - s) / q;
    const double ca = ipow(static_cast<double>(q - 1) / q, order);
    const double cb = (q - 1) * ipow(-1.0 / q, order);
    double val = ca * k_deriv(spec, a, order) + cb * k_deriv(spec, b, order);
    if (order == 0)
        val += spec.h * a;
    else if (order == 1)
        val += spec.h * (q - 1) / q;
    return val;
}

double f_deriv(const ModelSpec& spec, double s, int order)
{
    require(s >= 0.0 && s <= 1.0 - kBoundaryGuard, ErrorCode::Domain, "s must lie in [0, 1 - 1e-9]");
    return f_deriv_raw(spec, s, order);
}

double f_deriv_extended(const ModelSpec& spec, double s, int order)
{
    require(s > -1.0 / (spec.q - 1) && s <= 1.0 - kBoundaryGuard, ErrorCode::Domain,
            "s must lie in (-1/(q-1), 1 - 1e-9]");
    return f_deriv_raw(spec, s, order);
}

SDerivatives f_derivatives(const ModelSpec& spec, double s)
{
    SDerivatives d;
    d.s = s;
    for (int n = 0; n <= kMaxOrder; ++n)
        d.values[static_cast<std::size_t>(n)] = f_deriv(spec, s, n);
    return d;
}

double quadratic_form(const ModelSpec& spec, double s, std::span<const double> t)
{
    require(static_cast<int>(t.size()) == spec.q, ErrorCode::Shape, "t has length different from q");
    const double total = std::accumulate(t.begin(), t.end(), 0.0);
    require(std::abs(total) <= 1e-10, ErrorCode::Domain, "t is not in the zero-sum hyperplane");
    const int q = spec.q;
    double sq = 0.0, sum = 0.0;
    for (std::size_t r = 1; r < t.size(); ++r) {
        sq += t[r] * t[r];
        sum += t[r];
    }
    return k_deriv(spec, (1.0 - s) / q, 2) * sq + k_deriv(spec, (1.0 + (q - 1) * s) / q, 2) * sum * sum;
}

std::vector<double> sigma_matrix(const ModelSpec& spec, double s)
{
    const int q = spec.q;
    const double f2 = f_deriv(spec, s, 2);
    require(f2 < 0.0, ErrorCode::Classification, "sigma_matrix needs f''(s) < 0");
    const double rho = k_deriv(spec, (1.0 + (q - 1) * s) / q, 2) / k_deriv(spec, (1.0 - s) / q, 2);
    const double scale = 1.0 / (-static_cast<double>(q) * q / (q - 1) * f2);
    const auto n = static_cast<std::size_t>(q);
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v;
            if (i == 0 && j == 0)
                v = q - 1;
            else if (i == 0 || j == 0)
                v = -1.0;
            else if (i == j)
                v = 1.0 + (q - 2) * rho;
            else
                v = -rho;
            m[i * n + j] = scale * v;
        }
    }
    return m;
}

std::vector<double> u_direction(int q)
{
    std::vector<double> u(static_cast<std::size_t>(q), 1.0);
    u[0] = 1.0 - q;
    return u;
}

}  // namespace cwpotts

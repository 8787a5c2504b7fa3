#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwpotts/phase.hpp"
#include "cwpotts/rng.hpp"

namespace cwpotts {

enum class LawKind {
    Normal,
    HalfNormalPlus,
    HalfNormalMinus,
    QuarticTilt,
    SexticTilt,
    AtomMixture,
    GeneralizedChiSq,
    Composed,
    SquaredTilt,
    Affine,
};

std::string kind_name(LawKind kind);

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;
    double richardson_error = 0.0;
};

namespace detail {

class LawImpl {
public:
    virtual ~LawImpl() = default;
    virtual LawKind kind() const = 0;
    virtual double pdf(double x) const = 0;  // density of the continuous part
    virtual double cdf(double x) const = 0;
    virtual double cdf_left(double x) const { return cdf(x); }
    virtual double mean() const = 0;
    virtual double second_moment() const = 0;
    virtual double sample(Rng& rng) const = 0;
    virtual double quantile(double u) const = 0;
    virtual double normalization() const { return 1.0; }
    // Independent quadrature of the continuous density over its support.
    virtual double pdf_integral() const = 0;
    virtual double atom_mass() const { return 0.0; }
    virtual GridSpec grid() const = 0;
    virtual nlohmann::json params() const = 0;
};

}  // namespace detail

// Immutable one-dimensional law; cheap to copy.
class ScalarLaw {
public:
    explicit ScalarLaw(std::shared_ptr<const detail::LawImpl> impl) : impl_(std::move(impl)) {}

    LawKind kind() const { return impl_->kind(); }
    double pdf(double x) const { return impl_->pdf(x); }
    double cdf(double x) const { return impl_->cdf(x); }
    double cdf_left(double x) const { return impl_->cdf_left(x); }
    double mean() const { return impl_->mean(); }
    double second_moment() const { return impl_->second_moment(); }
    double variance() const { return second_moment() - mean() * mean(); }
    double sample(Rng& rng) const { return impl_->sample(rng); }
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
    double quantile(double u) const { return impl_->quantile(u); }
    double normalization() const { return impl_->normalization(); }
    double pdf_integral() const { return impl_->pdf_integral(); }
    double atom_mass() const { return impl_->atom_mass(); }
    // continuous mass plus all atoms (including the ones at +-infinity)
    double total_mass() const { return pdf_integral() + atom_mass(); }
    GridSpec grid() const { return impl_->grid(); }

    nlohmann::json to_json() const;
    // rows of (x, pdf, cdf) over the law's grid range
    std::vector<std::array<double, 3>> density_table(int points) const;

    const detail::LawImpl& impl() const { return *impl_; }

private:
    std::shared_ptr<const detail::LawImpl> impl_;
};

struct MixtureComponent {
    double weight = 0.0;
    ScalarLaw law;
};

struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

ScalarLaw normal_law(double mean, double sd);
ScalarLaw half_normal_law(double sd, bool positive);
// density prop. to exp(leading * x^degree + linear * x), degree 4 or 6, leading < 0
ScalarLaw tilted_law(int degree, double leading, double linear, int points = 4097);
ScalarLaw squared_law(const ScalarLaw& base, double scale);
ScalarLaw affine_law(const ScalarLaw& base, double scale, double shift);
ScalarLaw mixture_law(std::vector<MixtureComponent> components, std::vector<Atom> atoms, double mass_neg_inf,
                      double mass_pos_inf);
// scale * sum_i lambda_i Z_i^2 over the nonzero eigenvalues
ScalarLaw generalized_chi_square(std::vector<double> eigenvalues, double scale);
// cdf(t) = outer(-mean of tilted_law(degree, leading, slope * t)), outer the zero-tilt law
ScalarLaw composed_law(int degree, double leading, double slope);
// The same composition without the sign flip on the inner mean.
double composed_cdf_as_stated(int degree, double leading, double slope, double t);

// Quartic-tilt law of T at a type-I special point.
ScalarLaw quartic_law(const PointClass& cls, double beta_bar, double h_bar);
// density prop. to exp(-32/15 x^6 - h_bar x)
ScalarLaw sextic_law(double h_bar);

struct VectorLaw {
    enum class Kind { GaussianSimplex, MixtureGaussianSimplex, ProductTV };
    Kind kind = Kind::GaussianSimplex;
    int dim = 0;
    std::vector<double> weights;
    std::vector<std::vector<double>> means;        // each length dim
    std::vector<std::vector<double>> covariances;  // each dim x dim row-major
    std::shared_ptr<ScalarLaw> t_law;              // ProductTV only

    int rank(std::size_t component = 0, double tol = 1e-10) const;
    // law of <X, direction>
    ScalarLaw projection(std::span<const double> direction) const;
    std::vector<double> sample(Rng& rng) const;
};

std::string vector_kind_name(VectorLaw::Kind kind);

VectorLaw gaussian_limit_regular(const PointClass& cls, double beta_bar, double h_bar);
VectorLaw critical_gaussian_mixture(const PointClass& cls);
VectorLaw v_limit_covariance(const PointClass& cls);

// Sigma at the ray point s, permuted so the large coordinate sits at `position`.
std::vector<double> sigma_for_vector(const ModelSpec& spec, double s, std::size_t position);

// tau-weights in witness vector order
std::vector<double> mixture_weights(const PointClass& cls);

struct MonteCarloEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

MonteCarloEstimate gamma1(const ModelSpec& spec, std::size_t draws = 1'000'000, std::uint64_t seed = 20240601);
double alpha_constant(const ModelSpec& spec);
double gamma2(int points = 4097);

ScalarLaw hhat_limit(const PointClass& cls);
ScalarLaw bhat_limit(const PointClass& cls);
ScalarLaw norm_p_limit(const PointClass& cls, double beta_bar);

double ks_distance(std::span<const double> samples, const ScalarLaw& law);

}  // namespace cwpotts

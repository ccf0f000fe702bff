#pragma once

#include "annmoc/estimator.hpp"
#include "annmoc/quadrature.hpp"

#include <functional>
#include <optional>
#include <span>

namespace annmoc {

/// A coefficient of x that remembers when it is constant, so attenuation
/// factors can use the closed form sigma * ds.
class Coefficient {
  public:
    Coefficient(double value = 0.0) : constant_(value), fn_([value](double) { return value; }) {}  // NOLINT
    Coefficient(std::function<double(double)> fn) : fn_(std::move(fn)) {}                          // NOLINT

    double operator()(double x) const { return fn_(x); }
    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const { return *constant_; }

  private:
    std::optional<double> constant_;
    std::function<double(double)> fn_;
};

using Source = std::function<double(double x, double mu)>;

/// Steady one-speed slab problem with isotropic scattering:
///   mu dI/dx + sigma_t I = sigma_s/2 int I dmu' + q(x, mu)   on (a, b)
///   I(a, mu > 0) = I_a,  I(b, mu < 0) = I_b.
struct TransportProblem {
    double a = 0.0;
    double b = 1.0;
    Coefficient sigma_t{1.0};
    Coefficient sigma_s{0.0};
    Source q = [](double, double) { return 0.0; };
    double inflow_a = 0.0;
    double inflow_b = 0.0;
};

/// Throws ConfigError unless a < b, the inflows are nonnegative, and at
/// `checks` uniformly spaced points the coefficients are finite with
/// 0 <= sigma_s <= sigma_t.
void validate(const TransportProblem& problem, std::size_t checks = 101);

/// Position on a characteristic: x = x_in + s * mu, x_in the inflow boundary
/// (a for mu > 0, b for mu < 0).
struct CharacteristicPoint {
    double x = 0.0;
    double mu = 0.0;
    double s = 0.0;
};

/// Inflow boundary for direction mu.
double inflow_boundary(double mu, const TransportProblem& problem);

/// Throws ConfigError for mu == 0 or x outside [a, b].
CharacteristicPoint path_length(double x, double mu, const TransportProblem& problem);

/// int_{s_lo}^{s_hi} sigma_t(x(s)) ds along direction mu from its inflow
/// boundary. Exact for constant sigma_t.
double optical_depth(double s_lo, double s_hi, double mu, const TransportProblem& problem, double tol = 1e-12);

struct MocOptions {
    double tol = 1e-9;
    /// Source contributions attenuated by more than this optical depth are
    /// dropped (e^-40 ~ 4e-18); applies to constant sigma_t only.
    double depth_cutoff = 40.0;
    /// Initial panel thickness, in optical depths, for the adaptive integral.
    double panel_depth = 4.0;
    IntegrationOptions integration{};
};

/// Directional intensity at `point` from the integrating-factor solution
///   I = I_in e^{-tau(0,s)} + int_0^s [sigma_s psi(x(s')) + q(x(s'), mu)] e^{-tau(s',s)} ds'
/// with psi taken from `estimator`. Throws IntegrationError when the
/// adaptive integral cannot reach `options.tol`.
double moc_intensity(const CharacteristicPoint& point, const FluxEstimator& estimator,
                     const TransportProblem& problem, const MocOptions& options = {});

/// Half the quadrature-weighted sum of directional intensities.
double average_flux(std::span<const double> intensities, const AngularQuadrature& quad);

}  // namespace annmoc

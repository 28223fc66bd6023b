#pragma once

#include <cstddef>
#include <functional>

#include "opinion/histogram.hpp"

namespace opinion {

enum class Population
{
    Follower,
    Leader
};

// Weighted follower noise level (var_ff c_FL + var_fl c_F rho)/(c_FL + c_F rho).
double b_follower(double var_ff, double var_fl, double c_f, double c_fl, double rho);

// var_ll rho kappa / (2 c_L (psi + mu)).
double b_leader(double var_ll, double rho, double kappa, double c_l, double psi, double mu);

// Closed form of int_0^w (z - w_d)/(1 - z^2)^2 dz for |w| < 1:
// (w^2 - w_d w)/(2 (1 - w^2)) - (w_d/2) artanh(w).
double steady_exponent(double w, double w_d);

// (1 - w^2)^-2 exp(-(2/b) steady_exponent(w, w_d)); throws for |w| >= 1.
double steady_unnormalized(double w, double w_d, double b);

//---------------------------------------------------------------------------//
/*!
 * Stationary density with unit diffusion shape 1 - w^2, normalized so that it
 * integrates to `target_mass` on [-1, 1] (the density itself, not D^2 f).
 */
class SteadyDensity
{
  public:
    Population population() const noexcept { return population_; }
    double target() const noexcept { return w_d_; }
    double b() const noexcept { return b_; }
    double target_mass() const noexcept { return mass_; }
    double log_a() const noexcept { return log_a_; }
    double a() const;
    // Upper bound on the mass outside [-1 + kEdge, 1 - kEdge].
    double tail_bound() const noexcept { return tail_bound_; }

    // Density value; zero outside the open interval.
    double operator()(double w) const noexcept;

    // Integral over [lo, hi] clipped to the truncated support.
    double integral(double lo, double hi) const;

    static constexpr double kEdge = 1e-8;

    friend SteadyDensity normalize(double w_d, double b, double target_mass, Population population);

  private:
    SteadyDensity() = default;

    Population population_ = Population::Follower;
    double w_d_ = 0.0;
    double b_ = 1.0;
    double mass_ = 1.0;
    double log_a_ = 0.0;
    double tail_bound_ = 0.0;
};

/*!
 * Normalizes the closed form by adaptive Gauss-Kronrod quadrature on
 * [-1 + 1e-8, 1 - 1e-8], split at w_d. The discarded tails are bounded by
 * monotonicity of the density near the endpoints. Throws std::invalid_argument
 * for w_d outside (-1, 1) or b <= 0, and std::runtime_error if the
 * quadrature does not reach its tolerance.
 */
SteadyDensity normalize(double w_d, double b, double target_mass, Population population = Population::Follower);

/*!
 * max over `points` grid nodes on [-1 + 1e-4, 1 - 1e-4] of
 * |(w_d - w) f - (b/2) d/dw[(1 - w^2)^2 f]|, the derivative taken by a
 * centered difference of step fd_ratio * grid spacing.
 */
double stationarity_residual(SteadyDensity const& density, std::size_t points = 1000, double fd_ratio = 0.01);

// Same check for an arbitrary candidate density f with parameters (w_d, b).
double stationarity_residual(std::function<double(double)> const& f,
                             double w_d,
                             double b,
                             std::size_t points = 1000,
                             double fd_ratio = 0.01);

// q-quantile of the normalized law f / target_mass.
double quantile(SteadyDensity const& density, double q);

// Sum over bins of |hist - cell average of density| * bin width. Throws if the
// masses differ by more than 1e-6.
double l1_distance(DensityTable const& hist, SteadyDensity const& density);
double l1_distance(DensityTable const& lhs, DensityTable const& rhs);

// Cell averages of the density on the histogram's bins.
DensityTable cell_averages(SteadyDensity const& density, std::size_t bins);

}  // namespace opinion

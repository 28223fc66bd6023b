#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "opinion/core.hpp"

namespace opinion {

//---------------------------------------------------------------------------//
/*!
 * Linear mean-opinion system of one leader family:
 *
 *   dm_F/dt = a (m_L - m_F)
 *   dm_L/dt = b [psi (w_d - m_L) + mu (m_F - m_L)]
 *
 * In the eps -> 0 limit a = 1/c_FL hat and b = 4/(c_L hat kappa); before the
 * limit a = alpha eta~_FL and b = beta eta~_L.
 */
struct MeanSystemParams
{
    double a_rate = 0.0;
    double b_rate = 0.0;
    double psi = 1.0;
    double target = 0.0;

    double mu() const noexcept { return 1.0 - psi; }
};

std::pair<double, double> scaled_mean_rhs(double m_f, double m_l, MeanSystemParams const& p) noexcept;

// Limit coefficients for family p.
MeanSystemParams scaled_mean_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p = 0);

//---------------------------------------------------------------------------//
struct PreLimitParams
{
    double alpha = 0.0;
    double beta = 0.0;
    double eta_fl_tilde = 0.0;  //!< rho * eta_FL
    double eta_l_tilde = 0.0;   //!< rho * eta_L
    double psi = 1.0;
    double target = 0.0;

    double mu() const noexcept { return 1.0 - psi; }
    MeanSystemParams as_mean_system() const noexcept
    {
        return {alpha * eta_fl_tilde, beta * eta_l_tilde, psi, target};
    }
};

PreLimitParams prelimit_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p = 0);

struct Eigenvalues
{
    double lambda1 = 0.0;  //!< slow mode (closer to zero)
    double lambda2 = 0.0;  //!< fast mode
    double discriminant = 0.0;
};

/*!
 * lambda_{1,2} = -s/2 +- sqrt(s^2 - 4 psi a b)/2 with s = a + b,
 * a = alpha eta~_FL, b = beta eta~_L. The discriminant is evaluated as
 * (a - b)^2 + 4 mu a b and the slow root as psi a b / lambda2, both free
 * of cancellation.
 */
Eigenvalues prelimit_eigenvalues(PreLimitParams const& p);

/*!
 * Exact solution of the pre-limit mean system from (m_F0, m_L0).
 *
 * With y = m - w_d the modes are y_F = D_i e^{lambda_i t} and
 * y_L = D_i (1 + lambda_i/a) e^{lambda_i t}; D_1, D_2 come from the 2x2
 * solve on the initial data. Throws std::domain_error when lambda1 ==
 * lambda2 (use integrate() instead).
 */
std::pair<double, double> analytic_means(double t, double m_f0, double m_l0, PreLimitParams const& p);

/*!
 * Mean system with M families sharing one follower population. State is
 * (m_F, m_L_1, ..., m_L_M).
 */
std::vector<double> multi_mean_rhs(std::vector<double> const& state, std::vector<MeanSystemParams> const& families);

//---------------------------------------------------------------------------//
// Averages of squared diffusion shapes: followers over f_F, leaders per
// leader (i.e. divided by the family mass).
struct DiffusionIntegrals
{
    double follower = 0.0;         //!< <D^2>_F
    double follower_leader = 0.0;  //!< <D hat^2>_F
    double leader = 0.0;           //!< <D tilde^2>_L
};

struct EnergyParams
{
    double c_f = 1.0;
    double c_fl = 0.005;  //!< c_FL = c_FL hat * rho
    double c_l = 0.005;
    double rho = 0.05;
    double kappa = 100.0;
    double var_ff = 0.0;
    double var_fl = 0.0;
    double var_ll = 0.0;
    double psi = 1.0;
    double target = 0.0;

    double mu() const noexcept { return 1.0 - psi; }
};

EnergyParams energy_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p = 0);

/*!
 * eps -> 0 second-moment system:
 *
 *   dE_F/dt = -2/c_F (E_F - m_F^2) + 2 rho/c_FL (m_F m_L - E_F)
 *             + var_ff/c_F <D^2> + var_fl rho/c_FL <D hat^2>
 *   dE_L/dt = -2 rho/c_L (E_L - m_L^2) - 4 rho/(c_L kappa) (E_L + m_L^2)
 *             + 8 rho/(c_L kappa) (psi w_d + mu m_F) m_L + var_ll rho/c_L <D tilde^2>
 *
 * The diffusion averages are inputs since they are not functions of the
 * moments for D = 1 - w^2.
 */
std::pair<double, double> energy_rhs(double e_f,
                                     double e_l,
                                     double m_f,
                                     double m_l,
                                     DiffusionIntegrals const& integrals,
                                     EnergyParams const& p) noexcept;

//---------------------------------------------------------------------------//
using OdeRhs = std::function<std::vector<double>(double, std::vector<double> const&)>;

struct Trajectory
{
    std::vector<double> t;
    std::vector<std::vector<double>> y;

    // Linear interpolation between stored steps; clamps outside the span.
    std::vector<double> at(double time) const;
};

/*!
 * Classical fixed-step fourth-order Runge-Kutta on [t0, t1]. The last step
 * is shortened to land on t1.
 */
Trajectory integrate(OdeRhs const& rhs, std::vector<double> y0, double t0, double t1, double dt);

}  // namespace opinion

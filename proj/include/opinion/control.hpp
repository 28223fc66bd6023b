#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "opinion/core.hpp"

namespace opinion {

/// State seen by the instantaneous controller of one interacting leader pair.
struct ControlInput
{
    double leader = 0.0;    //!< first leader opinion
    double partner = 0.0;   //!< second leader opinion
    double follower_mean = 0.0;
    LeaderStrategy strategy;
    double alpha = 0.01;
    double beta = 0.0;
    CompromiseKernel kernel;  //!< leader-leader compromise R
};

/*!
 * Explicit feedback control of a leader pair. Returns the increment 2*alpha*u
 * added to both leaders:
 *
 *   -(beta/2) sum_p [psi (w_p - w_d) + mu (w_p - m_F)]
 *   -(alpha beta/2) (R(w, v) - R(v, w)) (v - w)
 *
 * The follower mean is the one measured before the interaction.
 */
double feedback_control(ControlInput const& in) noexcept;

// beta = 4 alpha^2 / (nu + 4 alpha^2), the unscaled form.
double control_beta(double alpha, double nu);

/*!
 * Discrete cost of a pair after interaction:
 * alpha * (psi/2 sum (w_p - w_d)^2 + mu/2 sum (w_p - m_F)^2 + nu u^2).
 */
double binary_cost(double u,
                   double post_leader,
                   double post_partner,
                   double follower_mean,
                   LeaderStrategy const& strategy,
                   double alpha,
                   double nu) noexcept;

// Noise-free post-interaction pair for a given control value u.
std::pair<double, double> controlled_pair(ControlInput const& in, double u) noexcept;

struct OptimalityCheck
{
    double u_closed = 0.0;   //!< closed-form u
    double u_grid = 0.0;     //!< grid argmin
    double u_refined = 0.0;  //!< Brent refinement around the grid argmin
    double grid_spacing = 0.0;
    double gap = 0.0;          //!< |u_closed - u_grid|
    double refined_gap = 0.0;  //!< |u_closed - u_refined|
};

/*!
 * Brute-force check of the closed form: minimizes binary_cost composed with
 * the noise-free leader update over a uniform grid, then refines.
 *
 * The default bracket is symmetric with half-width (beta/alpha)(2 + alpha),
 * an a priori bound on |u| that does not use the closed form.
 * Throws std::invalid_argument for resolution < 1000 and std::runtime_error
 * when the grid minimum sits on the bracket boundary.
 */
OptimalityCheck verify_optimality(ControlInput const& in,
                                  double nu,
                                  std::size_t resolution = 2000,
                                  std::optional<std::pair<double, double>> bracket = {});

}  // namespace opinion

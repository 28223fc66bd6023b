#pragma once

#include <cmath>
#include <random>
#include <utility>

#include "opinion/control.hpp"
#include "opinion/core.hpp"

namespace opinion {

using Rng = std::mt19937_64;

//---------------------------------------------------------------------------//
// Zero-mean symmetric uniform noise with the given (already scaled) variance.
struct NoiseSpec
{
    double variance = 0.0;

    // Half-width a of the uniform law on [-a, a]; variance = a^2 / 3.
    double support() const noexcept { return std::sqrt(3.0 * variance); }
};

double sample_noise(NoiseSpec const& spec, Rng& rng);

//---------------------------------------------------------------------------//
// Binary rules. None of them clamp; callers reject out-of-interval results.

inline std::pair<double, double> follower_follower(double w,
                                                   double v,
                                                   double theta1,
                                                   double theta2,
                                                   CompromiseKernel const& p,
                                                   DiffusionShape const& d,
                                                   double alpha) noexcept
{
    return {w + alpha * p(w, v) * (v - w) + theta1 * d(w),
            v + alpha * p(v, w) * (w - v) + theta2 * d(v)};
}

// The leader is passed through unchanged.
inline std::pair<double, double> follower_leader(double w,
                                                 double leader,
                                                 double theta,
                                                 CompromiseKernel const& s,
                                                 DiffusionShape const& d_hat,
                                                 double alpha) noexcept
{
    return {w + alpha * s(w, leader) * (leader - w) + theta * d_hat(w), leader};
}

inline std::pair<double, double> leader_leader(double w,
                                               double v,
                                               double theta1,
                                               double theta2,
                                               CompromiseKernel const& r,
                                               DiffusionShape const& d_tilde,
                                               double alpha,
                                               double beta,
                                               double follower_mean,
                                               LeaderStrategy const& strategy) noexcept
{
    ControlInput in{w, v, follower_mean, strategy, alpha, beta, r};
    double const control = feedback_control(in);
    return {w + alpha * r(w, v) * (v - w) + control + theta1 * d_tilde(w),
            v + alpha * r(v, w) * (w - v) + control + theta2 * d_tilde(v)};
}

//---------------------------------------------------------------------------//
struct CertificateInput
{
    CompromiseKernel leader_kernel;            //!< R
    DiffusionShape leader_diffusion;           //!< D tilde
    DiffusionShape follower_leader_diffusion;  //!< D hat
    DiffusionShape follower_diffusion;         //!< D
    double alpha = 0.01;
    double beta = 0.0;
    NoiseSpec leader_noise;
    NoiseSpec follower_leader_noise;
    NoiseSpec follower_noise;
};

/*!
 * Sufficient conditions for the binary rules to keep opinions inside I.
 *
 * Leaders: alpha r >= beta/2 and the noise support within
 * [-d_-(1 - beta/2), d_+(1 - beta/2)]. Follower-leader: noise support within
 * [-(1 - alpha) K_-, (1 - alpha) K_+]. The follower-follower check uses the
 * same window as the follower-leader one with D in place of D hat.
 */
struct BoundCertificate
{
    double r = 0.0;
    double d_minus = 0.0;
    double d_plus = 0.0;
    double k_minus = 0.0;
    double k_plus = 0.0;

    bool control_ok = false;
    bool leader_noise_ok = false;
    bool follower_leader_noise_ok = false;
    bool follower_noise_ok = false;

    bool satisfied() const noexcept
    {
        return control_ok && leader_noise_ok && follower_leader_noise_ok && follower_noise_ok;
    }
};

BoundCertificate bound_certificate(CertificateInput const& in);

}  // namespace opinion

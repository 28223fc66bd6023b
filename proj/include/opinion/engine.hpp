#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opinion/core.hpp"
#include "opinion/histogram.hpp"
#include "opinion/interactions.hpp"

namespace opinion {

//---------------------------------------------------------------------------//
// Model description
//---------------------------------------------------------------------------//

struct FamilyKernels
{
    CompromiseKernel follower_kernel;  //!< S, follower pulled toward leader
    CompromiseKernel leader_kernel;    //!< R, leader-leader compromise

    friend bool operator==(FamilyKernels const&, FamilyKernels const&) = default;
};

/*!
 * Everything that stays fixed during a run: scaled constants, the
 * follower-follower kernel, the three diffusion shapes and per-family kernels.
 */
struct Model
{
    ScaledParams params;
    CompromiseKernel follower_kernel;          //!< P
    DiffusionShape follower_diffusion;         //!< D
    DiffusionShape follower_leader_diffusion;  //!< D hat
    DiffusionShape leader_diffusion;           //!< D tilde
    std::vector<FamilyKernels> families;

    // Certificate for family p, using that family's R.
    BoundCertificate certificate(std::size_t p) const;
};

struct LeaderFamily
{
    std::vector<double> leaders;
    LeaderStrategy strategy;
};

struct OpinionEnsemble
{
    std::vector<double> followers;
    std::vector<LeaderFamily> families;
};

//---------------------------------------------------------------------------//
// Time stepping
//---------------------------------------------------------------------------//

/*!
 * Time step and per-agent interaction probabilities. The fastest process is
 * saturated at probability one: dt = eps * min(c_F, c_FL_p hat, c_L_p hat).
 */
struct StepPlan
{
    double dt = 0.0;
    double p_ff = 0.0;
    std::vector<double> p_fl;
    std::vector<double> p_ll;
};

StepPlan plan_step(ScaledParams const& params);

struct RejectionCounter
{
    std::uint64_t attempted = 0;
    std::uint64_t rejected = 0;

    double fraction() const noexcept
    {
        return attempted == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(attempted);
    }
    RejectionCounter& operator+=(RejectionCounter const& o) noexcept
    {
        attempted += o.attempted;
        rejected += o.rejected;
        return *this;
    }
};

struct InteractionStats
{
    RejectionCounter follower_follower;
    RejectionCounter follower_leader;
    RejectionCounter leader_leader;

    RejectionCounter total() const noexcept
    {
        RejectionCounter t = follower_follower;
        t += follower_leader;
        t += leader_leader;
        return t;
    }
};

// Index buffers reused across steps for pair sampling.
struct StepWorkspace
{
    std::vector<std::uint32_t> follower_order;
    std::vector<std::vector<std::uint32_t>> leader_order;
};

/*!
 * One Monte Carlo step of the coupled Boltzmann system, in place.
 *
 * Sub-rounds run follower-follower, then follower-leader per family, then
 * leader-leader per family. Pairs are disjoint within a sub-round; an odd
 * agent out idles. Any interaction producing an opinion outside [-1, 1] is
 * rejected and both participants keep their previous opinions. The follower
 * mean fed to the controller is measured once, before the first sub-round.
 */
void mc_step(OpinionEnsemble& ens,
             StepPlan const& plan,
             Model const& model,
             Rng& rng,
             StepWorkspace& workspace,
             InteractionStats& stats);

//---------------------------------------------------------------------------//
// Statistics
//---------------------------------------------------------------------------//

struct EmpiricalMoments
{
    double t = 0.0;
    double m_f = 0.0;
    double e_f = 0.0;
    std::vector<double> m_l;
    std::vector<double> e_l;
    std::vector<double> psi;
};

// Throws std::invalid_argument if any population is empty.
EmpiricalMoments empirical_moments(OpinionEnsemble const& ens, double t);

double mean(std::span<double const> values);

/*!
 * psi_p = 1/2 frac{|w - w_d| <= delta} + 1/2 frac{|w - m_L| <= delta_bar}
 * over the followers, with m_L the family's current mean. Non-adaptive
 * strategies are returned unchanged.
 */
LeaderStrategy adaptive_strategy_update(OpinionEnsemble const& ens, std::size_t family);

//---------------------------------------------------------------------------//
// Initial data
//---------------------------------------------------------------------------//

/*!
 * Initial opinion law. Normal and Gamma are truncated to [-1, 1] by
 * resampling; Gamma(shape, scale) is shifted by -1 before truncation.
 */
class InitialLaw
{
  public:
    enum class Kind
    {
        Uniform,
        Normal,
        Gamma,
        Point
    };

    static InitialLaw uniform(double lo, double hi);
    static InitialLaw normal(double mean, double variance);
    static InitialLaw gamma(double shape, double scale);
    static InitialLaw point(double value);

    Kind kind() const noexcept { return kind_; }
    double first() const noexcept { return a_; }
    double second() const noexcept { return b_; }
    std::string to_string() const;

    friend bool operator==(InitialLaw const&, InitialLaw const&) = default;

  private:
    InitialLaw(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_ = Kind::Point;
    double a_ = 0.0;
    double b_ = 0.0;
};

std::vector<double> init_sampler(InitialLaw const& law, std::size_t n, Rng& rng);

// N_L_p = round(rho_p * N_F / (1 - sum rho)).
std::vector<std::size_t> leader_counts(std::size_t n_followers, std::vector<double> const& masses);

// Initial sampling and the dynamics draw from separate streams.
enum class RngStream : std::uint32_t
{
    Dynamics = 0,
    Initial = 1
};

// Independent stream for (seed, replica, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t replica = 0, RngStream stream = RngStream::Dynamics);

//---------------------------------------------------------------------------//
// Whole runs
//---------------------------------------------------------------------------//

class CertificateError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct RunOptions
{
    double horizon = 1.0;
    std::vector<double> checkpoints;
    std::size_t bins = 100;
    std::size_t moments_stride = 1;  //!< record every k-th step (plus the last)
};

struct Snapshot
{
    double t = 0.0;
    DensityTable followers;
    std::vector<DensityTable> families;
};

struct RunResult
{
    StepPlan plan;
    std::vector<EmpiricalMoments> moments;
    std::vector<double> rejection_fraction;  //!< cumulative, aligned with moments
    std::vector<Snapshot> snapshots;
    InteractionStats stats;
    OpinionEnsemble final_state;
};

// Densities of every population; families carry their mass.
Snapshot take_snapshot(OpinionEnsemble const& ens, ScaledParams const& params, std::size_t bins, double t);

/*!
 * Runs from `initial` to the horizon. Checks every family's bound certificate
 * first and throws CertificateError if one fails. Adaptive strategies are
 * updated before each step. Deterministic in (initial, model, seed, replica).
 */
RunResult run(OpinionEnsemble initial,
              Model const& model,
              RunOptions const& options,
              std::uint64_t seed,
              std::uint64_t replica = 0);

}  // namespace opinion

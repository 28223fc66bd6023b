#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace opinion {

// Opinions live in I = [-1, 1].
inline constexpr double kOpinionMin = -1.0;
inline constexpr double kOpinionMax = 1.0;

constexpr bool in_interval(double w) noexcept { return w >= kOpinionMin && w <= kOpinionMax; }

//---------------------------------------------------------------------------//
/*!
 * Compromise function weighting how strongly an agent moves toward its
 * partner. Closed set of kinds so that bound certificates can use exact
 * minima.
 */
class CompromiseKernel
{
  public:
    enum class Kind
    {
        Constant,
        BoundedConfidence
    };

    CompromiseKernel() = default;

    // K(a, b) = level for every pair
    static CompromiseKernel constant(double level);
    // K(a, b) = 1 if |a - b| <= threshold, else 0
    static CompromiseKernel bounded_confidence(double threshold);

    double operator()(double a, double b) const noexcept
    {
        if (kind_ == Kind::Constant)
            return value_;
        double diff = a - b;
        return (diff <= value_ && -diff <= value_) ? 1.0 : 0.0;
    }

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return value_; }

    // Exact minimum over I x I.
    double minimum() const noexcept;
    bool symmetric() const noexcept { return true; }
    bool is_unit() const noexcept { return kind_ == Kind::Constant && value_ == 1.0; }

    std::string to_string() const;

    friend bool operator==(CompromiseKernel const&, CompromiseKernel const&) = default;

  private:
    CompromiseKernel(Kind kind, double value) : kind_(kind), value_(value) {}

    Kind kind_ = Kind::Constant;
    double value_ = 1.0;
};

inline double eval_kernel(CompromiseKernel const& k, double a, double b) noexcept
{
    return k(a, b);
}

//---------------------------------------------------------------------------//
/*!
 * Local weight of the diffusion term, D: I -> [0, 1].
 */
class DiffusionShape
{
  public:
    enum class Kind
    {
        None,
        Constant,
        QuadraticCap  //!< D(w) = 1 - w^2
    };

    DiffusionShape() = default;

    static DiffusionShape none() { return DiffusionShape(Kind::None, 0.0); }
    static DiffusionShape constant(double level);
    static DiffusionShape quadratic_cap() { return DiffusionShape(Kind::QuadraticCap, 0.0); }

    double operator()(double w) const noexcept
    {
        switch (kind_)
        {
            case Kind::None:
                return 0.0;
            case Kind::Constant:
                return level_;
            case Kind::QuadraticCap:
                return 1.0 - w * w;
        }
        return 0.0;
    }

    Kind kind() const noexcept { return kind_; }
    double level() const noexcept { return level_; }

    // Exact inf over {w in I : D(w) != 0} of (1 - w)/D(w) and (1 + w)/D(w).
    // +inf when D vanishes identically.
    double upper_room() const noexcept;
    double lower_room() const noexcept;

    std::string to_string() const;

    friend bool operator==(DiffusionShape const&, DiffusionShape const&) = default;

  private:
    DiffusionShape(Kind kind, double level) : kind_(kind), level_(level) {}

    Kind kind_ = Kind::None;
    double level_ = 0.0;
};

//---------------------------------------------------------------------------//
struct AdaptiveWindows
{
    double delta = 0.5;      //!< half-width around the target
    double delta_bar = 0.5;  //!< half-width around the family mean

    friend bool operator==(AdaptiveWindows const&, AdaptiveWindows const&) = default;
};

/*!
 * Leader cost weights: psi pulls toward the target, mu = 1 - psi toward the
 * follower mean. mu is never stored.
 */
class LeaderStrategy
{
  public:
    LeaderStrategy() = default;
    LeaderStrategy(double psi, double target, std::optional<AdaptiveWindows> adaptive = {});

    double psi() const noexcept { return psi_; }
    double mu() const noexcept { return 1.0 - psi_; }
    double target() const noexcept { return target_; }
    std::optional<AdaptiveWindows> const& adaptive() const noexcept { return adaptive_; }
    bool is_adaptive() const noexcept { return adaptive_.has_value(); }

    // Copy with a new psi; used by the adaptive update.
    LeaderStrategy with_psi(double psi) const;

    friend bool operator==(LeaderStrategy const&, LeaderStrategy const&) = default;

  private:
    double psi_ = 0.5;
    double target_ = 0.0;
    std::optional<AdaptiveWindows> adaptive_;
};

//---------------------------------------------------------------------------//
// Per-family interaction constants in compact notation (c_hat = c / rho).
struct FamilyConstants
{
    double c_fl_hat = 0.1;
    double c_l_hat = 0.1;
    double mass = 0.05;

    friend bool operator==(FamilyConstants const&, FamilyConstants const&) = default;
};

inline constexpr double kDefaultLeaderMass = 0.05;

/*!
 * Inputs of the quasi-invariant scaling. Exactly one of nu (raw control
 * penalty) or kappa (scaled penalty, nu = epsilon * kappa) must be set.
 */
struct ScaledInputs
{
    double epsilon = 0.01;
    std::optional<double> nu;
    std::optional<double> kappa;
    double var_ff = 0.0;  //!< follower-follower scaled noise variance
    double var_fl = 0.0;  //!< follower-leader scaled noise variance
    double var_ll = 0.0;  //!< leader-leader scaled noise variance
    double c_f = 1.0;
    std::vector<FamilyConstants> families;
};

class ScaledParams
{
  public:
    double epsilon() const noexcept { return epsilon_; }
    double kappa() const noexcept { return kappa_; }
    double nu() const noexcept { return epsilon_ * kappa_; }
    double alpha() const noexcept { return epsilon_; }
    double beta() const noexcept { return beta_; }

    double var_ff() const noexcept { return var_ff_; }
    double var_fl() const noexcept { return var_fl_; }
    double var_ll() const noexcept { return var_ll_; }
    // Per-interaction noise variances after scaling.
    double sigma2_ff() const noexcept { return epsilon_ * var_ff_; }
    double sigma2_fl() const noexcept { return epsilon_ * var_fl_; }
    double sigma2_ll() const noexcept { return epsilon_ * var_ll_; }

    double c_f() const noexcept { return c_f_; }
    std::size_t num_families() const noexcept { return families_.size(); }
    FamilyConstants const& family(std::size_t p) const { return families_.at(p); }
    std::vector<FamilyConstants> const& families() const noexcept { return families_; }

    double eta_f() const noexcept { return 1.0 / (c_f_ * epsilon_); }
    double eta_fl(std::size_t p) const;
    double eta_l(std::size_t p) const;

    friend ScaledParams derive_scaled(ScaledInputs const& raw);

  private:
    ScaledParams() = default;

    double epsilon_ = 0.0;
    double kappa_ = 0.0;
    double beta_ = 0.0;
    double var_ff_ = 0.0;
    double var_fl_ = 0.0;
    double var_ll_ = 0.0;
    double c_f_ = 0.0;
    std::vector<FamilyConstants> families_;
};

// Validates raw inputs and computes alpha, beta, variances and rates.
// Throws std::invalid_argument naming the offending input.
ScaledParams derive_scaled(ScaledInputs const& raw);

// beta = 4 eps / (kappa + 4 eps)
double scaled_beta(double epsilon, double kappa);

}  // namespace opinion

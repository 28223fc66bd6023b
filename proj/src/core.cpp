#include "opinion/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "opinion/format.hpp"

namespace opinion {

namespace {

void require(bool cond, std::string const& msg)
{
    if (!cond)
        throw std::invalid_argument(msg);
}

}  // namespace

CompromiseKernel CompromiseKernel::constant(double level)
{
    require(level >= 0.0 && level <= 1.0, "constant kernel level must be in [0, 1]");
    return CompromiseKernel(Kind::Constant, level);
}

CompromiseKernel CompromiseKernel::bounded_confidence(double threshold)
{
    require(threshold >= 0.0 && threshold <= 2.0,
            "bounded confidence threshold must be in [0, 2]");
    return CompromiseKernel(Kind::BoundedConfidence, threshold);
}

double CompromiseKernel::minimum() const noexcept
{
    if (kind_ == Kind::Constant)
        return value_;
    // |a - b| reaches 2 on I x I
    return value_ >= 2.0 ? 1.0 : 0.0;
}

std::string CompromiseKernel::to_string() const
{
    if (kind_ == Kind::Constant)
        return "constant(" + format_real(value_) + ")";
    return "bounded_confidence(" + format_real(value_) + ")";
}

DiffusionShape DiffusionShape::constant(double level)
{
    require(level > 0.0 && level <= 1.0, "constant diffusion level must be in (0, 1]");
    return DiffusionShape(Kind::Constant, level);
}

double DiffusionShape::upper_room() const noexcept
{
    switch (kind_)
    {
        case Kind::None:
            return std::numeric_limits<double>::infinity();
        case Kind::Constant:
            // (1 - w)/c vanishes at w = 1
            return 0.0;
        case Kind::QuadraticCap:
            // (1 - w)/(1 - w^2) = 1/(1 + w), infimum at w -> 1
            return 0.5;
    }
    return 0.0;
}

double DiffusionShape::lower_room() const noexcept
{
    // All supported shapes are even in w.
    return upper_room();
}

std::string DiffusionShape::to_string() const
{
    switch (kind_)
    {
        case Kind::None:
            return "none";
        case Kind::Constant:
            return "constant(" + format_real(level_) + ")";
        case Kind::QuadraticCap:
            return "quadratic_cap";
    }
    return "none";
}

LeaderStrategy::LeaderStrategy(double psi, double target, std::optional<AdaptiveWindows> adaptive)
    : psi_(psi), target_(target), adaptive_(adaptive)
{
    require(psi >= 0.0 && psi <= 1.0, "psi must be in [0, 1]");
    require(in_interval(target), "target opinion must be in [-1, 1]");
    if (adaptive_)
    {
        require(adaptive_->delta >= 0.0 && adaptive_->delta <= 1.0, "delta must be in [0, 1]");
        require(adaptive_->delta_bar >= 0.0 && adaptive_->delta_bar <= 1.0,
                "delta_bar must be in [0, 1]");
    }
}

LeaderStrategy LeaderStrategy::with_psi(double psi) const
{
    return LeaderStrategy(psi, target_, adaptive_);
}

double ScaledParams::eta_fl(std::size_t p) const
{
    auto const& fam = families_.at(p);
    return 1.0 / (fam.c_fl_hat * fam.mass * epsilon_);
}

double ScaledParams::eta_l(std::size_t p) const
{
    auto const& fam = families_.at(p);
    return 1.0 / (fam.c_l_hat * fam.mass * epsilon_);
}

double scaled_beta(double epsilon, double kappa)
{
    return 4.0 * epsilon / (kappa + 4.0 * epsilon);
}

ScaledParams derive_scaled(ScaledInputs const& raw)
{
    require(std::isfinite(raw.epsilon) && raw.epsilon > 0.0, "epsilon must be > 0");
    require(raw.nu.has_value() != raw.kappa.has_value(), "exactly one of nu or kappa must be given");

    double kappa = raw.kappa ? *raw.kappa : *raw.nu / raw.epsilon;
    if (raw.nu)
        require(std::isfinite(*raw.nu) && *raw.nu > 0.0, "nu must be > 0");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be > 0");

    require(raw.var_ff >= 0.0, "follower noise variance must be >= 0");
    require(raw.var_fl >= 0.0, "follower-leader noise variance must be >= 0");
    require(raw.var_ll >= 0.0, "leader noise variance must be >= 0");
    require(std::isfinite(raw.c_f) && raw.c_f > 0.0, "c_f must be > 0");

    double total_mass = 0.0;
    for (std::size_t p = 0; p < raw.families.size(); ++p)
    {
        auto const& fam = raw.families[p];
        std::string const tag = "family " + std::to_string(p + 1) + ": ";
        require(fam.mass > 0.0 && fam.mass <= 1.0, tag + "mass must be in (0, 1]");
        require(std::isfinite(fam.c_fl_hat) && fam.c_fl_hat > 0.0, tag + "c_fl_hat must be > 0");
        require(std::isfinite(fam.c_l_hat) && fam.c_l_hat > 0.0, tag + "c_l_hat must be > 0");
        total_mass += fam.mass;
    }
    require(total_mass <= 1.0 + 1e-12, "total leader mass must not exceed 1");

    ScaledParams out;
    out.epsilon_ = raw.epsilon;
    out.kappa_ = kappa;
    out.beta_ = scaled_beta(raw.epsilon, kappa);
    out.var_ff_ = raw.var_ff;
    out.var_fl_ = raw.var_fl;
    out.var_ll_ = raw.var_ll;
    out.c_f_ = raw.c_f;
    out.families_ = raw.families;
    return out;
}

}  // namespace opinion

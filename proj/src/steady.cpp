#include "opinion/steady.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace opinion {

namespace {

constexpr unsigned kMaxDepth = 15;
constexpr double kQuadTol = 1e-12;

double log_unnormalized(double w, double w_d, double b)
{
    return -2.0 * std::log1p(-w * w) - 2.0 / b * steady_exponent(w, w_d);
}

template<class F>
double adaptive_integral(F const& f, double lo, double hi, double* rel_error = nullptr)
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
    double error = 0.0;
    double l1 = 0.0;
    double value = Rule::integrate(f, lo, hi, kMaxDepth, kQuadTol, &error, &l1);
    if (rel_error)
        *rel_error = l1 > 0.0 ? error / l1 : 0.0;
    return value;
}

}  // namespace

double b_follower(double var_ff, double var_fl, double c_f, double c_fl, double rho)
{
    return (var_ff * c_fl + var_fl * c_f * rho) / (c_fl + c_f * rho);
}

double b_leader(double var_ll, double rho, double kappa, double c_l, double psi, double mu)
{
    return var_ll * rho * kappa / (2.0 * c_l * (psi + mu));
}

double steady_exponent(double w, double w_d)
{
    double const one_minus = 1.0 - w * w;
    return (w * w - w_d * w) / (2.0 * one_minus) - 0.5 * w_d * std::atanh(w);
}

double steady_unnormalized(double w, double w_d, double b)
{
    if (!(std::abs(w) < 1.0))
        throw std::invalid_argument("steady_unnormalized: |w| must be < 1");
    return std::exp(log_unnormalized(w, w_d, b));
}

//---------------------------------------------------------------------------//

double SteadyDensity::a() const
{
    return std::exp(log_a_);
}

double SteadyDensity::operator()(double w) const noexcept
{
    if (!(std::abs(w) < 1.0))
        return 0.0;
    return std::exp(log_a_ + log_unnormalized(w, w_d_, b_));
}

double SteadyDensity::integral(double lo, double hi) const
{
    lo = std::max(lo, -1.0 + kEdge);
    hi = std::min(hi, 1.0 - kEdge);
    if (!(hi > lo))
        return 0.0;
    auto f = [this](double w) { return (*this)(w); };
    if (lo < w_d_ && w_d_ < hi)
        return adaptive_integral(f, lo, w_d_) + adaptive_integral(f, w_d_, hi);
    return adaptive_integral(f, lo, hi);
}

SteadyDensity normalize(double w_d, double b, double target_mass, Population population)
{
    if (!(std::abs(w_d) < 1.0))
        throw std::invalid_argument("normalize: target must lie in (-1, 1)");
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("normalize: b must be > 0");
    if (!(target_mass > 0.0 && target_mass <= 1.0))
        throw std::invalid_argument("normalize: target mass must be in (0, 1]");

    constexpr double edge = SteadyDensity::kEdge;
    // Keep values near unity at the target before exponentiating.
    double const shift = log_unnormalized(w_d, w_d, b);
    auto f = [&](double w) { return std::exp(log_unnormalized(w, w_d, b) - shift); };

    double err_lo = 0.0;
    double err_hi = 0.0;
    double const z = adaptive_integral(f, -1.0 + edge, w_d, &err_lo)
                     + adaptive_integral(f, w_d, 1.0 - edge, &err_hi);
    if (!(z > 0.0) || !std::isfinite(z) || err_lo > 1e-9 || err_hi > 1e-9)
        throw std::runtime_error("normalize: quadrature did not converge");

    SteadyDensity out;
    out.population_ = population;
    out.w_d_ = w_d;
    out.b_ = b;
    out.mass_ = target_mass;
    out.log_a_ = std::log(target_mass) - shift - std::log(z);

    // Within edge of +-1 the density is monotone (decreasing toward the
    // endpoint) as long as 4 b edge < 1 - edge -+ w_d, so each tail is at
    // most edge times the density at the cut.
    if (!(4.0 * b * edge < 1.0 - edge - std::abs(w_d)))
        throw std::runtime_error("normalize: target too close to the boundary to bound the tails");
    out.tail_bound_ = edge * (out(1.0 - edge) + out(-1.0 + edge));
    return out;
}

double stationarity_residual(std::function<double(double)> const& f,
                             double w_d,
                             double b,
                             std::size_t points,
                             double fd_ratio)
{
    if (points < 3)
        throw std::invalid_argument("stationarity_residual: need at least 3 grid points");
    if (!(fd_ratio > 0.0))
        throw std::invalid_argument("stationarity_residual: fd_ratio must be > 0");

    constexpr double lo = -1.0 + 1e-4;
    constexpr double hi = 1.0 - 1e-4;
    double const spacing = (hi - lo) / static_cast<double>(points - 1);
    double const h = fd_ratio * spacing;

    auto flux = [&](double w) {
        double const d = 1.0 - w * w;
        return d * d * f(w);
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < points; ++i)
    {
        double const w = lo + spacing * static_cast<double>(i);
        double const derivative = (flux(w + h) - flux(w - h)) / (2.0 * h);
        worst = std::max(worst, std::abs((w_d - w) * f(w) - 0.5 * b * derivative));
    }
    return worst;
}

double stationarity_residual(SteadyDensity const& density, std::size_t points, double fd_ratio)
{
    return stationarity_residual([&](double w) { return density(w); }, density.target(), density.b(), points,
                                 fd_ratio);
}

double quantile(SteadyDensity const& density, double q)
{
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("quantile: q must be in (0, 1)");
    double const goal = q * density.target_mass();
    double lo = -1.0;
    double hi = 1.0;
    for (int it = 0; it < 60; ++it)
    {
        double const mid = 0.5 * (lo + hi);
        if (density.integral(-1.0, mid) < goal)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

DensityTable cell_averages(SteadyDensity const& density, std::size_t bins)
{
    if (bins < 2)
        throw std::invalid_argument("cell_averages: need at least 2 bins");
    DensityTable out;
    out.density.resize(bins);
    double const width = out.bin_width();
    for (std::size_t i = 0; i < bins; ++i)
    {
        double const lo = -1.0 + width * static_cast<double>(i);
        out.density[i] = density.integral(lo, lo + width) / width;
    }
    return out;
}

double l1_distance(DensityTable const& hist, SteadyDensity const& density)
{
    if (std::abs(hist.mass() - density.target_mass()) > 1e-6)
        throw std::invalid_argument("l1_distance: histogram and density masses differ");
    return l1_distance(hist, cell_averages(density, hist.bins()));
}

double l1_distance(DensityTable const& lhs, DensityTable const& rhs)
{
    if (lhs.bins() != rhs.bins())
        throw std::invalid_argument("l1_distance: bin counts differ");
    if (std::abs(lhs.mass() - rhs.mass()) > 1e-6)
        throw std::invalid_argument("l1_distance: masses differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < lhs.bins(); ++i)
        acc += std::abs(lhs.density[i] - rhs.density[i]);
    return acc * lhs.bin_width();
}

}  // namespace opinion

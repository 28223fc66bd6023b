#include "opinion/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <boost/math/tools/minima.hpp>

namespace opinion {

double feedback_control(ControlInput const& in) noexcept
{
    double const psi = in.strategy.psi();
    double const mu = in.strategy.mu();
    double const wd = in.strategy.target();
    double const w = in.leader;
    double const v = in.partner;

    double const pull = psi * ((w - wd) + (v - wd)) + mu * ((w - in.follower_mean) + (v - in.follower_mean));
    double const skew = in.kernel(w, v) - in.kernel(v, w);
    return -0.5 * in.beta * pull - 0.5 * in.alpha * in.beta * skew * (v - w);
}

double control_beta(double alpha, double nu)
{
    if (!(alpha > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("control_beta: alpha and nu must be > 0");
    double const a2 = 4.0 * alpha * alpha;
    return a2 / (nu + a2);
}

double binary_cost(double u,
                   double post_leader,
                   double post_partner,
                   double follower_mean,
                   LeaderStrategy const& strategy,
                   double alpha,
                   double nu) noexcept
{
    auto sq = [](double x) { return x * x; };
    double const wd = strategy.target();
    double const radical = sq(post_leader - wd) + sq(post_partner - wd);
    double const populist = sq(post_leader - follower_mean) + sq(post_partner - follower_mean);
    return alpha * (0.5 * strategy.psi() * radical + 0.5 * strategy.mu() * populist + nu * u * u);
}

std::pair<double, double> controlled_pair(ControlInput const& in, double u) noexcept
{
    double const w = in.leader;
    double const v = in.partner;
    double const shift = 2.0 * in.alpha * u;
    return {w + in.alpha * in.kernel(w, v) * (v - w) + shift,
            v + in.alpha * in.kernel(v, w) * (w - v) + shift};
}

OptimalityCheck verify_optimality(ControlInput const& in,
                                  double nu,
                                  std::size_t resolution,
                                  std::optional<std::pair<double, double>> bracket)
{
    if (resolution < 1000)
        throw std::invalid_argument("verify_optimality: resolution must be >= 1000");

    auto cost = [&](double u) {
        auto [a, b] = controlled_pair(in, u);
        return binary_cost(u, a, b, in.follower_mean, in.strategy, in.alpha, nu);
    };

    double lo = 0.0;
    double hi = 0.0;
    if (bracket)
    {
        std::tie(lo, hi) = *bracket;
    }
    else
    {
        double const half = std::max(in.beta / in.alpha * (2.0 + in.alpha), 1e-12);
        lo = -half;
        hi = half;
    }
    if (!(hi > lo))
        throw std::invalid_argument("verify_optimality: empty bracket");

    double const h = (hi - lo) / static_cast<double>(resolution);
    std::size_t best = 0;
    double best_cost = cost(lo);
    for (std::size_t i = 1; i <= resolution; ++i)
    {
        double c = cost(lo + h * static_cast<double>(i));
        if (c < best_cost)
        {
            best_cost = c;
            best = i;
        }
    }
    if (best == 0 || best == resolution)
        throw std::runtime_error("verify_optimality: grid minimum touches the bracket boundary");

    OptimalityCheck out;
    out.u_closed = feedback_control(in) / (2.0 * in.alpha);
    out.u_grid = lo + h * static_cast<double>(best);
    out.grid_spacing = h;
    out.gap = std::abs(out.u_closed - out.u_grid);

    auto refined = boost::math::tools::brent_find_minima(
        cost, out.u_grid - h, out.u_grid + h, std::numeric_limits<double>::digits / 2);
    out.u_refined = refined.first;
    out.refined_gap = std::abs(out.u_closed - out.u_refined);
    return out;
}

}  // namespace opinion

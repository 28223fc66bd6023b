#include <stdexcept>
#include <random>

#include <doctest.h>

#include "opinion/control.hpp"

using namespace opinion;

namespace {

ControlInput reference_input()
{
    ControlInput in;
    in.leader = 0.2;
    in.partner = 0.4;
    in.follower_mean = 0.0;
    in.strategy = LeaderStrategy(0.5, 1.0);
    in.alpha = 0.1;
    in.beta = control_beta(0.1, 1.0);
    in.kernel = CompromiseKernel::constant(1.0);
    return in;
}

}  // namespace

TEST_CASE("control beta")
{
    CHECK(control_beta(0.1, 1.0) == doctest::Approx(0.04 / 1.04).epsilon(1e-14));
}

TEST_CASE("feedback control examples")
{
    ControlInput in = reference_input();
    CHECK(feedback_control(in) == doctest::Approx(0.2 * in.beta).epsilon(1e-13));
    CHECK(feedback_control(in) == doctest::Approx(7.6923e-3).epsilon(1e-4));

    ControlInput rest = reference_input();
    rest.leader = rest.partner = rest.follower_mean = 0.3;
    rest.strategy = LeaderStrategy(0.7, 0.3);
    CHECK(feedback_control(rest) == 0.0);

    ControlInput weak = reference_input();
    weak.beta = 0.0;
    CHECK(feedback_control(weak) == 0.0);
}

TEST_CASE("control sign: radical leaders above the target are pushed down")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i)
    {
        ControlInput in = reference_input();
        double const target = -1.0 + 1.5 * u(rng);
        in.strategy = LeaderStrategy(1.0, target);
        in.leader = target + (1.0 - target) * u(rng) + 1e-9;
        in.partner = target + (1.0 - target) * u(rng) + 1e-9;
        in.leader = std::min(in.leader, 1.0);
        in.partner = std::min(in.partner, 1.0);
        REQUIRE(feedback_control(in) < 0.0);
    }
}

TEST_CASE("control is affine in the opinions for symmetric R")
{
    ControlInput a = reference_input();
    ControlInput b = reference_input();
    b.leader = -0.6;
    b.partner = 0.9;
    b.follower_mean = 0.35;
    ControlInput mid = reference_input();
    mid.leader = 0.5 * (a.leader + b.leader);
    mid.partner = 0.5 * (a.partner + b.partner);
    mid.follower_mean = 0.5 * (a.follower_mean + b.follower_mean);
    CHECK(feedback_control(mid) == doctest::Approx(0.5 * (feedback_control(a) + feedback_control(b))).epsilon(1e-13));
}

TEST_CASE("binary cost examples")
{
    LeaderStrategy s(0.5, 0.2);
    CHECK(binary_cost(0.0, 0.2, 0.2, 0.2, s, 0.1, 1.0) == 0.0);
    LeaderStrategy radical(1.0, 0.0);
    CHECK(binary_cost(0.0, 1.0, 0.0, 0.4, radical, 0.1, 1.0) == doctest::Approx(0.05));

    double const u = 0.3;
    double const alpha = 0.1;
    double const nu = 2.0;
    double const j1 = binary_cost(u, 0.1, 0.4, 0.0, s, alpha, nu);
    double const j2 = binary_cost(2.0 * u, 0.1, 0.4, 0.0, s, alpha, nu);
    CHECK(j2 - j1 == doctest::Approx(3.0 * alpha * nu * u * u).epsilon(1e-13));
    CHECK(j1 >= 0.0);
}

TEST_CASE("controlled pair applies the same increment to both leaders")
{
    ControlInput in = reference_input();
    auto [w0, v0] = controlled_pair(in, 0.0);
    auto [w1, v1] = controlled_pair(in, 0.05);
    CHECK(w1 - w0 == doctest::Approx(2.0 * in.alpha * 0.05));
    CHECK(v1 - v0 == doctest::Approx(2.0 * in.alpha * 0.05));
    CHECK(w0 == doctest::Approx(0.22));
    CHECK(v0 == doctest::Approx(0.38));
}

TEST_CASE("closed form matches brute-force minimization")
{
    ControlInput in = reference_input();
    auto check = verify_optimality(in, 1.0);
    CHECK(check.gap <= check.grid_spacing);
    CHECK(check.refined_gap <= 1e-6);

    ControlInput weak = reference_input();
    weak.beta = control_beta(0.1, 1e8);
    auto w = verify_optimality(weak, 1e8);
    CHECK(w.gap <= w.grid_spacing);
    CHECK(std::abs(w.u_closed) <= 1e-6);

    CHECK_THROWS_AS(verify_optimality(in, 1.0, 10), std::invalid_argument);
    // Bracket that excludes the minimizer.
    double const u_closed = feedback_control(in) / (2.0 * in.alpha);
    CHECK_THROWS_AS(verify_optimality(in, 1.0, 2000, std::pair{u_closed + 1.0, u_closed + 2.0}), std::runtime_error);
}

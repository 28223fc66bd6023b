#include <stdexcept>
#include <random>

#include <doctest.h>

#include "opinion/interactions.hpp"

using namespace opinion;

TEST_CASE("follower-follower examples")
{
    auto one = CompromiseKernel::constant(1.0);
    auto none = DiffusionShape::none();
    auto [a, b] = follower_follower(-0.5, 0.5, 0.0, 0.0, one, none, 0.5);
    CHECK(a == 0.0);
    CHECK(b == 0.0);
    auto [c, d] = follower_follower(-0.5, 0.5, 0.0, 0.0, one, none, 0.25);
    CHECK(c == doctest::Approx(-0.25));
    CHECK(d == doctest::Approx(0.25));
    auto [e, f] = follower_follower(0.3, 0.3, 0.0, 0.0, CompromiseKernel::bounded_confidence(0.1), none, 0.4);
    CHECK(e == 0.3);
    CHECK(f == 0.3);
}

TEST_CASE("follower-leader examples")
{
    auto cap = DiffusionShape::quadratic_cap();
    auto [w, l] = follower_leader(0.0, 1.0, 0.0, CompromiseKernel::constant(1.0), cap, 0.01);
    CHECK(w == doctest::Approx(0.01));
    CHECK(l == 1.0);

    auto [w2, l2] = follower_leader(-0.8, 0.5, 0.0, CompromiseKernel::bounded_confidence(0.5), cap, 0.01);
    CHECK(w2 == -0.8);
    CHECK(l2 == 0.5);

    auto [w3, l3] = follower_leader(0.4, 0.4, 0.0, CompromiseKernel::constant(1.0), cap, 0.3);
    CHECK(w3 == 0.4);
    CHECK(l3 == 0.4);
}

TEST_CASE("leader-leader examples")
{
    auto one = CompromiseKernel::constant(1.0);
    auto cap = DiffusionShape::quadratic_cap();
    LeaderStrategy s(0.5, 1.0);

    auto [a, b] = leader_leader(-0.7, 0.9, 0.0, 0.0, one, cap, 0.5, 0.01, 0.2, s);
    CHECK(a - b == doctest::Approx(0.0).epsilon(1e-15));

    LeaderStrategy rest(0.5, 0.3);
    auto [c, d] = leader_leader(0.3, 0.3, 0.0, 0.0, one, cap, 0.2, 0.01, 0.3, rest);
    CHECK(c == 0.3);
    CHECK(d == 0.3);

    double const beta = control_beta(0.1, 1.0);
    auto [e, f] = leader_leader(0.2, 0.4, 0.0, 0.0, one, cap, 0.1, beta, 0.0, s);
    double const control = 0.2 * beta;
    CHECK(e == doctest::Approx(0.2 + 0.02 + control));
    CHECK(f == doctest::Approx(0.4 - 0.02 + control));
    CHECK(control == doctest::Approx(7.6923e-3).epsilon(1e-4));
    // Noiseless pair mean moves by exactly the control increment.
    CHECK(0.5 * (e + f) - 0.3 == doctest::Approx(control).epsilon(1e-13));
}

TEST_CASE("noiseless leader contraction")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> a(1e-6, 0.5);
    auto one = CompromiseKernel::constant(1.0);
    auto cap = DiffusionShape::quadratic_cap();
    for (int i = 0; i < 100000; ++i)
    {
        double const alpha = a(rng);
        double const w = u(rng);
        double const v = u(rng);
        LeaderStrategy s(0.5 * (u(rng) + 1.0), u(rng));
        auto [ws, vs] = leader_leader(w, v, 0.0, 0.0, one, cap, alpha, 0.3 * (u(rng) + 1.0) * 0.5, u(rng), s);
        REQUIRE(std::abs(std::abs(ws - vs) - std::abs(1.0 - 2.0 * alpha) * std::abs(w - v)) <= 1e-12);
    }
}

TEST_CASE("noiseless follower rules stay in the interval")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> a(0.0, 0.5);
    auto cap = DiffusionShape::quadratic_cap();
    for (int i = 0; i < 1000000; ++i)
    {
        double const alpha = a(rng);
        auto k = (i % 2) ? CompromiseKernel::constant(0.5 * (u(rng) + 1.0))
                         : CompromiseKernel::bounded_confidence(u(rng) + 1.0);
        double const w = u(rng);
        double const v = u(rng);
        auto [x, y] = follower_follower(w, v, 0.0, 0.0, k, cap, alpha);
        auto [z, l] = follower_leader(w, v, 0.0, k, cap, alpha);
        REQUIRE(in_interval(x));
        REQUIRE(in_interval(y));
        REQUIRE(in_interval(z));
        REQUIRE(l == v);
    }
}

TEST_CASE("noise sampling")
{
    Rng rng(13);
    NoiseSpec zero{0.0};
    for (int i = 0; i < 100; ++i)
        REQUIRE(sample_noise(zero, rng) == 0.0);
    CHECK(NoiseSpec{0.03}.support() == doctest::Approx(0.3));

    NoiseSpec spec{1e-4};
    double sum = 0.0;
    double sum2 = 0.0;
    int const n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        double const x = sample_noise(spec, rng);
        REQUIRE(std::abs(x) <= spec.support());
        sum += x;
        sum2 += x * x;
    }
    double const mean = sum / n;
    double const var = sum2 / n - mean * mean;
    CHECK(std::abs(var - 1e-4) <= 0.05e-4);
    CHECK(std::abs(mean) <= 5.0 * std::sqrt(1e-4 / n));
}

TEST_CASE("bound certificate")
{
    CertificateInput in;
    in.leader_kernel = CompromiseKernel::constant(1.0);
    in.leader_diffusion = DiffusionShape::quadratic_cap();
    in.follower_leader_diffusion = DiffusionShape::quadratic_cap();
    in.follower_diffusion = DiffusionShape::quadratic_cap();
    in.alpha = 0.01;
    in.beta = 0.04 / 100.04;
    in.leader_noise = in.follower_leader_noise = in.follower_noise = NoiseSpec{1e-4};

    auto c = bound_certificate(in);
    CHECK(c.r == 1.0);
    CHECK(c.d_minus == 0.5);
    CHECK(c.d_plus == 0.5);
    CHECK(c.k_minus == 0.5);
    CHECK(c.k_plus == 0.5);
    CHECK(c.satisfied());
    CHECK(NoiseSpec{1e-4}.support() == doctest::Approx(0.01732).epsilon(1e-3));
    CHECK(c.d_plus * (1.0 - in.beta / 2.0) == doctest::Approx(0.49990).epsilon(1e-5));

    auto weak = in;
    weak.leader_kernel = CompromiseKernel::constant(0.3);
    CHECK(bound_certificate(weak).r == 0.3);

    auto gated = in;
    gated.leader_kernel = CompromiseKernel::bounded_confidence(0.5);
    auto g = bound_certificate(gated);
    CHECK(g.r == 0.0);
    CHECK_FALSE(g.control_ok);

    auto loud = in;
    loud.leader_noise = NoiseSpec{0.2};
    CHECK_FALSE(bound_certificate(loud).leader_noise_ok);
    auto loud_f = in;
    loud_f.follower_leader_noise = NoiseSpec{0.2};
    CHECK_FALSE(bound_certificate(loud_f).follower_leader_noise_ok);
    auto loud_ff = in;
    loud_ff.follower_noise = NoiseSpec{0.2};
    CHECK_FALSE(bound_certificate(loud_ff).follower_noise_ok);

    // Constant diffusion has no room at the edges, so any noise fails.
    auto flat = in;
    flat.leader_diffusion = DiffusionShape::constant(0.5);
    CHECK_FALSE(bound_certificate(flat).leader_noise_ok);
    auto quiet = flat;
    quiet.leader_noise = NoiseSpec{0.0};
    CHECK(bound_certificate(quiet).leader_noise_ok);
}

TEST_CASE("certified rules never leave the interval with noise")
{
    double const alpha = 0.01;
    double const beta = 0.04 / 100.04;
    NoiseSpec noise{1e-4};
    auto one = CompromiseKernel::constant(1.0);
    auto cap = DiffusionShape::quadratic_cap();
    Rng rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LeaderStrategy s(0.5, 0.5);
    long outside = 0;
    for (int i = 0; i < 3400000; ++i)
    {
        double const w = u(rng);
        double const v = u(rng);
        auto [a, b] = follower_follower(w, v, sample_noise(noise, rng), sample_noise(noise, rng), one, cap, alpha);
        auto [c, l] = follower_leader(w, v, sample_noise(noise, rng), one, cap, alpha);
        auto [d, e] = leader_leader(w, v, sample_noise(noise, rng), sample_noise(noise, rng), one, cap, alpha, beta,
                                    u(rng), s);
        outside += !in_interval(a) + !in_interval(b) + !in_interval(c) + !in_interval(l) + !in_interval(d)
                   + !in_interval(e);
    }
    CHECK(outside == 0);
}

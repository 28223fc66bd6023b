#include "opinion/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opinion/format.hpp"

namespace opinion {

BoundCertificate Model::certificate(std::size_t p) const
{
    CertificateInput in;
    in.leader_kernel = families.at(p).leader_kernel;
    in.leader_diffusion = leader_diffusion;
    in.follower_leader_diffusion = follower_leader_diffusion;
    in.follower_diffusion = follower_diffusion;
    in.alpha = params.alpha();
    in.beta = params.beta();
    in.leader_noise = NoiseSpec{params.sigma2_ll()};
    in.follower_leader_noise = NoiseSpec{params.sigma2_fl()};
    in.follower_noise = NoiseSpec{params.sigma2_ff()};
    return bound_certificate(in);
}

StepPlan plan_step(ScaledParams const& params)
{
    double fastest = params.c_f();
    for (auto const& fam : params.families())
        fastest = std::min({fastest, fam.c_fl_hat, fam.c_l_hat});

    StepPlan plan;
    double const eps = params.epsilon();
    plan.dt = eps * fastest;
    plan.p_ff = plan.dt / (params.c_f() * eps);
    for (auto const& fam : params.families())
    {
        plan.p_fl.push_back(plan.dt / (fam.c_fl_hat * eps));
        plan.p_ll.push_back(plan.dt / (fam.c_l_hat * eps));
    }
    return plan;
}

namespace {

// Number of disjoint pairs that interact this step: each of floor(n/2) pairs
// fires independently with probability p.
std::size_t active_pairs(std::size_t n, double p, Rng& rng)
{
    std::size_t const pairs = n / 2;
    if (pairs == 0 || p <= 0.0)
        return 0;
    if (p >= 1.0)
        return pairs;
    std::binomial_distribution<std::size_t> dist(pairs, p);
    return dist(rng);
}

// Moves a uniformly random ordered sample of size k to the front of `order`.
void partial_shuffle(std::vector<std::uint32_t>& order, std::size_t k, Rng& rng)
{
    std::size_t const n = order.size();
    for (std::size_t i = 0; i < k; ++i)
    {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
}

void ensure_order(std::vector<std::uint32_t>& order, std::size_t n)
{
    if (order.size() != n)
    {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::uint32_t{0});
    }
}

class Noise
{
  public:
    explicit Noise(double variance) : half_(NoiseSpec{variance}.support()), dist_(-half_, half_) {}

    double operator()(Rng& rng)
    {
        return half_ == 0.0 ? 0.0 : dist_(rng);
    }

  private:
    double half_;
    std::uniform_real_distribution<double> dist_;
};

void follower_round(std::vector<double>& followers,
                    double p,
                    Model const& model,
                    Rng& rng,
                    std::vector<std::uint32_t>& order,
                    RejectionCounter& counter)
{
    ensure_order(order, followers.size());
    std::size_t const k = active_pairs(followers.size(), p, rng);
    partial_shuffle(order, 2 * k, rng);

    Noise noise(model.params.sigma2_ff());
    double const alpha = model.params.alpha();
    for (std::size_t i = 0; i < k; ++i)
    {
        double& w = followers[order[2 * i]];
        double& v = followers[order[2 * i + 1]];
        double const t1 = noise(rng);
        double const t2 = noise(rng);
        auto [ws, vs] = follower_follower(w, v, t1, t2, model.follower_kernel, model.follower_diffusion, alpha);
        ++counter.attempted;
        if (in_interval(ws) && in_interval(vs))
        {
            w = ws;
            v = vs;
        }
        else
        {
            ++counter.rejected;
        }
    }
}

void follower_leader_round(std::vector<double>& followers,
                           std::vector<double> const& leaders,
                           double p,
                           CompromiseKernel const& kernel,
                           Model const& model,
                           Rng& rng,
                           RejectionCounter& counter)
{
    if (leaders.empty() || followers.empty() || p <= 0.0)
        return;

    Noise noise(model.params.sigma2_fl());
    std::uniform_int_distribution<std::size_t> pick(0, leaders.size() - 1);
    double const alpha = model.params.alpha();
    DiffusionShape const& shape = model.follower_leader_diffusion;

    auto interact = [&](double& w) {
        double const leader = leaders[pick(rng)];
        double const theta = noise(rng);
        double const next = follower_leader(w, leader, theta, kernel, shape, alpha).first;
        ++counter.attempted;
        if (in_interval(next))
            w = next;
        else
            ++counter.rejected;
    };

    if (p >= 1.0)
    {
        for (double& w : followers)
            interact(w);
        return;
    }

    // Bernoulli(p) per follower, visited through geometric gaps.
    std::geometric_distribution<std::size_t> gap(p);
    std::size_t i = gap(rng);
    while (i < followers.size())
    {
        interact(followers[i]);
        i += gap(rng) + 1;
    }
}

void leader_round(LeaderFamily& family,
                  double p,
                  CompromiseKernel const& kernel,
                  double follower_mean,
                  Model const& model,
                  Rng& rng,
                  std::vector<std::uint32_t>& order,
                  RejectionCounter& counter)
{
    auto& leaders = family.leaders;
    ensure_order(order, leaders.size());
    std::size_t const k = active_pairs(leaders.size(), p, rng);
    partial_shuffle(order, 2 * k, rng);

    Noise noise(model.params.sigma2_ll());
    double const alpha = model.params.alpha();
    double const beta = model.params.beta();
    for (std::size_t i = 0; i < k; ++i)
    {
        double& w = leaders[order[2 * i]];
        double& v = leaders[order[2 * i + 1]];
        double const t1 = noise(rng);
        double const t2 = noise(rng);
        auto [ws, vs] = leader_leader(
            w, v, t1, t2, kernel, model.leader_diffusion, alpha, beta, follower_mean, family.strategy);
        ++counter.attempted;
        if (in_interval(ws) && in_interval(vs))
        {
            w = ws;
            v = vs;
        }
        else
        {
            ++counter.rejected;
        }
    }
}

}  // namespace

void mc_step(OpinionEnsemble& ens,
             StepPlan const& plan,
             Model const& model,
             Rng& rng,
             StepWorkspace& workspace,
             InteractionStats& stats)
{
    std::size_t const m = ens.families.size();
    if (plan.p_fl.size() != m || plan.p_ll.size() != m || model.families.size() != m)
        throw std::invalid_argument("mc_step: family count mismatch between ensemble, plan and model");
    workspace.leader_order.resize(m);

    double const follower_mean = mean(ens.followers);

    follower_round(ens.followers, plan.p_ff, model, rng, workspace.follower_order, stats.follower_follower);

    for (std::size_t p = 0; p < m; ++p)
    {
        follower_leader_round(ens.followers,
                              ens.families[p].leaders,
                              plan.p_fl[p],
                              model.families[p].follower_kernel,
                              model,
                              rng,
                              stats.follower_leader);
    }

    for (std::size_t p = 0; p < m; ++p)
    {
        leader_round(ens.families[p],
                     plan.p_ll[p],
                     model.families[p].leader_kernel,
                     follower_mean,
                     model,
                     rng,
                     workspace.leader_order[p],
                     stats.leader_leader);
    }
}

double mean(std::span<double const> values)
{
    if (values.empty())
        return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace {

double mean_square(std::span<double const> values)
{
    double acc = 0.0;
    for (double w : values)
        acc += w * w;
    return acc / static_cast<double>(values.size());
}

}  // namespace

EmpiricalMoments empirical_moments(OpinionEnsemble const& ens, double t)
{
    if (ens.followers.empty())
        throw std::invalid_argument("empirical_moments: follower population is empty");

    EmpiricalMoments out;
    out.t = t;
    out.m_f = mean(ens.followers);
    out.e_f = mean_square(ens.followers);
    for (std::size_t p = 0; p < ens.families.size(); ++p)
    {
        auto const& leaders = ens.families[p].leaders;
        if (leaders.empty())
            throw std::invalid_argument("empirical_moments: leader family " + std::to_string(p + 1)
                                        + " is empty");
        out.m_l.push_back(mean(leaders));
        out.e_l.push_back(mean_square(leaders));
        out.psi.push_back(ens.families[p].strategy.psi());
    }
    return out;
}

LeaderStrategy adaptive_strategy_update(OpinionEnsemble const& ens, std::size_t family)
{
    auto const& fam = ens.families.at(family);
    if (!fam.strategy.is_adaptive() || ens.followers.empty())
        return fam.strategy;

    auto const& windows = *fam.strategy.adaptive();
    double const target = fam.strategy.target();
    double const leader_mean = mean(fam.leaders);

    std::size_t near_target = 0;
    std::size_t near_leaders = 0;
    for (double w : ens.followers)
    {
        near_target += std::abs(w - target) <= windows.delta;
        near_leaders += std::abs(w - leader_mean) <= windows.delta_bar;
    }
    double const n = static_cast<double>(ens.followers.size());
    double psi = 0.5 * static_cast<double>(near_target) / n + 0.5 * static_cast<double>(near_leaders) / n;
    return fam.strategy.with_psi(std::clamp(psi, 0.0, 1.0));
}

//---------------------------------------------------------------------------//

InitialLaw InitialLaw::uniform(double lo, double hi)
{
    if (!(lo <= hi) || !in_interval(lo) || !in_interval(hi))
        throw std::invalid_argument("uniform initial law must satisfy -1 <= lo <= hi <= 1");
    return InitialLaw(Kind::Uniform, lo, hi);
}

InitialLaw InitialLaw::normal(double mean, double variance)
{
    if (!in_interval(mean))
        throw std::invalid_argument("normal initial law: mean must be in [-1, 1]");
    if (!(variance > 0.0))
        throw std::invalid_argument("normal initial law: variance must be > 0");
    return InitialLaw(Kind::Normal, mean, variance);
}

InitialLaw InitialLaw::gamma(double shape, double scale)
{
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("gamma initial law: shape and scale must be > 0");
    return InitialLaw(Kind::Gamma, shape, scale);
}

InitialLaw InitialLaw::point(double value)
{
    if (!in_interval(value))
        throw std::invalid_argument("point initial law must lie in [-1, 1]");
    return InitialLaw(Kind::Point, value, 0.0);
}

std::string InitialLaw::to_string() const
{
    switch (kind_)
    {
        case Kind::Uniform:
            return "uniform(" + format_real(a_) + ", " + format_real(b_) + ")";
        case Kind::Normal:
            return "normal(" + format_real(a_) + ", " + format_real(b_) + ")";
        case Kind::Gamma:
            return "gamma(" + format_real(a_) + ", " + format_real(b_) + ")";
        case Kind::Point:
            return "point(" + format_real(a_) + ")";
    }
    return {};
}

namespace {

template<class Draw>
std::vector<double> sample_truncated(std::size_t n, Rng& rng, Draw draw)
{
    constexpr std::size_t kMaxAttemptsPerSample = 100000;
    std::vector<double> out;
    out.reserve(n);
    std::size_t misses = 0;
    while (out.size() < n)
    {
        double w = draw(rng);
        if (in_interval(w))
        {
            out.push_back(w);
            misses = 0;
        }
        else if (++misses > kMaxAttemptsPerSample)
        {
            throw std::runtime_error("init_sampler: truncated law has negligible mass on [-1, 1]");
        }
    }
    return out;
}

}  // namespace

std::vector<double> init_sampler(InitialLaw const& law, std::size_t n, Rng& rng)
{
    if (n == 0)
        throw std::invalid_argument("init_sampler: need at least one sample");

    switch (law.kind())
    {
        case InitialLaw::Kind::Uniform: {
            if (law.first() == law.second())
                return std::vector<double>(n, law.first());
            std::uniform_real_distribution<double> dist(law.first(), law.second());
            std::vector<double> out(n);
            for (double& w : out)
                w = dist(rng);
            return out;
        }
        case InitialLaw::Kind::Normal: {
            std::normal_distribution<double> dist(law.first(), std::sqrt(law.second()));
            return sample_truncated(n, rng, [&](Rng& g) { return dist(g); });
        }
        case InitialLaw::Kind::Gamma: {
            std::gamma_distribution<double> dist(law.first(), law.second());
            return sample_truncated(n, rng, [&](Rng& g) { return dist(g) - 1.0; });
        }
        case InitialLaw::Kind::Point:
            return std::vector<double>(n, law.first());
    }
    return {};
}

std::vector<std::size_t> leader_counts(std::size_t n_followers, std::vector<double> const& masses)
{
    double const total = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (!(total < 1.0))
        throw std::invalid_argument("leader_counts: total leader mass must be < 1");
    double const population = static_cast<double>(n_followers) / (1.0 - total);
    std::vector<std::size_t> out;
    for (double rho : masses)
        out.push_back(static_cast<std::size_t>(std::llround(rho * population)));
    return out;
}

Rng make_rng(std::uint64_t seed, std::uint64_t replica, RngStream stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica),
                      static_cast<std::uint32_t>(replica >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

//---------------------------------------------------------------------------//

Snapshot take_snapshot(OpinionEnsemble const& ens, ScaledParams const& params, std::size_t bins, double t)
{
    Snapshot snap;
    snap.t = t;
    snap.followers = histogram(ens.followers, bins, 1.0);
    for (std::size_t p = 0; p < ens.families.size(); ++p)
        snap.families.push_back(histogram(ens.families[p].leaders, bins, params.family(p).mass));
    return snap;
}

namespace {

std::size_t step_index(double t, double dt)
{
    return static_cast<std::size_t>(std::llround(t / dt));
}

}  // namespace

RunResult run(OpinionEnsemble initial,
              Model const& model,
              RunOptions const& options,
              std::uint64_t seed,
              std::uint64_t replica)
{
    if (!(options.horizon >= 0.0))
        throw std::invalid_argument("run: horizon must be >= 0");
    for (double c : options.checkpoints)
        if (c < 0.0 || c > options.horizon)
            throw std::invalid_argument("run: checkpoint " + format_real(c) + " outside [0, horizon]");
    if (model.families.size() != model.params.num_families()
        || initial.families.size() != model.params.num_families())
        throw std::invalid_argument("run: family count mismatch between model and ensemble");

    for (std::size_t p = 0; p < model.families.size(); ++p)
    {
        if (!model.certificate(p).satisfied())
            throw CertificateError("bound certificate not satisfied for leader family "
                                   + std::to_string(p + 1));
    }

    RunResult result;
    result.plan = plan_step(model.params);
    double const dt = result.plan.dt;
    std::size_t const n_steps = step_index(options.horizon, dt);
    std::size_t const stride = std::max<std::size_t>(options.moments_stride, 1);

    std::vector<std::pair<std::size_t, double>> checkpoints;
    for (double c : options.checkpoints)
        checkpoints.emplace_back(step_index(c, dt), c);
    std::sort(checkpoints.begin(), checkpoints.end());
    auto next_checkpoint = checkpoints.begin();

    OpinionEnsemble ens = std::move(initial);
    Rng rng = make_rng(seed, replica);
    StepWorkspace workspace;

    auto record = [&](std::size_t step) {
        double const t = static_cast<double>(step) * dt;
        if (step % stride == 0 || step == n_steps)
        {
            result.moments.push_back(empirical_moments(ens, t));
            result.rejection_fraction.push_back(result.stats.total().fraction());
        }
        while (next_checkpoint != checkpoints.end() && next_checkpoint->first == step)
        {
            result.snapshots.push_back(take_snapshot(ens, model.params, options.bins, next_checkpoint->second));
            ++next_checkpoint;
        }
    };

    record(0);
    for (std::size_t step = 1; step <= n_steps; ++step)
    {
        for (std::size_t p = 0; p < ens.families.size(); ++p)
        {
            if (ens.families[p].strategy.is_adaptive())
                ens.families[p].strategy = adaptive_strategy_update(ens, p);
        }
        mc_step(ens, result.plan, model, rng, workspace, result.stats);
        record(step);
    }

    result.final_state = std::move(ens);
    return result;
}

}  // namespace opinion

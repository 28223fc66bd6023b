#include "opinion/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opinion {

std::pair<double, double> scaled_mean_rhs(double m_f, double m_l, MeanSystemParams const& p) noexcept
{
    return {p.a_rate * (m_l - m_f), p.b_rate * (p.psi * (p.target - m_l) + p.mu() * (m_f - m_l))};
}

MeanSystemParams scaled_mean_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p)
{
    auto const& fam = params.family(p);
    return {1.0 / fam.c_fl_hat, 4.0 / (fam.c_l_hat * params.kappa()), strategy.psi(), strategy.target()};
}

PreLimitParams prelimit_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p)
{
    PreLimitParams out;
    out.alpha = params.alpha();
    out.beta = params.beta();
    out.eta_fl_tilde = params.family(p).mass * params.eta_fl(p);
    out.eta_l_tilde = params.family(p).mass * params.eta_l(p);
    out.psi = strategy.psi();
    out.target = strategy.target();
    return out;
}

Eigenvalues prelimit_eigenvalues(PreLimitParams const& p)
{
    double const a = p.alpha * p.eta_fl_tilde;
    double const b = p.beta * p.eta_l_tilde;
    double const s = a + b;

    Eigenvalues ev;
    ev.discriminant = (a - b) * (a - b) + 4.0 * p.mu() * a * b;
    ev.lambda2 = -0.5 * (s + std::sqrt(ev.discriminant));
    ev.lambda1 = p.psi * a * b / ev.lambda2;
    return ev;
}

std::pair<double, double> analytic_means(double t, double m_f0, double m_l0, PreLimitParams const& p)
{
    auto const ev = prelimit_eigenvalues(p);
    double const l1 = ev.lambda1;
    double const l2 = ev.lambda2;
    if (!(std::abs(l1 - l2) > 1e-12 * std::max(std::abs(l1), std::abs(l2))))
        throw std::domain_error("analytic_means: repeated eigenvalue, integrate numerically");

    double const a = p.alpha * p.eta_fl_tilde;
    double const y_f0 = m_f0 - p.target;
    double const y_l0 = m_l0 - p.target;

    // D1 + D2 = y_F0 and D1 l1 + D2 l2 = a (y_L0 - y_F0)
    double const d1 = (a * (y_l0 - y_f0) - l2 * y_f0) / (l1 - l2);
    double const d2 = y_f0 - d1;

    double const e1 = std::exp(l1 * t);
    double const e2 = std::exp(l2 * t);
    double const m_f = d1 * e1 + d2 * e2 + p.target;
    double const m_l = d1 * (1.0 + l1 / a) * e1 + d2 * (1.0 + l2 / a) * e2 + p.target;
    return {m_f, m_l};
}

std::vector<double> multi_mean_rhs(std::vector<double> const& state, std::vector<MeanSystemParams> const& families)
{
    if (state.size() != families.size() + 1)
        throw std::invalid_argument("multi_mean_rhs: state must hold m_F and one mean per family");
    std::vector<double> d(state.size(), 0.0);
    double const m_f = state[0];
    for (std::size_t p = 0; p < families.size(); ++p)
    {
        auto [df, dl] = scaled_mean_rhs(m_f, state[p + 1], families[p]);
        d[0] += df;
        d[p + 1] = dl;
    }
    return d;
}

EnergyParams energy_params(ScaledParams const& params, LeaderStrategy const& strategy, std::size_t p)
{
    auto const& fam = params.family(p);
    EnergyParams out;
    out.c_f = params.c_f();
    out.c_fl = fam.c_fl_hat * fam.mass;
    out.c_l = fam.c_l_hat * fam.mass;
    out.rho = fam.mass;
    out.kappa = params.kappa();
    out.var_ff = params.var_ff();
    out.var_fl = params.var_fl();
    out.var_ll = params.var_ll();
    out.psi = strategy.psi();
    out.target = strategy.target();
    return out;
}

std::pair<double, double> energy_rhs(double e_f,
                                     double e_l,
                                     double m_f,
                                     double m_l,
                                     DiffusionIntegrals const& integrals,
                                     EnergyParams const& p) noexcept
{
    double const rho_fl = p.rho / p.c_fl;
    double const rho_l = p.rho / p.c_l;
    double const pull = p.psi * p.target + p.mu() * m_f;

    double const d_ef = -2.0 / p.c_f * (e_f - m_f * m_f) + 2.0 * rho_fl * (m_f * m_l - e_f)
                        + p.var_ff / p.c_f * integrals.follower + p.var_fl * rho_fl * integrals.follower_leader;
    double const d_el = -2.0 * rho_l * (e_l - m_l * m_l) - 4.0 * rho_l / p.kappa * (e_l + m_l * m_l)
                        + 8.0 * rho_l / p.kappa * pull * m_l + p.var_ll * rho_l * integrals.leader;
    return {d_ef, d_el};
}

//---------------------------------------------------------------------------//

std::vector<double> Trajectory::at(double time) const
{
    if (t.empty())
        throw std::out_of_range("Trajectory::at: empty trajectory");
    if (time <= t.front())
        return y.front();
    if (time >= t.back())
        return y.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    std::size_t const hi = static_cast<std::size_t>(it - t.begin());
    std::size_t const lo = hi - 1;
    double const frac = (time - t[lo]) / (t[hi] - t[lo]);
    std::vector<double> out(y[lo].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = y[lo][i] + frac * (y[hi][i] - y[lo][i]);
    return out;
}

Trajectory integrate(OdeRhs const& rhs, std::vector<double> y0, double t0, double t1, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("integrate: dt must be > 0");
    if (!(t1 >= t0))
        throw std::invalid_argument("integrate: t1 must be >= t0");

    std::size_t const n = y0.size();
    auto axpy = [n](std::vector<double> const& y, double h, std::vector<double> const& k) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = y[i] + h * k[i];
        return out;
    };

    Trajectory traj;
    traj.t.push_back(t0);
    traj.y.push_back(y0);

    auto const full_steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt * (1.0 + 1e-12)));
    std::vector<double> y = std::move(y0);
    double t = t0;
    for (std::size_t step = 0; step <= full_steps; ++step)
    {
        double const t_next = step < full_steps ? t0 + static_cast<double>(step + 1) * dt : t1;
        double const h = t_next - t;
        if (h <= 1e-14 * std::max(1.0, std::abs(t1)))
            break;
        auto const k1 = rhs(t, y);
        auto const k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
        auto const k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
        auto const k4 = rhs(t + h, axpy(y, h, k3));
        for (std::size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = t_next;
        traj.t.push_back(t);
        traj.y.push_back(y);
    }
    return traj;
}

}  // namespace opinion

#include "opinion/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "opinion/format.hpp"
#include "opinion/moments.hpp"

namespace opinion {

namespace {

void write_row(std::ostream& out, std::vector<double> const& values)
{
    for (std::size_t i = 0; i < values.size(); ++i)
        out << (i ? "," : "") << format_real(values[i]);
    out << '\n';
}

std::vector<MeanSystemParams> mean_systems(ScenarioConfig const& cfg)
{
    auto const params = scaled_params(cfg);
    std::vector<MeanSystemParams> out;
    for (std::size_t p = 0; p < cfg.leaders.size(); ++p)
    {
        LeaderStrategy const strategy(cfg.leaders[p].psi, cfg.leaders[p].target);
        out.push_back(prelimit_params(params, strategy, p).as_mean_system());
    }
    return out;
}

}  // namespace

void write_moments_csv(std::ostream& out, RunResult const& result)
{
    std::size_t const families = result.moments.empty() ? 0 : result.moments.front().m_l.size();
    out << "t,m_F,E_F";
    for (std::size_t p = 1; p <= families; ++p)
        out << ",m_L_" << p << ",E_L_" << p << ",psi_" << p;
    out << ",rejection_frac\n";

    for (std::size_t i = 0; i < result.moments.size(); ++i)
    {
        auto const& m = result.moments[i];
        std::vector<double> row{m.t, m.m_f, m.e_f};
        for (std::size_t p = 0; p < families; ++p)
        {
            row.push_back(m.m_l[p]);
            row.push_back(m.e_l[p]);
            row.push_back(m.psi[p]);
        }
        row.push_back(result.rejection_fraction[i]);
        write_row(out, row);
    }
}

void write_histogram_csv(std::ostream& out, Snapshot const& snapshot)
{
    out << "bin_center,density_F";
    for (std::size_t p = 1; p <= snapshot.families.size(); ++p)
        out << ",density_L_" << p;
    out << '\n';
    for (std::size_t i = 0; i < snapshot.followers.bins(); ++i)
    {
        std::vector<double> row{snapshot.followers.bin_center(i), snapshot.followers.density[i]};
        for (auto const& fam : snapshot.families)
            row.push_back(fam.density[i]);
        write_row(out, row);
    }
}

std::string histogram_filename(double t)
{
    return "hist_" + format_real(t) + ".csv";
}

void write_file(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

RunResult run_scenario(ScenarioConfig const& config, std::size_t replica)
{
    return run(initial_ensemble(config, replica), build_model(config), run_options(config), config.simulation.seed,
               replica);
}

//---------------------------------------------------------------------------//

void check_oracle_domain(ScenarioConfig const& config)
{
    std::vector<std::string> reasons;
    if (config.leaders.empty())
        reasons.push_back("at least one leader family is required");
    if (!config.followers.kernel.symmetric())
        reasons.push_back("followers.kernel must be symmetric");
    for (std::size_t p = 0; p < config.leaders.size(); ++p)
    {
        auto const key = "leaders." + std::to_string(p + 1);
        if (!config.leaders[p].follower_kernel.is_unit())
            reasons.push_back(key + ".follower_kernel must be constant(1), got "
                              + config.leaders[p].follower_kernel.to_string());
        if (config.leaders[p].adaptive)
            reasons.push_back(key + " must use a fixed psi (no delta/delta_bar)");
    }
    if (reasons.empty())
        return;
    std::string msg = "mean oracle does not apply:";
    for (auto const& r : reasons)
        msg += "\n  " + r;
    throw DomainError(msg);
}

std::vector<std::vector<double>> oracle_means(ScenarioConfig const& config,
                                              std::vector<double> const& initial,
                                              std::vector<double> const& times)
{
    auto const systems = mean_systems(config);
    if (initial.size() != systems.size() + 1)
        throw std::invalid_argument("oracle_means: initial state must hold m_F and one mean per family");

    std::vector<std::vector<double>> out;
    if (systems.size() == 1)
    {
        auto const params = scaled_params(config);
        LeaderStrategy const strategy(config.leaders[0].psi, config.leaders[0].target);
        auto const pre = prelimit_params(params, strategy, 0);
        try
        {
            for (double t : times)
            {
                auto [m_f, m_l] = analytic_means(t, initial[0], initial[1], pre);
                out.push_back({m_f, m_l});
            }
            return out;
        }
        catch (std::domain_error const&)
        {
            out.clear();  // repeated eigenvalue: fall through to RK4
        }
    }

    double fastest = 0.0;
    for (auto const& s : systems)
        fastest = std::max({fastest, s.a_rate, s.b_rate});
    double const h = std::min(1e-3, 0.01 / std::max(fastest, 1e-12));
    double const t_end = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    auto const traj = integrate([&](double, std::vector<double> const& y) { return multi_mean_rhs(y, systems); },
                                initial, 0.0, t_end, h);
    for (double t : times)
    {
        // Evaluate exactly at t by restarting from the nearest earlier node.
        auto it = std::upper_bound(traj.t.begin(), traj.t.end(), t);
        std::size_t const k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - traj.t.begin() - 1, 0));
        auto const tail = integrate([&](double, std::vector<double> const& y) { return multi_mean_rhs(y, systems); },
                                    traj.y[k], traj.t[k], t, h);
        out.push_back(tail.y.back());
    }
    return out;
}

OracleComparison compare_with_oracle(ScenarioConfig const& config, RunResult const& result)
{
    check_oracle_domain(config);
    if (result.moments.empty())
        throw std::invalid_argument("compare_with_oracle: run recorded no moments");

    auto state_of = [](EmpiricalMoments const& m) {
        std::vector<double> s{m.m_f};
        s.insert(s.end(), m.m_l.begin(), m.m_l.end());
        return s;
    };

    std::vector<double> times;
    for (auto const& m : result.moments)
        times.push_back(m.t);
    auto const oracle = oracle_means(config, state_of(result.moments.front()), times);

    OracleComparison cmp;
    cmp.tolerance = config.output.oracle_tolerance;
    for (std::size_t i = 0; i < result.moments.size(); ++i)
        cmp.rows.push_back({times[i], state_of(result.moments[i]), oracle[i]});

    std::vector<std::size_t> compared;
    if (config.output.checkpoints.empty())
    {
        for (std::size_t i = 0; i < cmp.rows.size(); ++i)
            compared.push_back(i);
    }
    else
    {
        double const half_step = 0.5 * result.plan.dt;
        for (double c : config.output.checkpoints)
        {
            auto it = std::find_if(cmp.rows.begin(), cmp.rows.end(),
                                   [&](OracleRow const& r) { return std::abs(r.t - c) <= half_step; });
            if (it == cmp.rows.end())
                throw std::runtime_error("checkpoint " + format_real(c)
                                         + " has no recorded moments; use a moments_stride that hits it");
            compared.push_back(static_cast<std::size_t>(it - cmp.rows.begin()));
        }
    }

    for (std::size_t i : compared)
    {
        auto const& r = cmp.rows[i];
        cmp.compared_times.push_back(r.t);
        cmp.max_error_follower = std::max(cmp.max_error_follower, std::abs(r.mc[0] - r.oracle[0]));
        for (std::size_t p = 1; p < r.mc.size(); ++p)
            cmp.max_error_leader = std::max(cmp.max_error_leader, std::abs(r.mc[p] - r.oracle[p]));
    }
    return cmp;
}

void write_oracle_csv(std::ostream& out, OracleComparison const& comparison)
{
    std::size_t const families = comparison.rows.empty() ? 0 : comparison.rows.front().mc.size() - 1;
    out << "t,m_F_mc,m_F_oracle";
    for (std::size_t p = 1; p <= families; ++p)
        out << ",m_L_" << p << "_mc,m_L_" << p << "_oracle";
    out << '\n';
    for (auto const& r : comparison.rows)
    {
        std::vector<double> row{r.t};
        for (std::size_t k = 0; k < r.mc.size(); ++k)
        {
            row.push_back(r.mc[k]);
            row.push_back(r.oracle[k]);
        }
        write_row(out, row);
    }
}

//---------------------------------------------------------------------------//

void check_steady_domain(ScenarioConfig const& config)
{
    std::vector<std::string> reasons;
    if (config.leaders.size() != 1)
        reasons.push_back("exactly one leader family is required");
    if (!config.followers.kernel.is_unit())
        reasons.push_back("followers.kernel must be constant(1)");
    auto cap = DiffusionShape::quadratic_cap();
    if (config.followers.diffusion != cap)
        reasons.push_back("followers.diffusion must be quadratic_cap");
    if (config.simulation.fl_diffusion != cap)
        reasons.push_back("simulation.fl_diffusion must be quadratic_cap");
    if (config.simulation.ll_diffusion != cap)
        reasons.push_back("simulation.ll_diffusion must be quadratic_cap");
    for (std::size_t p = 0; p < config.leaders.size(); ++p)
    {
        auto const& l = config.leaders[p];
        auto const key = "leaders." + std::to_string(p + 1);
        if (!l.follower_kernel.is_unit())
            reasons.push_back(key + ".follower_kernel must be constant(1)");
        if (!l.leader_kernel.is_unit())
            reasons.push_back(key + ".leader_kernel must be constant(1)");
        if (l.adaptive)
            reasons.push_back(key + " must use a fixed psi");
        if (!(std::abs(l.target) < 1.0))
            reasons.push_back(key + ".target must lie strictly inside (-1, 1)");
    }
    if (!(config.followers.noise_variance > 0.0 || config.simulation.fl_noise_variance > 0.0))
        reasons.push_back("follower noise must be positive (followers.noise_variance or simulation.fl_noise_variance)");
    if (!(config.simulation.ll_noise_variance > 0.0))
        reasons.push_back("simulation.ll_noise_variance must be positive");
    if (reasons.empty())
        return;
    std::string msg = "closed-form steady state does not apply:";
    for (auto const& r : reasons)
        msg += "\n  " + r;
    throw DomainError(msg);
}

SteadyReport steady_report(ScenarioConfig const& config, OpinionEnsemble const& final_state)
{
    check_steady_domain(config);
    auto const params = scaled_params(config);
    auto const& fam = params.family(0);
    auto const& leader = config.leaders[0];
    double const rho = fam.mass;

    double const b_f = b_follower(params.var_ff(), params.var_fl(), params.c_f(), fam.c_fl_hat * rho, rho);
    double const b_l = b_leader(params.var_ll(), rho, params.kappa(), fam.c_l_hat * rho, leader.psi, 1.0 - leader.psi);
    std::size_t const bins = config.output.bins;

    SteadyReport r{b_f,
                   b_l,
                   normalize(leader.target, b_f, 1.0, Population::Follower),
                   normalize(leader.target, b_l, rho, Population::Leader),
                   histogram(final_state.followers, bins, 1.0),
                   histogram(final_state.families.at(0).leaders, bins, rho),
                   {},
                   {},
                   0.0,
                   0.0};
    r.follower_cells = cell_averages(r.follower, bins);
    r.leader_cells = cell_averages(r.leader, bins);
    r.l1_follower = l1_distance(r.follower_histogram, r.follower_cells);
    r.l1_leader = l1_distance(r.leader_histogram, r.leader_cells);
    return r;
}

void write_steady_csv(std::ostream& out, SteadyReport const& report)
{
    out << "bin_center,density_F_mc,density_F_steady,density_L_mc,density_L_steady\n";
    for (std::size_t i = 0; i < report.follower_histogram.bins(); ++i)
    {
        write_row(out,
                  {report.follower_histogram.bin_center(i),
                   report.follower_histogram.density[i],
                   report.follower_cells.density[i],
                   report.leader_histogram.density[i],
                   report.leader_cells.density[i]});
    }
}

//---------------------------------------------------------------------------//

namespace {

template<class Body>
ExitCode guarded(std::ostream& log, Body body)
{
    try
    {
        return body();
    }
    catch (DomainError const& e)
    {
        log << "refused: " << e.what() << '\n';
        return ExitCode::DomainRefusal;
    }
    catch (CertificateError const& e)
    {
        log << "error: " << e.what() << '\n';
        return ExitCode::ValidationFailure;
    }
    catch (ConfigError const& e)
    {
        log << "error: " << e.what() << '\n';
        return ExitCode::ValidationFailure;
    }
    catch (std::exception const& e)
    {
        log << "error: " << e.what() << '\n';
        return ExitCode::RuntimeFailure;
    }
}

void prepare_dir(std::filesystem::path const& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

template<class Writer>
std::string render(Writer writer)
{
    std::ostringstream out;
    writer(out);
    return out.str();
}

void write_run(std::filesystem::path const& dir, ScenarioConfig const& config, RunResult const& result)
{
    prepare_dir(dir);
    write_file(dir / "config.toml", to_toml(config));
    write_file(dir / "moments.csv", render([&](std::ostream& o) { write_moments_csv(o, result); }));
    for (auto const& snap : result.snapshots)
        write_file(dir / histogram_filename(snap.t), render([&](std::ostream& o) { write_histogram_csv(o, snap); }));
}

}  // namespace

ExitCode cmd_run(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log)
{
    return guarded(log, [&] {
        std::size_t const replicas = config.simulation.replicas;
        for (std::size_t r = 0; r < replicas; ++r)
        {
            auto const result = run_scenario(config, r);
            auto const dir = replicas == 1 ? out_dir : out_dir / ("replica_" + std::to_string(r));
            write_run(dir, config, result);
            log << "wrote " << dir.string() << " (" << result.moments.size() << " moment rows, "
                << result.snapshots.size() << " histograms, rejection fraction "
                << format_real(result.stats.total().fraction()) << ")\n";
        }
        return ExitCode::Success;
    });
}

ExitCode cmd_compare_oracle(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log)
{
    return guarded(log, [&] {
        check_oracle_domain(config);
        auto const result = run_scenario(config);
        auto const cmp = compare_with_oracle(config, result);

        write_run(out_dir, config, result);
        write_file(out_dir / "oracle.csv", render([&](std::ostream& o) { write_oracle_csv(o, cmp); }));

        std::ostringstream report;
        report << "max_abs_error_m_F = " << format_real(cmp.max_error_follower) << '\n'
               << "max_abs_error_m_L = " << format_real(cmp.max_error_leader) << '\n'
               << "tolerance = " << format_real(cmp.tolerance) << '\n'
               << "result = " << (cmp.passed() ? "pass" : "fail") << '\n';
        write_file(out_dir / "oracle_report.txt", report.str());
        log << report.str();
        return cmp.passed() ? ExitCode::Success : ExitCode::ValidationFailure;
    });
}

ExitCode cmd_steady(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log)
{
    return guarded(log, [&] {
        check_steady_domain(config);
        auto const result = run_scenario(config);
        auto const report = steady_report(config, result.final_state);

        write_run(out_dir, config, result);
        write_file(out_dir / "steady.csv", render([&](std::ostream& o) { write_steady_csv(o, report); }));

        std::ostringstream text;
        text << "b_F = " << format_real(report.b_follower) << '\n'
             << "b_L = " << format_real(report.b_leader) << '\n'
             << "l1_follower = " << format_real(report.l1_follower) << '\n'
             << "l1_leader = " << format_real(report.l1_leader) << '\n'
             << "residual_follower = " << format_real(stationarity_residual(report.follower)) << '\n'
             << "residual_leader = " << format_real(stationarity_residual(report.leader)) << '\n';
        write_file(out_dir / "steady_report.txt", text.str());
        log << text.str();
        return ExitCode::Success;
    });
}

}  // namespace opinion

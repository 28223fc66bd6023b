#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "opinion/commands.hpp"
#include "opinion/config.hpp"

using namespace opinion;

namespace {

std::filesystem::path const kConfigs = OPINION_CONFIG_DIR;

std::string read_text(std::filesystem::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> issues_of(std::string const& text, std::vector<std::string> const& overrides = {})
{
    try
    {
        parse_config(text, overrides);
    }
    catch (ConfigError const& e)
    {
        return e.issues();
    }
    return {};
}

bool mentions(std::vector<std::string> const& issues, std::string const& needle)
{
    for (auto const& i : issues)
        if (i.find(needle) != std::string::npos)
            return true;
    return false;
}

std::string const kMinimal = R"toml(
[simulation]
epsilon = 0.01
nu = 1
horizon = 0.05
seed = 3
ll_noise_variance = 0.01
fl_noise_variance = 0.01

[followers]
count = 400
noise_variance = 0.01
initial = "uniform(-1, -0.5)"

[[leaders]]
c_fl_hat = 0.1
c_l_hat = 0.1
psi = 0.5
target = 0.5
initial = "normal(0.5, 0.05)"

[output]
checkpoints = [0.0, 0.05]
)toml";

std::filesystem::path scratch_dir(std::string const& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("opinion_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("bundled test1a config")
{
    auto cfg = load_config(kConfigs / "test1a.toml");
    REQUIRE(cfg.leaders.size() == 1);
    auto const& l = cfg.leaders[0];
    CHECK(l.follower_kernel.is_unit());
    CHECK(cfg.followers.c_f == 1.0);
    CHECK(l.c_fl_hat == 0.1);
    CHECK(l.c_l_hat == 0.1);
    CHECK(l.mass == 0.05);
    CHECK(l.psi == 0.5);
    CHECK(l.target == 0.5);
    CHECK(!l.adaptive);
    CHECK(cfg.simulation.epsilon == 0.01);
    CHECK(scaled_params(cfg).kappa() == doctest::Approx(100.0));
    CHECK(resolved_leader_counts(cfg)[0] == 526);
}

TEST_CASE("bundled test3 config")
{
    auto cfg = load_config(kConfigs / "test3.toml");
    REQUIRE(cfg.leaders.size() == 2);
    CHECK(cfg.leaders[0].c_fl_hat == 0.1);
    CHECK(cfg.leaders[1].c_fl_hat == 1.0);
    CHECK(cfg.leaders[0].target == 0.5);
    CHECK(cfg.leaders[1].target == -0.5);
    for (auto const& l : cfg.leaders)
    {
        REQUIRE(l.adaptive);
        CHECK(l.adaptive->delta == 0.5);
        CHECK(l.adaptive->delta_bar == 0.5);
    }
    CHECK(cfg.followers.initial == InitialLaw::gamma(2.0, 0.25));
}

TEST_CASE("every bundled config loads and round-trips")
{
    int seen = 0;
    for (auto const& entry : std::filesystem::directory_iterator(kConfigs))
    {
        if (entry.path().extension() != ".toml")
            continue;
        ++seen;
        CAPTURE(entry.path().string());
        auto cfg = load_config(entry.path());
        auto text = to_toml(cfg);
        auto again = parse_config(text);
        CHECK(again == cfg);
        CHECK(to_toml(again) == text);
        for (std::size_t p = 0; p < cfg.leaders.size(); ++p)
            CHECK(build_model(cfg).certificate(p).satisfied());
    }
    CHECK(seen >= 5);
}

TEST_CASE("validation errors name their keys")
{
    CHECK(issues_of(kMinimal).empty());

    auto mass = issues_of(kMinimal, {"leaders.1.mass=1.5"});
    CHECK(mentions(mass, "leaders.1.mass"));

    std::string unknown = kMinimal + "\n";
    unknown.replace(unknown.find("[followers]"), 11, "[followers]\ncolour = 3");
    CHECK(mentions(issues_of(unknown), "followers.colour: unknown key"));

    std::string no_seed = kMinimal;
    no_seed.replace(no_seed.find("seed = 3"), 8, "");
    CHECK(mentions(issues_of(no_seed), "simulation.seed: required"));

    CHECK(mentions(issues_of(kMinimal, {"simulation.kappa=100"}), "exactly one of nu or kappa"));
    CHECK(mentions(issues_of(kMinimal, {"leaders.1.psi=1.2"}), "leaders.1.psi"));
    CHECK(mentions(issues_of(kMinimal, {"followers.kernel=\"bounded_confidence(3)\""}), "followers.kernel"));
    CHECK(mentions(issues_of(kMinimal, {"followers.initial=\"triangle(0)\""}), "followers.initial"));
    CHECK(mentions(issues_of(kMinimal, {"output.checkpoints=[0.5]"}), "output.checkpoints"));
    CHECK(mentions(issues_of(kMinimal, {"output.bins=1"}), "output.bins"));
    CHECK(mentions(issues_of(kMinimal, {"simulation.epsilon=\"small\""}), "simulation.epsilon: must be a number"));
    CHECK(mentions(issues_of(kMinimal, {"leaders.1.delta=0.5"}), "leaders.1.delta_bar: required"));
    CHECK(mentions(issues_of("[simulation]\nepsilon = \n"), "<config>"));
    CHECK(mentions(issues_of(kMinimal + "\n[extras]\nx = 1\n"), "extras: unknown section"));

    auto cert = issues_of(kMinimal, {"leaders.1.leader_kernel=\"bounded_confidence(0.5)\""});
    CHECK(mentions(cert, "leaders.1: bound certificate fails (alpha r >= beta/2)"));
    auto loud = issues_of(kMinimal, {"simulation.ll_noise_variance=20"});
    CHECK(mentions(loud, "leader noise support"));
}

TEST_CASE("overrides")
{
    auto cfg = parse_config(kMinimal,
                            {"simulation.horizon=0.5",
                             "leaders.1.psi=0.8",
                             "followers.initial=point(0.1)",
                             "leaders.1.count=7",
                             "output.checkpoints=[]"});
    CHECK(cfg.simulation.horizon == 0.5);
    CHECK(cfg.leaders[0].psi == 0.8);
    CHECK(cfg.followers.initial == InitialLaw::point(0.1));
    CHECK(resolved_leader_counts(cfg)[0] == 7);
    CHECK(cfg.output.checkpoints.empty());

    CHECK(mentions(issues_of(kMinimal, {"horizon"}), "expected KEY=VALUE"));
    CHECK(mentions(issues_of(kMinimal, {"leaders.2.psi=0.1"}), "existing family"));
    CHECK(mentions(issues_of(kMinimal, {"leaders.0.psi=0.1"}), "existing family"));
    CHECK(mentions(issues_of(kMinimal, {"seed=1"}), "expected section.key"));
}

TEST_CASE("initial ensembles are reproducible per replica")
{
    auto cfg = parse_config(kMinimal);
    auto a = initial_ensemble(cfg, 0);
    auto b = initial_ensemble(cfg, 0);
    auto c = initial_ensemble(cfg, 1);
    CHECK(a.followers == b.followers);
    CHECK(a.followers != c.followers);
    CHECK(a.followers.size() == 400);
    CHECK(a.families[0].leaders.size() == 21);
}

TEST_CASE("run command writes the documented files")
{
    auto cfg = parse_config(kMinimal);
    auto dir = scratch_dir("run");
    std::ostringstream log;
    REQUIRE(cmd_run(cfg, dir, log) == ExitCode::Success);
    CHECK(std::filesystem::exists(dir / "moments.csv"));
    CHECK(std::filesystem::exists(dir / "hist_0.csv"));
    CHECK(std::filesystem::exists(dir / "hist_0.05.csv"));
    auto moments = read_text(dir / "moments.csv");
    CHECK(moments.rfind("t,m_F,E_F,m_L_1,E_L_1,psi_1,rejection_frac\n", 0) == 0);
    CHECK(moments.back() == '\n');
    auto hist = read_text(dir / "hist_0.05.csv");
    CHECK(hist.rfind("bin_center,density_F,density_L_1\n", 0) == 0);
    CHECK(parse_config(read_text(dir / "config.toml")) == cfg);

    auto again = scratch_dir("run_again");
    REQUIRE(cmd_run(cfg, again, log) == ExitCode::Success);
    CHECK(read_text(again / "moments.csv") == moments);
    CHECK(read_text(again / "hist_0.05.csv") == hist);

    auto bare = parse_config(kMinimal, {"output.checkpoints=[]"});
    auto only = scratch_dir("run_bare");
    REQUIRE(cmd_run(bare, only, log) == ExitCode::Success);
    int csv = 0;
    for (auto const& e : std::filesystem::directory_iterator(only))
        csv += e.path().extension() == ".csv";
    CHECK(csv == 1);

    auto replicas = parse_config(kMinimal, {"simulation.replicas=2"});
    auto multi = scratch_dir("run_replicas");
    REQUIRE(cmd_run(replicas, multi, log) == ExitCode::Success);
    CHECK(std::filesystem::exists(multi / "replica_0" / "moments.csv"));
    CHECK(std::filesystem::exists(multi / "replica_1" / "moments.csv"));
}

TEST_CASE("run command reports I/O failures")
{
    auto cfg = parse_config(kMinimal);
    auto blocker = scratch_dir("blocked");
    std::ofstream(blocker) << "file, not a directory";
    std::ostringstream log;
    CHECK(cmd_run(cfg, blocker / "out", log) == ExitCode::RuntimeFailure);
    CHECK(log.str().find("error:") != std::string::npos);
    std::filesystem::remove(blocker);
}

TEST_CASE("oracle comparison")
{
    auto cfg = parse_config(kMinimal);
    auto dir = scratch_dir("oracle");
    std::ostringstream log;
    CHECK(cmd_compare_oracle(cfg, dir, log) == ExitCode::Success);
    CHECK(std::filesystem::exists(dir / "oracle.csv"));
    CHECK(read_text(dir / "oracle_report.txt").find("result = pass") != std::string::npos);

    // Consensus at the target without noise: exact agreement.
    auto rest = parse_config(kMinimal,
                             {"followers.initial=point(0.5)",
                              "leaders.1.initial=point(0.5)",
                              "followers.noise_variance=0",
                              "simulation.fl_noise_variance=0",
                              "simulation.ll_noise_variance=0"});
    auto cmp = compare_with_oracle(rest, run_scenario(rest));
    CHECK(cmp.max_error_follower <= 1e-12);
    CHECK(cmp.max_error_leader <= 1e-12);
    CHECK(cmp.compared_times.size() == 2);

    auto gated = parse_config(kMinimal, {"leaders.1.follower_kernel=bounded_confidence(0.5)"});
    CHECK_THROWS_AS(check_oracle_domain(gated), DomainError);
    CHECK(cmd_compare_oracle(gated, scratch_dir("oracle_refused"), log) == ExitCode::DomainRefusal);

    auto adaptive = parse_config(kMinimal, {"leaders.1.delta=0.5", "leaders.1.delta_bar=0.5"});
    CHECK_THROWS_AS(check_oracle_domain(adaptive), DomainError);

    auto strict = parse_config(kMinimal, {"output.oracle_tolerance=1e-9"});
    CHECK(cmd_compare_oracle(strict, scratch_dir("oracle_strict"), log) == ExitCode::ValidationFailure);
}

TEST_CASE("oracle for several families integrates the coupled system")
{
    auto cfg = load_config(kConfigs / "test2.toml", {"followers.count=2000"});
    auto r = run_scenario(cfg);
    auto cmp = compare_with_oracle(cfg, r);
    CHECK(cmp.rows.front().oracle == cmp.rows.front().mc);
    CHECK(cmp.passed());
    auto exact = oracle_means(cfg, {0.1, 0.5, -0.5}, {0.0, 0.1});
    CHECK(exact[0][0] == 0.1);
    CHECK(exact[1][0] < 0.1);
}

TEST_CASE("steady command domain")
{
    auto cfg = parse_config(kMinimal);
    CHECK_NOTHROW(check_steady_domain(cfg));
    auto flat = parse_config(kMinimal, {"followers.diffusion=constant(0.5)", "followers.noise_variance=0"});
    CHECK_THROWS_AS(check_steady_domain(flat), DomainError);
    std::ostringstream log;
    CHECK(cmd_steady(flat, scratch_dir("steady_refused"), log) == ExitCode::DomainRefusal);
    CHECK(log.str().find("followers.diffusion must be quadratic_cap") != std::string::npos);

    auto two = load_config(kConfigs / "test2.toml");
    CHECK_THROWS_AS(check_steady_domain(two), DomainError);

    auto centred = parse_config(kMinimal, {"leaders.1.target=0", "simulation.horizon=0.01", "output.checkpoints=[0.01]"});
    auto dir = scratch_dir("steady");
    REQUIRE(cmd_steady(centred, dir, log) == ExitCode::Success);
    auto report = steady_report(centred, run_scenario(centred).final_state);
    for (std::size_t i = 0; i < report.follower_cells.bins(); ++i)
    {
        std::size_t const j = report.follower_cells.bins() - 1 - i;
        REQUIRE(report.follower_cells.density[i] == doctest::Approx(report.follower_cells.density[j]).epsilon(1e-9));
    }
    CHECK(read_text(dir / "steady.csv").rfind("bin_center,density_F_mc,density_F_steady,density_L_mc,density_L_steady\n",
                                              0)
          == 0);
}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "opinion/config.hpp"
#include "opinion/engine.hpp"
#include "opinion/steady.hpp"

namespace opinion {

enum class ExitCode : int
{
    Success = 0,
    ValidationFailure = 1,  //!< bad config, failed certificate, oracle mismatch
    RuntimeFailure = 2,     //!< I/O and other runtime errors
    DomainRefusal = 3       //!< config outside an oracle's validity domain
};

// Config lies outside the region where an oracle applies.
class DomainError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// CSV output
//---------------------------------------------------------------------------//

// t, m_F, E_F, then m_L_p, E_L_p, psi_p per family, then rejection_frac.
void write_moments_csv(std::ostream& out, RunResult const& result);

// bin_center, density_F, density_L_1, ...
void write_histogram_csv(std::ostream& out, Snapshot const& snapshot);

std::string histogram_filename(double t);

// Writes text to a file, throwing std::runtime_error on failure.
void write_file(std::filesystem::path const& path, std::string const& text);

// Samples the initial ensemble for `replica` and runs it.
RunResult run_scenario(ScenarioConfig const& config, std::size_t replica = 0);

//---------------------------------------------------------------------------//
// Mean-opinion oracle
//---------------------------------------------------------------------------//

// Throws DomainError unless P is symmetric, every S is unit and no strategy
// is adaptive.
void check_oracle_domain(ScenarioConfig const& config);

/*!
 * Oracle means (m_F, m_L_1, ..., m_L_M) at the given times from the initial
 * means. One family uses the exact solution, several are integrated with RK4.
 */
std::vector<std::vector<double>> oracle_means(ScenarioConfig const& config,
                                              std::vector<double> const& initial,
                                              std::vector<double> const& times);

struct OracleRow
{
    double t = 0.0;
    std::vector<double> mc;      //!< m_F, m_L_1, ...
    std::vector<double> oracle;  //!< same layout
};

struct OracleComparison
{
    std::vector<OracleRow> rows;
    std::vector<double> compared_times;  //!< checkpoints, or every row if none
    double max_error_follower = 0.0;
    double max_error_leader = 0.0;
    double tolerance = 0.0;

    bool passed() const noexcept { return max_error_follower <= tolerance && max_error_leader <= tolerance; }
};

OracleComparison compare_with_oracle(ScenarioConfig const& config, RunResult const& result);

void write_oracle_csv(std::ostream& out, OracleComparison const& comparison);

//---------------------------------------------------------------------------//
// Stationary densities
//---------------------------------------------------------------------------//

// Throws DomainError unless all kernels are unit, all diffusions are
// QuadraticCap, there is one non-adaptive family and both noise levels are
// positive.
void check_steady_domain(ScenarioConfig const& config);

struct SteadyReport
{
    double b_follower = 0.0;
    double b_leader = 0.0;
    SteadyDensity follower;
    SteadyDensity leader;
    DensityTable follower_histogram;
    DensityTable leader_histogram;
    DensityTable follower_cells;
    DensityTable leader_cells;
    double l1_follower = 0.0;
    double l1_leader = 0.0;
};

SteadyReport steady_report(ScenarioConfig const& config, OpinionEnsemble const& final_state);

// bin_center, density_F_mc, density_F_steady, density_L_mc, density_L_steady
void write_steady_csv(std::ostream& out, SteadyReport const& report);

//---------------------------------------------------------------------------//
// Subcommands; messages go to `log`
//---------------------------------------------------------------------------//

ExitCode cmd_run(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log);
ExitCode cmd_compare_oracle(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log);
ExitCode cmd_steady(ScenarioConfig const& config, std::filesystem::path const& out_dir, std::ostream& log);

}  // namespace opinion

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opinion/core.hpp"
#include "opinion/engine.hpp"

namespace opinion {

//---------------------------------------------------------------------------//
// Scenario description, one struct per config section
//---------------------------------------------------------------------------//

struct SimulationSection
{
    double epsilon = 0.01;
    std::optional<double> nu;
    std::optional<double> kappa;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::size_t replicas = 1;
    DiffusionShape fl_diffusion = DiffusionShape::quadratic_cap();  //!< D hat
    double fl_noise_variance = 0.0;
    DiffusionShape ll_diffusion = DiffusionShape::quadratic_cap();  //!< D tilde
    double ll_noise_variance = 0.0;

    friend bool operator==(SimulationSection const&, SimulationSection const&) = default;
};

struct FollowerSection
{
    std::size_t count = 10000;
    double c_f = 1.0;
    CompromiseKernel kernel = CompromiseKernel::constant(1.0);   //!< P
    DiffusionShape diffusion = DiffusionShape::quadratic_cap();  //!< D
    double noise_variance = 0.0;
    InitialLaw initial = InitialLaw::uniform(-1.0, 1.0);

    friend bool operator==(FollowerSection const&, FollowerSection const&) = default;
};

struct LeaderSection
{
    std::optional<std::size_t> count;  //!< unset: derived from mass
    double mass = kDefaultLeaderMass;
    double c_fl_hat = 0.1;
    double c_l_hat = 0.1;
    double psi = 0.5;
    double target = 0.0;
    std::optional<AdaptiveWindows> adaptive;
    CompromiseKernel follower_kernel = CompromiseKernel::constant(1.0);  //!< S
    CompromiseKernel leader_kernel = CompromiseKernel::constant(1.0);    //!< R
    InitialLaw initial = InitialLaw::point(0.0);

    friend bool operator==(LeaderSection const&, LeaderSection const&) = default;
};

struct OutputSection
{
    std::vector<double> checkpoints;
    std::size_t bins = 100;
    std::size_t moments_stride = 1;
    double oracle_tolerance = 0.02;

    friend bool operator==(OutputSection const&, OutputSection const&) = default;
};

struct ScenarioConfig
{
    SimulationSection simulation;
    FollowerSection followers;
    std::vector<LeaderSection> leaders;
    OutputSection output;

    friend bool operator==(ScenarioConfig const&, ScenarioConfig const&) = default;
};

//---------------------------------------------------------------------------//
// Loading
//---------------------------------------------------------------------------//

// Every problem found while validating a config, each naming its key.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> issues);

    std::vector<std::string> const& issues() const noexcept { return issues_; }

  private:
    std::vector<std::string> issues_;
};

/*!
 * Parses TOML text, applies `overrides` ("dotted.key=value", leader families
 * addressed as leaders.1.psi with 1-based index) and validates. Throws
 * ConfigError with all issues found, including bound certificate failures.
 */
ScenarioConfig parse_config(std::string_view text,
                            std::vector<std::string> const& overrides = {},
                            std::string_view source = "<config>");

// Reads the file then parse_config. Unreadable files raise std::runtime_error.
ScenarioConfig load_config(std::filesystem::path const& path, std::vector<std::string> const& overrides = {});

// Canonical TOML: every key written, fixed order, shortest round-trip reals.
std::string to_toml(ScenarioConfig const& config);

//---------------------------------------------------------------------------//
// Building run inputs
//---------------------------------------------------------------------------//

ScaledParams scaled_params(ScenarioConfig const& config);
Model build_model(ScenarioConfig const& config);
std::vector<std::size_t> resolved_leader_counts(ScenarioConfig const& config);

// Initial ensemble for a replica, drawn from the initial-data stream.
OpinionEnsemble initial_ensemble(ScenarioConfig const& config, std::size_t replica = 0);

RunOptions run_options(ScenarioConfig const& config);

}  // namespace opinion

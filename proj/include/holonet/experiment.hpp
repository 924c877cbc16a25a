#ifndef HOLONET_EXPERIMENT_HPP
#define HOLONET_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holonet/bp_oracle.hpp"
#include "holonet/dynamics.hpp"
#include "holonet/network.hpp"
#include "holonet/signals.hpp"

namespace holonet
{

enum class Preset
{
    fig1a,
    fig1b,
    fig2a,
    fig2b,
    limit,
    custom,
};

std::string to_string(Preset preset);
std::optional<Preset> parse_preset(const std::string& name);

/// One analytic signal: constant | exponential | ramp | transition.
struct SignalConfig
{
    std::string kind{"constant"};
    Eigen::VectorXd value;  // constant value, exponential/ramp level, transition start value
    Eigen::VectorXd to;     // transition end value
    double rate{1.0};       // exponential
    double eps{0.05};       // ramp mollification width
    double start{0.0};      // transition
    double width{1.0};      // transition
};

struct ScheduleConfig
{
    std::optional<std::filesystem::path> dataset; // delimited file, resolved against the config directory
    Dataset examples;                             // used when no dataset file is given
    double tau{1.0};
    double eps{0.1};
};

struct LimitConfig
{
    std::vector<double> mass_w{1e-1, 1e-2, 1e-3};
    std::string ratio{"squared"}; // squared: m_x = m_W^2; proportional: m_x = ratio_constant * m_W
    double ratio_constant{0.5};
    double base_dt{1e-2};
    std::size_t skip_plateaus{0};
};

struct ExperimentConfig
{
    Preset preset{Preset::custom};
    NetworkDescription network;
    DynParams params;
    SignalConfig input;
    SignalConfig target;
    std::optional<ScheduleConfig> schedule; // replaces input/target when present
    Eigen::VectorXd initial_weights;       // empty: zeros, plus init_scale noise
    double init_scale{0.0};
    std::uint64_t seed{0};
    int record_stride{10};
    std::filesystem::path output_dir;
    LimitConfig limit;
};

/// Exact parameterization of a preset experiment.
ExperimentConfig preset_config(Preset preset);

NetworkDescription linear_neuron_description();
NetworkDescription tanh_pair_description();

/// Parses a JSON config: the preset is applied first, then every key present in
/// the file overrides it. Relative dataset paths resolve against the file's
/// directory. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

Drive build_drive(const ExperimentConfig& config);
Eigen::VectorXd initial_weights(const ExperimentConfig& config, const NetworkSpec& net);

struct ExperimentResult
{
    DynState final_state;
    std::vector<LimitRow> limit_rows;
    std::map<std::string, double> metrics;
};

/// Runs the experiment, streaming trajectory rows (or the limit table) to `csv`.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& csv);

void write_trajectory_header(std::ostream& out, const NetworkSpec& net);
void write_trajectory_row(std::ostream& out, const TrajectorySample& sample);
void write_limit_table(std::ostream& out, const std::vector<LimitRow>& rows);
void write_summary(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result);

} // namespace holonet

#endif // HOLONET_EXPERIMENT_HPP

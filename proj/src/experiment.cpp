#include "holonet/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "holonet/errors.hpp"

namespace holonet
{

using nlohmann::json;

std::string to_string(Preset preset)
{
    switch (preset)
    {
    case Preset::fig1a: return "fig1a";
    case Preset::fig1b: return "fig1b";
    case Preset::fig2a: return "fig2a";
    case Preset::fig2b: return "fig2b";
    case Preset::limit: return "limit";
    case Preset::custom: return "custom";
    }
    return "custom";
}

std::optional<Preset> parse_preset(const std::string& name)
{
    for (const auto p : {Preset::fig1a, Preset::fig1b, Preset::fig2a, Preset::fig2b, Preset::limit, Preset::custom})
        if (to_string(p) == name)
            return p;
    return std::nullopt;
}

NetworkDescription linear_neuron_description()
{
    // x^2 = w x^1, x^1 clamped to e(t)
    return {1, {{2, Activation::identity}}, {{2, 1}}, {2}};
}

NetworkDescription tanh_pair_description()
{
    // x^2 = tanh(w x^1)
    return {1, {{2, Activation::tanh}}, {{2, 1}}, {2}};
}

namespace
{

Eigen::VectorXd vec1(double v)
{
    return Eigen::VectorXd::Constant(1, v);
}

SignalConfig constant_signal(double v)
{
    SignalConfig s;
    s.kind = "constant";
    s.value = vec1(v);
    return s;
}

} // namespace

/*
 * Unit masses and dissipation throughout. The input signals are reconstructions:
 *   fig1a  e(t) = 3 (1 - exp(-t)), w(0) = 0
 *   fig1b  e(t) = 3 (1 - t) after a C^2 flat start of width 0.05, w(0) = 0.01
 *   fig2*  e(t) rises 0 -> 3 over [0, 2] so that all initial data are null
 */
ExperimentConfig preset_config(Preset preset)
{
    ExperimentConfig cfg;
    cfg.preset = preset;
    cfg.params = DynParams{};
    cfg.params.dt = 1e-3;
    cfg.record_stride = 10;

    switch (preset)
    {
    case Preset::fig1a:
        cfg.network = linear_neuron_description();
        cfg.params.horizon = 20.0;
        cfg.input.kind = "exponential";
        cfg.input.value = vec1(3.0);
        cfg.input.rate = 1.0;
        cfg.target = constant_signal(3.0);
        cfg.initial_weights = vec1(0.0);
        break;
    case Preset::fig1b:
        cfg.network = linear_neuron_description();
        cfg.params.horizon = 0.8;
        cfg.input.kind = "ramp";
        cfg.input.value = vec1(3.0);
        cfg.input.eps = 0.05;
        cfg.target = constant_signal(3.0);
        cfg.initial_weights = vec1(0.01);
        cfg.record_stride = 1;
        break;
    case Preset::fig2a:
    case Preset::fig2b:
        cfg.network = tanh_pair_description();
        cfg.params.horizon = 200.0;
        cfg.params.penalty = preset == Preset::fig2b ? 1.0 : 0.0;
        cfg.input.kind = "transition";
        cfg.input.value = vec1(0.0);
        cfg.input.to = vec1(3.0);
        cfg.input.start = 0.0;
        cfg.input.width = 2.0;
        cfg.target = constant_signal(std::tanh(3.0));
        cfg.initial_weights = vec1(0.0);
        cfg.record_stride = 100;
        break;
    case Preset::limit:
    {
        cfg.network = linear_neuron_description();
        cfg.params.horizon = 6.0;
        cfg.params.gamma = 1.0;
        ScheduleConfig sched;
        sched.tau = 2.0;
        sched.eps = 0.2;
        sched.examples.inputs = {vec1(1.0), vec1(2.0)};
        sched.examples.targets = {vec1(2.0), vec1(1.0)};
        cfg.schedule = sched;
        cfg.initial_weights = vec1(0.0);
        break;
    }
    case Preset::custom:
        cfg.input = constant_signal(0.0);
        cfg.target = constant_signal(0.0);
        break;
    }
    return cfg;
}

namespace
{

Eigen::VectorXd to_vector(const json& j, const std::string& what)
{
    if (j.is_number())
        return vec1(j.get<double>());
    if (!j.is_array())
        throw ConfigError(what + " must be a number or an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
            throw ConfigError(what + " must contain only numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try
    {
        out = j.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

NetworkDescription parse_network(const json& j)
{
    if (!j.is_object())
        throw ConfigError("'network' must be an object");
    NetworkDescription desc;
    read(j, "inputs", desc.input_count);
    if (j.contains("neurons"))
    {
        for (const auto& n : j.at("neurons"))
        {
            NeuronDescription neuron{};
            if (!n.contains("id"))
                throw ConfigError("neuron entry without 'id'");
            read(n, "id", neuron.id);
            std::string act = "identity";
            read(n, "activation", act);
            const auto parsed = parse_activation(act);
            if (!parsed)
                throw ConfigError("unknown activation '" + act + "'");
            neuron.activation = *parsed;
            desc.neurons.push_back(neuron);
        }
    }
    if (j.contains("edges"))
    {
        for (const auto& e : j.at("edges"))
        {
            json to;
            json from;
            if (e.is_array() && e.size() == 2)
            {
                to = e[0];
                from = e[1];
            }
            else if (e.is_object() && e.contains("to") && e.contains("from"))
            {
                to = e.at("to");
                from = e.at("from");
            }
            else
            {
                throw ConfigError("edge must be [to, from] or {\"to\":..,\"from\":..}");
            }
            if (!to.is_number_integer())
                throw ConfigError("edge target must be an integer id");
            EdgeDescription edge{to.get<int>(), std::nullopt};
            if (from.is_number_integer())
                edge.source = from.get<int>();
            else if (!(from.is_string() && from.get<std::string>() == "bias"))
                throw ConfigError("edge source must be an integer id or \"bias\"");
            desc.edges.push_back(edge);
        }
    }
    read(j, "outputs", desc.outputs);
    return desc;
}

void parse_signal(const json& j, SignalConfig& s)
{
    if (!j.is_object())
        throw ConfigError("signal must be an object");
    read(j, "kind", s.kind);
    if (s.kind != "constant" && s.kind != "exponential" && s.kind != "ramp" && s.kind != "transition")
        throw ConfigError("unknown signal kind '" + s.kind + "'");
    for (const char* key : {"value", "level", "from"})
        if (j.contains(key))
            s.value = to_vector(j.at(key), key);
    if (j.contains("to"))
        s.to = to_vector(j.at("to"), "to");
    read(j, "rate", s.rate);
    read(j, "eps", s.eps);
    read(j, "start", s.start);
    read(j, "width", s.width);
}

void parse_schedule(const json& j, ScheduleConfig& s, const std::filesystem::path& base_dir)
{
    if (!j.is_object())
        throw ConfigError("'schedule' must be an object");
    read(j, "tau", s.tau);
    read(j, "eps", s.eps);
    if (j.contains("dataset"))
    {
        std::filesystem::path p = j.at("dataset").get<std::string>();
        s.dataset = p.is_relative() ? base_dir / p : p;
    }
    if (j.contains("examples"))
    {
        s.examples = {};
        for (const auto& ex : j.at("examples"))
        {
            if (!ex.contains("input") || !ex.contains("target"))
                throw ConfigError("schedule example needs 'input' and 'target'");
            s.examples.inputs.push_back(to_vector(ex.at("input"), "input"));
            s.examples.targets.push_back(to_vector(ex.at("target"), "target"));
        }
    }
}

std::unique_ptr<TimeSignal> make_signal(const SignalConfig& s)
{
    if (s.kind == "constant")
        return std::make_unique<ConstantSignal>(s.value);
    if (s.kind == "exponential")
        return std::make_unique<ExponentialApproach>(s.value, s.rate);
    if (s.kind == "ramp")
        return std::make_unique<MollifiedRamp>(s.value, s.eps);
    if (s.kind == "transition")
        return std::make_unique<SmoothTransition>(s.value, s.to, s.start, s.width);
    throw ConfigError("unknown signal kind '" + s.kind + "'");
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    json j;
    try
    {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    }
    catch (const json::parse_error& err)
    {
        throw ConfigError(std::string("config parse error: ") + err.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    std::string preset_name = "custom";
    read(j, "preset", preset_name);
    const auto preset = parse_preset(preset_name);
    if (!preset)
        throw ConfigError("unknown preset '" + preset_name + "'");
    ExperimentConfig cfg = preset_config(*preset);

    if (j.contains("network"))
        cfg.network = parse_network(j.at("network"));
    else if (*preset == Preset::custom)
        throw ConfigError("custom experiments need a 'network' section");

    if (j.contains("params"))
    {
        const auto& p = j.at("params");
        read(p, "m_x", cfg.params.mass_x);
        read(p, "m_w", cfg.params.mass_w);
        read(p, "theta", cfg.params.theta);
        read(p, "gamma", cfg.params.gamma);
        read(p, "penalty", cfg.params.penalty);
        read(p, "dt", cfg.params.dt);
        read(p, "horizon", cfg.params.horizon);
    }
    if (j.contains("input"))
    {
        parse_signal(j.at("input"), cfg.input);
        cfg.schedule.reset();
    }
    if (j.contains("target"))
        parse_signal(j.at("target"), cfg.target);
    if (j.contains("schedule"))
    {
        ScheduleConfig sched = cfg.schedule.value_or(ScheduleConfig{});
        parse_schedule(j.at("schedule"), sched, base_dir);
        cfg.schedule = sched;
    }
    if (j.contains("initial_weights"))
    {
        const auto& w = j.at("initial_weights");
        cfg.initial_weights = w.is_array() && w.empty() ? Eigen::VectorXd{} : to_vector(w, "initial_weights");
    }
    read(j, "init_scale", cfg.init_scale);
    read(j, "seed", cfg.seed);
    read(j, "record_stride", cfg.record_stride);
    if (j.contains("output_dir"))
        cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("limit"))
    {
        const auto& l = j.at("limit");
        read(l, "mass_w", cfg.limit.mass_w);
        read(l, "ratio", cfg.limit.ratio);
        read(l, "ratio_constant", cfg.limit.ratio_constant);
        read(l, "base_dt", cfg.limit.base_dt);
        read(l, "skip_plateaus", cfg.limit.skip_plateaus);
        if (cfg.limit.ratio != "squared" && cfg.limit.ratio != "proportional")
            throw ConfigError("limit ratio must be 'squared' or 'proportional'");
    }
    if (cfg.record_stride < 1)
        throw ConfigError("record_stride must be at least 1");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

Drive build_drive(const ExperimentConfig& config)
{
    if (config.schedule)
    {
        const auto& s = *config.schedule;
        const auto omega = static_cast<Eigen::Index>(config.network.input_count);
        const auto eta = static_cast<Eigen::Index>(config.network.outputs.size());
        const Dataset data = s.dataset ? load_dataset(*s.dataset, omega, eta) : s.examples;
        return make_drive(build_schedule(data, s.tau, s.eps));
    }
    return {make_signal(config.input), make_signal(config.target)};
}

Eigen::VectorXd initial_weights(const ExperimentConfig& config, const NetworkSpec& net)
{
    Eigen::VectorXd w = config.initial_weights.size() == 0 ? Eigen::VectorXd::Zero(net.weight_count())
                                                          : config.initial_weights;
    if (w.size() != net.weight_count())
        throw ConfigError("initial_weights has " + std::to_string(w.size()) + " entries, network has " +
                          std::to_string(net.weight_count()) + " weights");
    if (config.init_scale > 0.0)
    {
        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> normal(0.0, config.init_scale);
        for (Eigen::Index e = 0; e < w.size(); ++e)
            w[e] += normal(rng);
    }
    return w;
}

void write_trajectory_header(std::ostream& out, const NetworkSpec& net)
{
    out << "t";
    for (Eigen::Index i = 0; i < net.neuron_count(); ++i)
        out << ",x_" << net.label(i);
    for (Eigen::Index e = 0; e < net.weight_count(); ++e)
        out << ',' << net.weight_label(e);
    for (Eigen::Index i = 0; i < net.neuron_count(); ++i)
        out << ",xdot_" << net.label(i);
    for (Eigen::Index e = 0; e < net.weight_count(); ++e)
        out << ",wdot" << net.weight_label(e).substr(1);
    for (Eigen::Index i = 0; i < net.neuron_count(); ++i)
        out << ",lambda_" << net.label(i);
    for (Eigen::Index i = 0; i < net.neuron_count(); ++i)
        out << ",g_" << net.label(i);
    out << ",V\n";
}

void write_trajectory_row(std::ostream& out, const TrajectorySample& s)
{
    out << std::setprecision(17) << s.t;
    for (const auto* v : {&s.x, &s.w, &s.xdot, &s.wdot, &s.multipliers, &s.g})
        for (Eigen::Index i = 0; i < v->size(); ++i)
            out << ',' << (*v)[i];
    out << ',' << s.loss << '\n';
}

void write_limit_table(std::ostream& out, const std::vector<LimitRow>& rows)
{
    out << "m_x,m_w,theta,dt,multiplier_deviation,velocity_deviation,deviation,velocity_rhs_deviation,status\n";
    out << std::setprecision(17);
    for (const auto& r : rows)
    {
        out << r.masses.mass_x << ',' << r.masses.mass_w << ',' << r.theta << ',' << r.dt << ','
            << r.multiplier_deviation << ',' << r.velocity_deviation << ',' << r.deviation << ','
            << r.velocity_rhs_deviation << ',' << (r.ok ? "ok" : "blow-up") << '\n';
    }
}

namespace
{

ExperimentResult run_limit(const ExperimentConfig& config, const NetworkSpec& net, const Drive& drive,
                           std::ostream& csv)
{
    if (!config.schedule)
        throw ConfigError("the limit experiment needs a plateau schedule");
    const auto& plateau = dynamic_cast<const PlateauSignal&>(*drive.input);

    LimitOptions options;
    options.gamma = config.params.gamma;
    options.horizon = config.params.horizon;
    options.base_dt = config.limit.base_dt;
    options.grid_unit = 0.5 * plateau.period();
    options.sample_times = plateau_midpoints(plateau, options.horizon, config.limit.skip_plateaus);

    const auto masses = config.limit.ratio == "squared"
                            ? squared_mass_sequence(config.limit.mass_w)
                            : proportional_mass_sequence(config.limit.mass_w, config.limit.ratio_constant);

    ExperimentResult result;
    result.limit_rows = limit_comparison(net, drive, initial_weights(config, net), masses, options);
    write_limit_table(csv, result.limit_rows);

    bool monotone = true;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < result.limit_rows.size(); ++k)
    {
        const auto& r = result.limit_rows[k];
        result.metrics["deviation_" + std::to_string(k)] = r.deviation;
        if (!r.ok)
            monotone = false;
        if (k > 0)
        {
            const auto& prev = result.limit_rows[k - 1];
            monotone = monotone && r.deviation < prev.deviation;
            const double decades = std::log10(prev.masses.mass_w / r.masses.mass_w);
            if (r.deviation > 0.0 && decades > 0.0)
                worst_ratio = std::min(worst_ratio, std::pow(prev.deviation / r.deviation, 1.0 / decades));
        }
    }
    result.metrics["monotone"] = monotone ? 1.0 : 0.0;
    if (std::isfinite(worst_ratio))
        result.metrics["min_reduction_per_decade"] = worst_ratio;
    return result;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& csv)
{
    validate(config.params);
    const NetworkSpec net = build_network(config.network);
    const Drive drive = build_drive(config);

    if (config.preset == Preset::limit)
        return run_limit(config, net, drive, csv);

    const DynState start = make_initial_state(net, initial_weights(config, net), drive);

    write_trajectory_header(csv, net);
    ExperimentResult result;
    double max_g = 0.0;
    double max_hidden = 0.0;
    double tracking = 0.0;
    double final_loss = 0.0;
    ActionAccumulator action(config.params);
    long long count = 0;
    const long long steps = std::llround(config.params.horizon / config.params.dt);

    result.final_state =
        integrate(start, net, drive, config.params, 1, [&](const TrajectorySample& s) {
            max_g = std::max(max_g, s.g.cwiseAbs().maxCoeff());
            max_hidden = std::max(max_hidden, s.hidden_residual);
            final_loss = s.loss;
            action.add(s);
            if (config.preset == Preset::fig1b && s.t >= 0.2 - 1e-12 && s.t <= 0.8 + 1e-12)
                tracking = std::max(tracking, std::abs(s.w[0] * (1.0 - s.t) - 1.0));
            if (count % config.record_stride == 0 || count == steps)
                write_trajectory_row(csv, s);
            ++count;
        });

    result.metrics["max_abs_g"] = max_g;
    result.metrics["max_hidden_residual"] = max_hidden;
    result.metrics["final_loss"] = final_loss;
    result.metrics["action"] = action.value().action;
    result.metrics["action_constraint_term"] = action.value().constraint_term;
    if (config.preset != Preset::custom && net.weight_count() == 1)
        result.metrics["weight_error"] = std::abs(result.final_state.w[0] - 1.0);
    if (config.preset == Preset::fig1b)
        result.metrics["tracking_error"] = tracking;
    return result;
}

void write_summary(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result)
{
    out << std::setprecision(17);
    out << "preset = " << to_string(config.preset) << '\n';
    out << "m_x = " << config.params.mass_x << '\n';
    out << "m_w = " << config.params.mass_w << '\n';
    out << "theta = " << config.params.theta << '\n';
    out << "gamma = " << config.params.gamma << '\n';
    out << "penalty = " << config.params.penalty << '\n';
    out << "dt = " << config.params.dt << '\n';
    out << "horizon = " << config.params.horizon << '\n';
    out << "record_stride = " << config.record_stride << '\n';
    out << "seed = " << config.seed << '\n';
    out << "init_scale = " << config.init_scale << '\n';
    if (config.preset == Preset::limit)
    {
        out << "limit.ratio = " << config.limit.ratio << '\n';
        out << "limit.ratio_constant = " << config.limit.ratio_constant << '\n';
        out << "limit.base_dt = " << config.limit.base_dt << '\n';
    }
    else
    {
        const NetworkSpec net = build_network(config.network);
        out << "t_final = " << result.final_state.t << '\n';
        for (Eigen::Index e = 0; e < net.weight_count(); ++e)
            out << "final." << net.weight_label(e) << " = " << result.final_state.w[e] << '\n';
    }
    for (const auto& [key, value] : result.metrics)
        out << key << " = " << value << '\n';
}

} // namespace holonet

#include "holonet/bp_oracle.hpp"

#include <cmath>
#include <future>

#include "holonet/errors.hpp"

namespace holonet
{

std::vector<MassPair> squared_mass_sequence(const std::vector<double>& mass_w)
{
    std::vector<MassPair> out;
    for (const double m : mass_w)
        out.push_back({m * m, m});
    return out;
}

std::vector<MassPair> proportional_mass_sequence(const std::vector<double>& mass_w, double ratio)
{
    std::vector<MassPair> out;
    for (const double m : mass_w)
        out.push_back({ratio * m, m});
    return out;
}

std::vector<double> plateau_midpoints(const PlateauSignal& signal, double horizon, std::size_t skip_first)
{
    std::vector<double> times;
    for (std::size_t n = skip_first;; ++n)
    {
        const double t = (static_cast<double>(n) + 0.5) * signal.period();
        if (t > horizon)
            break;
        times.push_back(t);
    }
    return times;
}

namespace
{

LimitRow run_limit_case(const NetworkSpec& net, const Drive& drive, const Eigen::VectorXd& initial_weights,
                        const MassPair& masses, const LimitOptions& options)
{
    LimitRow row;
    row.masses = masses;
    row.theta = options.gamma / masses.mass_w;

    const double nominal = options.base_dt * std::sqrt(masses.mass_w);
    const double per_unit = std::ceil(options.grid_unit / nominal);
    row.dt = options.grid_unit / per_unit;

    DynParams params;
    params.mass_x = masses.mass_x;
    params.mass_w = masses.mass_w;
    params.theta = row.theta;
    params.gamma = options.gamma;
    params.penalty = 0.0;
    params.dt = row.dt;
    params.horizon = options.horizon;

    try
    {
        const DynState start = make_initial_state(net, initial_weights, drive);
        integrate(start, net, drive, params, 1, [&](const TrajectorySample& s) {
            bool wanted = false;
            for (const double t : options.sample_times)
                wanted = wanted || std::abs(s.t - t) < 0.5 * row.dt;
            if (!wanted)
                return;

            const SignalSample input = drive.input->sample(s.t);
            const Eigen::VectorXd target = drive.target->sample(s.t).value;
            const Eigen::VectorXd delta = gram_deltas<double>(net, s.x, s.w, target);
            const Eigen::VectorXd flow = gradient_flow_step<double>(s.w, options.gamma, net, input.value, target);
            row.multiplier_deviation =
                std::max(row.multiplier_deviation, (s.multipliers - delta).cwiseAbs().maxCoeff());
            if (s.w.size() > 0)
                row.velocity_deviation = std::max(row.velocity_deviation, (s.wdot - flow).cwiseAbs().maxCoeff());

            const auto ce = eval_constraints<double>(net, s.x, s.w, s.xdot, s.wdot, input);
            const Eigen::VectorXd v = -options.gamma * (ce.Gx * s.xdot);
            const Eigen::VectorXd delta_v = solve_triangular_gram<double>(ce.Gx.transpose(), v);
            row.velocity_rhs_deviation =
                std::max(row.velocity_rhs_deviation, (delta_v - delta).cwiseAbs().maxCoeff());
        });
    }
    catch (const NumericalError& err)
    {
        row.ok = false;
        row.failure = err.what();
    }
    row.deviation = std::max(row.multiplier_deviation, row.velocity_deviation);
    return row;
}

} // namespace

std::vector<LimitRow> limit_comparison(const NetworkSpec& net, const Drive& drive, const Eigen::VectorXd& initial_weights,
                                       const std::vector<MassPair>& masses, const LimitOptions& options)
{
    if (!(options.gamma > 0.0))
        throw ConfigError("gamma must be positive");
    for (const auto& m : masses)
        if (!(m.mass_x > 0.0) || !(m.mass_w > 0.0))
            throw ConfigError("masses must be positive");

    std::vector<std::future<LimitRow>> pending;
    for (const auto& m : masses)
        pending.push_back(std::async(std::launch::async, run_limit_case, std::cref(net), std::cref(drive),
                                     std::cref(initial_weights), m, std::cref(options)));
    std::vector<LimitRow> rows;
    for (auto& f : pending)
        rows.push_back(f.get());
    return rows;
}

} // namespace holonet

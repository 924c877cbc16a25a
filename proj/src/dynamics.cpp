#include "holonet/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "holonet/errors.hpp"

namespace holonet
{

void validate(const DynParams& params)
{
    if (!(params.mass_x > 0.0))
        throw ConfigError("m_x must be positive");
    if (!(params.mass_w > 0.0))
        throw ConfigError("m_W must be positive");
    if (!(params.theta >= 0.0))
        throw ConfigError("theta must be non-negative");
    if (!(params.gamma > 0.0))
        throw ConfigError("gamma must be positive");
    if (!(params.penalty >= 0.0))
        throw ConfigError("penalty coefficient must be non-negative");
    if (!(params.dt > 0.0))
        throw ConfigError("dt must be positive");
    if (!(params.horizon >= 0.0))
        throw ConfigError("horizon must be non-negative");
}

Acceleration<double> el_acceleration(const NetworkSpec& net, const DynState& state, const Drive& drive,
                                     const DynParams& params)
{
    return el_acceleration<double>(net, state.x, state.w, state.xdot, state.wdot, drive.input->sample(state.t),
                                   drive.target->sample(state.t).value, params);
}

DynState make_initial_state(const NetworkSpec& net, const Eigen::VectorXd& initial_weights, const Drive& drive,
                            double t0, double tolerance)
{
    if (initial_weights.size() != net.weight_count())
        throw ConfigError("expected " + std::to_string(net.weight_count()) + " initial weights, got " +
                          std::to_string(initial_weights.size()));
    if (drive.input->channels() != net.input_count())
        throw ConfigError("input signal has " + std::to_string(drive.input->channels()) + " channels, network has " +
                          std::to_string(net.input_count()) + " inputs");
    if (drive.target->channels() != net.output_count())
        throw ConfigError("target signal has " + std::to_string(drive.target->channels()) +
                          " channels, network has " + std::to_string(net.output_count()) + " outputs");

    const SignalSample input = drive.input->sample(t0);
    DynState state;
    state.t = t0;
    state.w = initial_weights;
    state.x = forward_pass<double>(net, input.value, initial_weights);
    state.xdot = Eigen::VectorXd::Zero(net.neuron_count());
    state.xdot.head(net.input_count()) = input.rate;
    state.wdot = Eigen::VectorXd::Zero(net.weight_count());

    const auto ce = eval_constraints<double>(net, state.x, state.w, state.xdot, state.wdot, input);
    const Eigen::VectorXd gdot = ce.Gt + ce.Gx * state.xdot + ce.Gm * state.wdot;
    for (Eigen::Index i = 0; i < net.neuron_count(); ++i)
    {
        if (std::abs(ce.g[i]) > tolerance || std::abs(gdot[i]) > tolerance)
        {
            std::ostringstream msg;
            msg << "inconsistent initial data at constraint " << net.label(i) << ": g = " << ce.g[i]
                << ", dg/dt = " << gdot[i] << " (need a flat input start or zero input weights)";
            throw InconsistentInitialDataError(msg.str(), i);
        }
    }
    return state;
}

namespace
{

struct Rate
{
    Eigen::VectorXd x;
    Eigen::VectorXd w;
    Eigen::VectorXd xdot;
    Eigen::VectorXd wdot;
};

DynState shifted(const DynState& s, const Rate& k, double h)
{
    return {s.t + h, s.x + h * k.x, s.w + h * k.w, s.xdot + h * k.xdot, s.wdot + h * k.wdot};
}

Rate rate_of(const DynState& s, const Acceleration<double>& acc)
{
    return {s.xdot, s.wdot, acc.xddot, acc.wddot};
}

bool finite(const DynState& s)
{
    return s.x.allFinite() && s.w.allFinite() && s.xdot.allFinite() && s.wdot.allFinite();
}

TrajectorySample make_sample(const DynState& s, const Acceleration<double>& acc)
{
    return {s.t,
            s.x,
            s.w,
            s.xdot,
            s.wdot,
            acc.multipliers,
            acc.constraints.g,
            acc.loss.value,
            hidden_constraint_residual(acc).cwiseAbs().maxCoeff()};
}

} // namespace

DynState integrate(const DynState& initial, const NetworkSpec& net, const Drive& drive, const DynParams& params,
                   int stride, const TrajectorySink& sink)
{
    validate(params);
    if (stride < 1)
        throw ConfigError("record stride must be at least 1");

    const long long steps = std::max(0LL, std::llround(params.horizon / params.dt));
    const double h = steps > 0 ? params.horizon / static_cast<double>(steps) : 0.0;
    const double t0 = initial.t;

    DynState s = initial;
    auto derivative = [&](const DynState& at) {
        try
        {
            return el_acceleration(net, at, drive, params);
        }
        catch (const IndefiniteSystemError& err)
        {
            std::ostringstream msg;
            msg << err.what() << " at t = " << at.t;
            throw IndefiniteSystemError(msg.str());
        }
    };

    for (long long n = 0;; ++n)
    {
        const auto a1 = derivative(s);
        if (sink && (n % stride == 0 || n == steps))
            sink(make_sample(s, a1));
        if (n == steps)
            break;

        const Rate k1 = rate_of(s, a1);
        const DynState s2 = shifted(s, k1, 0.5 * h);
        const Rate k2 = rate_of(s2, derivative(s2));
        const DynState s3 = shifted(s, k2, 0.5 * h);
        const Rate k3 = rate_of(s3, derivative(s3));
        const DynState s4 = shifted(s, k3, h);
        const Rate k4 = rate_of(s4, derivative(s4));

        const double w = h / 6.0;
        s.x += w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        s.w += w * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        s.xdot += w * (k1.xdot + 2.0 * k2.xdot + 2.0 * k3.xdot + k4.xdot);
        s.wdot += w * (k1.wdot + 2.0 * k2.wdot + 2.0 * k3.wdot + k4.wdot);
        s.t = t0 + static_cast<double>(n + 1) * h;

        if (!finite(s))
        {
            std::ostringstream msg;
            msg << "state became non-finite at t = " << s.t;
            throw BlowUpError(msg.str(), s.t);
        }
    }
    return s;
}

std::vector<TrajectorySample> integrate(const DynState& initial, const NetworkSpec& net, const Drive& drive,
                                        const DynParams& params, int stride)
{
    std::vector<TrajectorySample> samples;
    integrate(initial, net, drive, params, stride, [&](const TrajectorySample& s) { samples.push_back(s); });
    return samples;
}

void ActionAccumulator::add(const TrajectorySample& sample)
{
    const double varpi = std::exp(params_.theta * sample.t);
    const double kinetic =
        0.5 * (params_.mass_x * sample.xdot.squaredNorm() + params_.mass_w * sample.wdot.squaredNorm());
    const double action = (kinetic - sample.loss) * varpi;
    const double constraint = -sample.multipliers.dot(sample.g) * varpi;
    if (started_)
    {
        const double h = sample.t - last_t_;
        total_.action += 0.5 * h * (last_action_ + action);
        total_.constraint_term += 0.5 * h * (last_constraint_ + constraint);
    }
    started_ = true;
    last_t_ = sample.t;
    last_action_ = action;
    last_constraint_ = constraint;
}

ActionValue action_eval(const std::vector<TrajectorySample>& samples, const DynParams& params)
{
    ActionAccumulator acc(params);
    for (const auto& s : samples)
        acc.add(s);
    return acc.value();
}

} // namespace holonet

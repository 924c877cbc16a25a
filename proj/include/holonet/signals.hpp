#ifndef HOLONET_SIGNALS_HPP
#define HOLONET_SIGNALS_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include "holonet/types.hpp"

namespace holonet
{

/// Quintic smoothstep s(u) = 10u^3 - 15u^4 + 6u^5 on [0, 1], clamped outside.
/// s' and s'' vanish at both ends, so blends built from it are C^2.
struct Smoothstep
{
    static double value(double u);
    static double d1(double u);
    static double d2(double u);
    /// Integral of s from 0 to u.
    static double integral(double u);
};

/// A multi-channel signal with analytic first and second time derivatives.
class TimeSignal
{
public:
    virtual ~TimeSignal() = default;
    virtual Eigen::Index channels() const = 0;
    virtual SignalSample sample(double t) const = 0;
};

class ConstantSignal final : public TimeSignal
{
public:
    explicit ConstantSignal(Eigen::VectorXd value) : value_(std::move(value)) {}
    Eigen::Index channels() const override { return value_.size(); }
    SignalSample sample(double t) const override;

private:
    Eigen::VectorXd value_;
};

/// level * (1 - exp(-rate t)).
class ExponentialApproach final : public TimeSignal
{
public:
    ExponentialApproach(Eigen::VectorXd level, double rate) : level_(std::move(level)), rate_(rate) {}
    Eigen::Index channels() const override { return level_.size(); }
    SignalSample sample(double t) const override;

private:
    Eigen::VectorXd level_;
    double rate_;
};

/*
 * level * (1 - r(t)) where r(t) = t for t >= eps and, for t < eps,
 * r(t) = eps/2 + eps * S(t/eps) with S the integral of the smoothstep. Hence
 * r(0) = eps/2, rdot(0) = rddot(0) = 0, and the signal is C^2 with a flat start.
 */
class MollifiedRamp final : public TimeSignal
{
public:
    MollifiedRamp(Eigen::VectorXd level, double eps);
    Eigen::Index channels() const override { return level_.size(); }
    SignalSample sample(double t) const override;

private:
    Eigen::VectorXd level_;
    double eps_;
};

/// Smoothstep blend from `from` to `to` over [start, start + width].
class SmoothTransition final : public TimeSignal
{
public:
    SmoothTransition(Eigen::VectorXd from, Eigen::VectorXd to, double start, double width);
    Eigen::Index channels() const override { return from_.size(); }
    SignalSample sample(double t) const override;

private:
    Eigen::VectorXd from_;
    Eigen::VectorXd to_;
    double start_;
    double width_;
};

/*
 * Cyclic piecewise-constant sequence v_0, v_1, ..., v_{l-1}, v_0, ... with
 * plateau n on [n tau, (n+1) tau]. The jump at t_n = n tau (n >= 1) is replaced
 * by a smoothstep blend over [t_n - eps, t_n + eps]; the first plateau reaches
 * back to t = 0 with zero slope.
 */
class PlateauSignal final : public TimeSignal
{
public:
    PlateauSignal(std::vector<Eigen::VectorXd> values, double tau, double eps);
    Eigen::Index channels() const override { return values_.front().size(); }
    SignalSample sample(double t) const override;

    double period() const { return tau_; }
    double half_width() const { return eps_; }
    std::size_t length() const { return values_.size(); }

private:
    std::vector<Eigen::VectorXd> values_;
    double tau_;
    double eps_;
};

struct Dataset
{
    std::vector<Eigen::VectorXd> inputs;  // e_kappa
    std::vector<Eigen::VectorXd> targets; // d_kappa
};

/// Reads a delimited text file: one header line, then one row per example with
/// `input_count` input columns followed by `output_count` target columns.
/// Commas, semicolons, tabs and spaces all separate fields.
Dataset load_dataset(const std::filesystem::path& path, Eigen::Index input_count, Eigen::Index output_count);

/// Input signal E(t) and supervision y(t) sharing one time grid.
struct SignalSchedule
{
    PlateauSignal inputs;
    PlateauSignal targets;
};

/// Throws ConfigError unless the dataset is non-empty, tau > 0 and 0 < eps < tau/2.
SignalSchedule build_schedule(const Dataset& dataset, double tau, double eps);

/// What drives a trajectory: the clamped input e(t) and the supervision y(t).
struct Drive
{
    std::shared_ptr<const TimeSignal> input;
    std::shared_ptr<const TimeSignal> target;
};

Drive make_drive(const SignalSchedule& schedule);

} // namespace holonet

#endif // HOLONET_SIGNALS_HPP

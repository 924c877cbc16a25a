#include "holonet/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "holonet/errors.hpp"

namespace holonet
{

double Smoothstep::value(double u)
{
    u = std::clamp(u, 0.0, 1.0);
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double Smoothstep::d1(double u)
{
    if (u <= 0.0 || u >= 1.0)
        return 0.0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double Smoothstep::d2(double u)
{
    if (u <= 0.0 || u >= 1.0)
        return 0.0;
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

double Smoothstep::integral(double u)
{
    if (u <= 0.0)
        return 0.0;
    if (u >= 1.0)
        return 0.5 + (u - 1.0);
    const double u2 = u * u;
    return u2 * u2 * (2.5 - 3.0 * u + u2);
}

SignalSample ConstantSignal::sample(double) const
{
    return frozen_sample(value_);
}

SignalSample ExponentialApproach::sample(double t) const
{
    const double decay = std::exp(-rate_ * t);
    return {level_ * (1.0 - decay), level_ * (rate_ * decay), level_ * (-rate_ * rate_ * decay)};
}

MollifiedRamp::MollifiedRamp(Eigen::VectorXd level, double eps) : level_(std::move(level)), eps_(eps)
{
    if (!(eps > 0.0))
        throw ConfigError("ramp mollification width must be positive");
}

SignalSample MollifiedRamp::sample(double t) const
{
    double r = 0.0;
    double rdot = 0.0;
    double rddot = 0.0;
    if (t >= eps_)
    {
        r = t;
        rdot = 1.0;
    }
    else
    {
        const double u = std::max(t, 0.0) / eps_;
        r = 0.5 * eps_ + eps_ * Smoothstep::integral(u);
        rdot = Smoothstep::value(u);
        rddot = Smoothstep::d1(u) / eps_;
    }
    return {level_ * (1.0 - r), -level_ * rdot, -level_ * rddot};
}

SmoothTransition::SmoothTransition(Eigen::VectorXd from, Eigen::VectorXd to, double start, double width)
    : from_(std::move(from)), to_(std::move(to)), start_(start), width_(width)
{
    if (from_.size() != to_.size())
        throw ConfigError("transition endpoints have different channel counts");
    if (!(width > 0.0))
        throw ConfigError("transition width must be positive");
}

SignalSample SmoothTransition::sample(double t) const
{
    const double u = (t - start_) / width_;
    const Eigen::VectorXd jump = to_ - from_;
    return {from_ + jump * Smoothstep::value(u), jump * (Smoothstep::d1(u) / width_),
            jump * (Smoothstep::d2(u) / (width_ * width_))};
}

PlateauSignal::PlateauSignal(std::vector<Eigen::VectorXd> values, double tau, double eps)
    : values_(std::move(values)), tau_(tau), eps_(eps)
{
    if (values_.empty())
        throw ConfigError("plateau signal needs at least one value");
    if (!(tau > 0.0))
        throw ConfigError("plateau period tau must be positive");
    if (!(eps > 0.0) || !(eps < 0.5 * tau))
        throw ConfigError("transition half-width must satisfy 0 < eps < tau/2 (overlapping transitions)");
    for (const auto& v : values_)
        if (v.size() != values_.front().size())
            throw ConfigError("plateau values have different channel counts");
}

SignalSample PlateauSignal::sample(double t) const
{
    const auto l = static_cast<long long>(values_.size());
    auto value_at = [&](long long n) -> const Eigen::VectorXd& { return values_[static_cast<std::size_t>(n % l)]; };

    const long long nearest = std::llround(t / tau_);
    const double offset = t - static_cast<double>(nearest) * tau_;
    if (nearest >= 1 && std::abs(offset) < eps_)
    {
        const Eigen::VectorXd& before = value_at(nearest - 1);
        const Eigen::VectorXd jump = value_at(nearest) - before;
        const double width = 2.0 * eps_;
        const double u = (offset + eps_) / width;
        return {before + jump * Smoothstep::value(u), jump * (Smoothstep::d1(u) / width),
                jump * (Smoothstep::d2(u) / (width * width))};
    }
    const long long plateau = t <= 0.0 ? 0 : static_cast<long long>(std::floor(t / tau_));
    return frozen_sample(value_at(plateau));
}

Dataset load_dataset(const std::filesystem::path& path, Eigen::Index input_count, Eigen::Index output_count)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open dataset " + path.string());

    Dataset data;
    std::string line;
    bool header = true;
    int line_number = 0;
    const auto width = input_count + output_count;
    while (std::getline(in, line))
    {
        ++line_number;
        if (header)
        {
            header = false;
            continue;
        }
        std::replace_if(
            line.begin(), line.end(), [](char ch) { return ch == ',' || ch == ';' || ch == '\t'; }, ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token)
        {
            try
            {
                std::size_t used = 0;
                row.push_back(std::stod(token, &used));
                if (used != token.size())
                    throw std::invalid_argument(token);
            }
            catch (const std::exception&)
            {
                throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": not a number: " + token);
            }
        }
        if (row.empty())
            continue;
        if (static_cast<Eigen::Index>(row.size()) != width)
            throw ConfigError(path.string() + ":" + std::to_string(line_number) + ": expected " +
                              std::to_string(width) + " columns, found " + std::to_string(row.size()));
        const Eigen::Map<const Eigen::VectorXd> values(row.data(), width);
        data.inputs.emplace_back(values.head(input_count));
        data.targets.emplace_back(values.tail(output_count));
    }
    if (data.inputs.empty())
        throw ConfigError("dataset " + path.string() + " has no examples");
    return data;
}

SignalSchedule build_schedule(const Dataset& dataset, double tau, double eps)
{
    if (dataset.inputs.empty() || dataset.inputs.size() != dataset.targets.size())
        throw ConfigError("dataset must contain at least one (input, target) pair");
    return {PlateauSignal(dataset.inputs, tau, eps), PlateauSignal(dataset.targets, tau, eps)};
}

Drive make_drive(const SignalSchedule& schedule)
{
    return {std::make_shared<PlateauSignal>(schedule.inputs), std::make_shared<PlateauSignal>(schedule.targets)};
}

} // namespace holonet

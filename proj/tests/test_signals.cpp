#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "holonet/errors.hpp"
#include "holonet/signals.hpp"

using namespace holonet;

namespace
{

Eigen::VectorXd scalar(double v)
{
    return Eigen::VectorXd::Constant(1, v);
}

// central differences of value -> rate and rate -> accel
void check_derivatives(const TimeSignal& signal, double t, double h = 1e-5, double tol = 1e-6)
{
    const auto s = signal.sample(t);
    const auto plus = signal.sample(t + h);
    const auto minus = signal.sample(t - h);
    const Eigen::VectorXd rate = (plus.value - minus.value) / (2 * h);
    const Eigen::VectorXd accel = (plus.rate - minus.rate) / (2 * h);
    for (Eigen::Index k = 0; k < s.value.size(); ++k)
    {
        CHECK(std::abs(rate[k] - s.rate[k]) <= tol * std::max(1.0, std::abs(s.rate[k])));
        CHECK(std::abs(accel[k] - s.accel[k]) <= tol * std::max(1.0, std::abs(s.accel[k])));
    }
}

} // namespace

TEST_CASE("smoothstep")
{
    CHECK(Smoothstep::value(0.0) == 0.0);
    CHECK(Smoothstep::value(1.0) == 1.0);
    CHECK(Smoothstep::value(0.5) == doctest::Approx(0.5));
    CHECK(Smoothstep::d1(0.5) == doctest::Approx(15.0 / 8.0));
    CHECK(Smoothstep::d1(0.0) == 0.0);
    CHECK(Smoothstep::d2(1.0) == doctest::Approx(0.0));
    CHECK(Smoothstep::integral(1.0) == doctest::Approx(0.5));
    CHECK(Smoothstep::value(-1.0) == 0.0);
    CHECK(Smoothstep::value(2.0) == 1.0);
}

TEST_CASE("plateau signal with a single example is constant")
{
    const PlateauSignal signal({scalar(2.5)}, 1.0, 0.2);
    for (const double t : {0.0, 0.5, 0.9, 1.0, 1.1, 7.0})
    {
        const auto s = signal.sample(t);
        CHECK(s.value[0] == 2.5);
        CHECK(s.rate[0] == 0.0);
        CHECK(s.accel[0] == 0.0);
    }
}

TEST_CASE("plateau signal alternates between two examples")
{
    const PlateauSignal signal({scalar(1.0), scalar(2.0)}, 1.0, 0.1);
    CHECK(signal.sample(0.0).value[0] == 1.0);
    CHECK(signal.sample(0.5).value[0] == 1.0);
    CHECK(signal.sample(1.5).value[0] == 2.0);
    CHECK(signal.sample(2.5).value[0] == 1.0);
    CHECK(signal.sample(0.5).rate[0] == 0.0);

    const auto mid = signal.sample(1.0);
    CHECK(mid.value[0] == doctest::Approx(1.5));
    CHECK(mid.rate[0] == doctest::Approx(15.0 / 8.0 * (2.0 - 1.0) / 0.2));
    const auto back = signal.sample(2.0);
    CHECK(back.rate[0] == doctest::Approx(15.0 / 8.0 * (1.0 - 2.0) / 0.2));
}

TEST_CASE("plateau signal rejects a transition wider than the plateau")
{
    CHECK_THROWS_AS(PlateauSignal({scalar(1.0), scalar(2.0)}, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(PlateauSignal({scalar(1.0), scalar(2.0)}, 1.0, 0.5), ConfigError);
    CHECK_THROWS_AS(PlateauSignal({scalar(1.0), scalar(2.0)}, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(PlateauSignal({}, 1.0, 0.1), ConfigError);
}

TEST_CASE("plateau signal is C2 across the window edges")
{
    const PlateauSignal signal({scalar(-1.0), scalar(3.0), scalar(0.5)}, 2.0, 0.3);
    for (int n = 1; n <= 4; ++n)
    {
        for (const double edge : {2.0 * n - 0.3, 2.0 * n + 0.3})
        {
            const auto left = signal.sample(edge - 1e-9);
            const auto right = signal.sample(edge + 1e-9);
            CHECK(std::abs(left.value[0] - right.value[0]) <= 1e-7);
            CHECK(std::abs(left.rate[0] - right.rate[0]) <= 1e-6);
            CHECK(std::abs(left.accel[0] - right.accel[0]) <= 1e-5);
        }
    }
}

TEST_CASE("plateau signal derivatives agree with finite differences")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> time(0.01, 9.99);
    const PlateauSignal signal({scalar(-1.0), scalar(3.0), scalar(0.5)}, 2.0, 0.4);
    for (int trial = 0; trial < 200; ++trial)
        check_derivatives(signal, time(rng));
}

TEST_CASE("plateau signal repeats with period l tau")
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> time(0.5, 6.0);
    Eigen::VectorXd a(2), b(2), c(2);
    a << 1, 0;
    b << -1, 2;
    c << 0.5, 0.5;
    const PlateauSignal signal({a, b, c}, 2.0, 0.2);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double t = time(rng);
        const auto s0 = signal.sample(t);
        const auto s1 = signal.sample(t + 6.0);
        CHECK((s0.value - s1.value).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((s0.rate - s1.rate).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("exponential approach")
{
    const ExponentialApproach signal(scalar(3.0), 1.0);
    const auto s0 = signal.sample(0.0);
    CHECK(s0.value[0] == 0.0);
    CHECK(s0.rate[0] == doctest::Approx(3.0));
    CHECK(s0.accel[0] == doctest::Approx(-3.0));
    const auto s = signal.sample(2.0);
    CHECK(s.value[0] == doctest::Approx(3.0 * (1.0 - std::exp(-2.0))));
    check_derivatives(signal, 0.7);
}

TEST_CASE("mollified ramp")
{
    const MollifiedRamp signal(scalar(3.0), 0.05);
    const auto s0 = signal.sample(0.0);
    CHECK(s0.value[0] == doctest::Approx(3.0 * (1.0 - 0.025)));
    CHECK(s0.rate[0] == 0.0);
    CHECK(s0.accel[0] == 0.0);
    const auto s = signal.sample(0.5);
    CHECK(s.value[0] == doctest::Approx(1.5));
    CHECK(s.rate[0] == doctest::Approx(-3.0));
    CHECK(s.accel[0] == 0.0);
    for (const double t : {0.01, 0.025, 0.04, 0.3})
        check_derivatives(signal, t, 1e-6, 1e-5);
    const auto left = signal.sample(0.05 - 1e-10);
    const auto right = signal.sample(0.05 + 1e-10);
    CHECK(std::abs(left.value[0] - right.value[0]) <= 1e-8);
    CHECK(std::abs(left.rate[0] - right.rate[0]) <= 1e-6);
}

TEST_CASE("smooth transition")
{
    const SmoothTransition signal(scalar(0.0), scalar(3.0), 0.0, 2.0);
    CHECK(signal.sample(-1.0).value[0] == 0.0);
    CHECK(signal.sample(0.0).rate[0] == 0.0);
    CHECK(signal.sample(1.0).value[0] == doctest::Approx(1.5));
    CHECK(signal.sample(2.0).value[0] == doctest::Approx(3.0));
    CHECK(signal.sample(5.0).rate[0] == 0.0);
    check_derivatives(signal, 0.6);
    check_derivatives(signal, 1.9);
}

TEST_CASE("dataset loading and schedule")
{
    const auto dir = std::filesystem::temp_directory_path() / "holonet_signals_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "data.csv";
    {
        std::ofstream out(path);
        out << "e1,e2,d1\n1,2,3\n4;5;6\n7\t8 9\n";
    }
    const Dataset data = load_dataset(path, 2, 1);
    REQUIRE(data.inputs.size() == 3);
    CHECK(data.inputs[1][0] == 4.0);
    CHECK(data.inputs[2][1] == 8.0);
    CHECK(data.targets[2][0] == 9.0);

    const auto schedule = build_schedule(data, 1.0, 0.1);
    CHECK(schedule.inputs.sample(1.5).value[0] == 4.0);
    CHECK(schedule.targets.sample(2.5).value[0] == 9.0);
    CHECK(schedule.targets.sample(3.5).value[0] == 3.0);
    CHECK_THROWS_AS(build_schedule(data, 1.0, 0.6), ConfigError);
    CHECK_THROWS_AS(build_schedule(Dataset{}, 1.0, 0.1), ConfigError);

    {
        std::ofstream out(path);
        out << "e1,e2,d1\n1,2,3\n4,5\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path, 2, 1), doctest::Contains("data.csv:3:"), ConfigError);
    {
        std::ofstream out(path);
        out << "e1,e2,d1\n1,abc,3\n";
    }
    CHECK_THROWS_AS(load_dataset(path, 2, 1), ConfigError);
    CHECK_THROWS_AS(load_dataset(dir / "missing.csv", 2, 1), ConfigError);
    std::filesystem::remove_all(dir);
}

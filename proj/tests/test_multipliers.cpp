#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "holonet/errors.hpp"
#include "holonet/experiment.hpp"
#include "holonet/multipliers.hpp"
#include "support/oracles.hpp"

using namespace holonet;

namespace
{

ConstraintEval<double> bare_constraints(Eigen::MatrixXd gx, Eigen::MatrixXd gm)
{
    ConstraintEval<double> ce;
    const auto n = gx.rows();
    ce.g = Eigen::VectorXd::Zero(n);
    ce.Gt = Eigen::VectorXd::Zero(n);
    ce.Gtt = Eigen::VectorXd::Zero(n);
    ce.c = Eigen::VectorXd::Zero(n);
    ce.Gx = std::move(gx);
    ce.Gm = std::move(gm);
    return ce;
}

ConstraintEval<double> random_constraints(std::mt19937_64& rng, const NetworkSpec& net)
{
    const Eigen::VectorXd e = oracle::normal_vector(rng, net.input_count());
    const Eigen::VectorXd w = oracle::normal_vector(rng, net.weight_count());
    const Eigen::VectorXd x = forward_pass<double>(net, e, w);
    return eval_constraints<double>(net, x, w, oracle::normal_vector(rng, x.size()),
                                    oracle::normal_vector(rng, w.size()), frozen_sample(e));
}

} // namespace

TEST_CASE("assemble_gram examples")
{
    DynParams params;
    SUBCASE("identity Gx plus one weight column")
    {
        Eigen::MatrixXd gm(2, 1);
        gm << 0, 1;
        const Eigen::MatrixXd gram = assemble_gram(bare_constraints(Eigen::MatrixXd::Identity(2, 2), gm), params);
        Eigen::MatrixXd expected(2, 2);
        expected << 1, 0, 0, 2;
        CHECK(gram.isApprox(expected, 1e-15));
    }
    SUBCASE("no weights and m_x = 2")
    {
        params.mass_x = 2.0;
        const Eigen::MatrixXd gram =
            assemble_gram(bare_constraints(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd(3, 0)), params);
        CHECK(gram.isApprox(Eigen::MatrixXd::Identity(3, 3) / 2, 1e-15));
    }
    SUBCASE("non-positive mass")
    {
        params.mass_w = 0.0;
        CHECK_THROWS_AS(assemble_gram(bare_constraints(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd(1, 0)), params),
                        ConfigError);
    }
}

TEST_CASE("assemble_rhs examples")
{
    const auto net = build_network(linear_neuron_description());
    DynParams params;
    const Eigen::VectorXd zero_x = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd zero_w = Eigen::VectorXd::Zero(1);

    SUBCASE("equilibrium gives a zero right-hand side")
    {
        Eigen::VectorXd x(2), w(1);
        x << 3, 3;
        w << 1;
        const auto ce = eval_constraints<double>(net, x, w, zero_x, zero_w, frozen_sample(x.head(1)));
        CHECK(assemble_rhs<double>(ce, zero_x, zero_w, zero_x, zero_w, params).isZero(0.0));
    }
    SUBCASE("linear neuron at rest, w = 0, e = y = 3")
    {
        Eigen::VectorXd x(2), w(1), grad_x(2);
        x << 3, 0;
        w << 0;
        grad_x << 0, -3; // d/dx 1/2 (3 - x_2)^2
        const auto ce = eval_constraints<double>(net, x, w, zero_x, zero_w, frozen_sample(x.head(1)));
        const Eigen::VectorXd rhs = assemble_rhs<double>(ce, zero_x, zero_w, grad_x, zero_w, params);
        CHECK(rhs[0] == 0.0);
        CHECK(rhs[1] == 3.0);
    }
    SUBCASE("input row carries -eddot")
    {
        Eigen::VectorXd x(2), w(1);
        x << 1, 0.5;
        w << 0.5;
        SignalSample sample{x.head(1), Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 4.0)};
        const auto ce = eval_constraints<double>(net, x, w, zero_x, zero_w, sample);
        CHECK(assemble_rhs<double>(ce, zero_x, zero_w, zero_x, zero_w, params)[0] == -4.0);
    }
}

TEST_CASE("solve_spd")
{
    SUBCASE("diagonal")
    {
        Eigen::MatrixXd a(2, 2);
        a << 1, 0, 0, 2;
        Eigen::VectorXd b(2);
        b << 3, 4;
        const Eigen::VectorXd x = solve_spd<double>(a, b);
        CHECK(x[0] == doctest::Approx(3.0));
        CHECK(x[1] == doctest::Approx(2.0));
    }
    SUBCASE("random SPD systems against the dense inverse")
    {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 20; ++trial)
        {
            Eigen::MatrixXd m(10, 10);
            for (Eigen::Index j = 0; j < 10; ++j)
                m.col(j) = oracle::normal_vector(rng, 10);
            const Eigen::MatrixXd a = m * m.transpose() + Eigen::MatrixXd::Identity(10, 10);
            const Eigen::VectorXd b = oracle::normal_vector(rng, 10);
            const Eigen::VectorXd expected = oracle::inverse_solve(a, b);
            CHECK((solve_spd<double>(a, b) - expected).cwiseAbs().maxCoeff() <=
                  1e-10 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
        }
    }
    SUBCASE("indefinite system is reported")
    {
        Eigen::MatrixXd a(2, 2);
        a << 1, 0, 0, -1;
        CHECK_THROWS_AS(solve_spd<double>(a, Eigen::VectorXd::Ones(2)), IndefiniteSystemError);
    }
}

TEST_CASE("solve_triangular_gram")
{
    SUBCASE("identity factor returns the right-hand side")
    {
        Eigen::VectorXd v(3);
        v << 1, -2, 5;
        CHECK(solve_triangular_gram<double>(Eigen::MatrixXd::Identity(3, 3), v) == v);
    }
    SUBCASE("2x2 tanh pair, a = sigma' w = 0.5")
    {
        // T^T T = [[1, -a], [-a, 1 + a^2]], determinant 1, inverse [[1 + a^2, a], [a, 1]]
        Eigen::MatrixXd t(2, 2);
        t << 1, -0.5, 0, 1;
        Eigen::VectorXd v(2);
        v << 1, 0;
        const Eigen::VectorXd delta = solve_triangular_gram<double>(t, v);
        CHECK(delta[0] == doctest::Approx(1.25).epsilon(1e-15));
        CHECK(delta[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("random upper triangular 5x5 against the dense inverse")
    {
        std::mt19937_64 rng(22);
        for (int trial = 0; trial < 20; ++trial)
        {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(5, 5);
            for (Eigen::Index i = 0; i < 5; ++i)
                for (Eigen::Index j = i; j < 5; ++j)
                    t(i, j) = i == j ? 1.0 + std::abs(oracle::normal_vector(rng, 1)[0]) : oracle::normal_vector(rng, 1)[0];
            const Eigen::VectorXd v = oracle::normal_vector(rng, 5);
            const Eigen::VectorXd expected = oracle::inverse_solve(t.transpose() * t, v);
            CHECK((solve_triangular_gram<double>(t, v) - expected).cwiseAbs().maxCoeff() <=
                  1e-10 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
        }
    }
    SUBCASE("zero diagonal is reported")
    {
        Eigen::MatrixXd t = Eigen::MatrixXd::Identity(2, 2);
        t(1, 1) = 0.0;
        CHECK_THROWS_AS(solve_triangular_gram<double>(t, Eigen::VectorXd::Ones(2)), IndefiniteSystemError);
    }
}

TEST_CASE("Gram matrix is symmetric positive definite on random feedforward nets")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> log_mass(-3.0, 1.0);
    RandomNetworkOptions options;
    options.max_neurons = 50;
    double smallest = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto net = build_network(random_description(rng, options));
        REQUIRE(net.neuron_count() <= 50);
        DynParams params;
        params.mass_x = std::pow(10.0, log_mass(rng));
        params.mass_w = std::pow(10.0, log_mass(rng));
        const Eigen::MatrixXd gram = assemble_gram(random_constraints(rng, net), params);
        CHECK((gram - gram.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * gram.cwiseAbs().maxCoeff());
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        smallest = std::min(smallest, eig.eigenvalues().minCoeff());
    }
    CHECK(smallest > 0.0);
}

TEST_CASE("triangular O(n^2) solve agrees with the dense Cholesky solve of Gx Gx^T")
{
    std::mt19937_64 rng(24);
    DynParams params;
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto net = build_network(random_description(rng));
        auto ce = random_constraints(rng, net);
        const Eigen::VectorXd v = oracle::normal_vector(rng, net.neuron_count());
        const Eigen::VectorXd tri = solve_triangular_gram<double>(ce.Gx.transpose(), v);
        ce.Gm.resize(ce.Gm.rows(), 0);
        const Eigen::VectorXd spd = solve_spd<double>(assemble_gram(ce, params), v);
        CHECK((tri - spd).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, spd.cwiseAbs().maxCoeff()));
    }
}

#include "holonet/verification.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "holonet/experiment.hpp"

namespace holonet
{

namespace
{

struct RandomPoint
{
    NetworkSpec net;
    Eigen::VectorXd x, w, xdot, wdot;
    std::shared_ptr<PlateauSignal> input;
    double t;
};

Eigen::VectorXd normal_vector(std::mt19937_64& rng, Eigen::Index n, double scale)
{
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = normal(rng);
    return v;
}

RandomPoint random_point(std::mt19937_64& rng, int max_neurons, double velocity_scale)
{
    RandomNetworkOptions options;
    options.max_neurons = max_neurons;
    RandomPoint p{build_network(random_description(rng, options)), {}, {}, {}, {}, nullptr, 0.0};
    const auto nu = p.net.neuron_count();
    const auto omega = p.net.input_count();
    p.x = normal_vector(rng, nu, 1.0);
    p.w = normal_vector(rng, p.net.weight_count(), 0.8);
    p.xdot = normal_vector(rng, nu, velocity_scale);
    p.wdot = normal_vector(rng, p.net.weight_count(), velocity_scale);
    p.input = std::make_shared<PlateauSignal>(
        std::vector<Eigen::VectorXd>{normal_vector(rng, omega, 1.0), normal_vector(rng, omega, 1.0)}, 1.0, 0.45);
    // inside the first transition, where edot and eddot are nonzero
    p.t = 1.0 + std::uniform_real_distribution<double>(-0.4, 0.4)(rng);
    return p;
}

double scaled_error(double approx, double exact)
{
    return std::abs(approx - exact) / std::max(1.0, std::abs(exact));
}

CheckResult finish(std::string name, double worst, double tolerance, std::string detail = {})
{
    return {std::move(name), worst <= tolerance, worst, tolerance, std::move(detail)};
}

} // namespace

ConstraintEvaluator default_evaluator()
{
    return [](const NetworkSpec& net, const Eigen::VectorXd& x, const Eigen::VectorXd& w, const Eigen::VectorXd& xdot,
              const Eigen::VectorXd& wdot, const SignalSample& input) {
        return eval_constraints<double>(net, x, w, xdot, wdot, input);
    };
}

CheckResult check_jacobians(std::uint64_t seed, int trials, const ConstraintEvaluator& eval)
{
    std::mt19937_64 rng(seed);
    constexpr double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 12, 0.0);
        const auto nu = p.net.neuron_count();
        const auto zx = Eigen::VectorXd::Zero(nu);
        const auto zw = Eigen::VectorXd::Zero(p.net.weight_count());
        auto g_at = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
            return eval(p.net, x, w, zx, zw, p.input->sample(t)).g;
        };
        const auto ce = eval(p.net, p.x, p.w, zx, zw, p.input->sample(p.t));

        for (Eigen::Index a = 0; a < nu; ++a)
        {
            Eigen::VectorXd plus = p.x, minus = p.x;
            plus[a] += h;
            minus[a] -= h;
            const Eigen::VectorXd fd = (g_at(p.t, plus, p.w) - g_at(p.t, minus, p.w)) / (2 * h);
            for (Eigen::Index i = 0; i < nu; ++i)
                worst = std::max(worst, scaled_error(fd[i], ce.Gx(i, a)));
        }
        for (Eigen::Index e = 0; e < p.net.weight_count(); ++e)
        {
            Eigen::VectorXd plus = p.w, minus = p.w;
            plus[e] += h;
            minus[e] -= h;
            const Eigen::VectorXd fd = (g_at(p.t, p.x, plus) - g_at(p.t, p.x, minus)) / (2 * h);
            for (Eigen::Index i = 0; i < nu; ++i)
                worst = std::max(worst, scaled_error(fd[i], ce.Gm(i, e)));
        }
        const Eigen::VectorXd fd_t = (g_at(p.t + h, p.x, p.w) - g_at(p.t - h, p.x, p.w)) / (2 * h);
        for (Eigen::Index i = 0; i < nu; ++i)
            worst = std::max(worst, scaled_error(fd_t[i], ce.Gt[i]));
    }
    return finish("jacobians vs finite differences", worst, 1e-6);
}

CheckResult check_contraction(std::uint64_t seed, int trials, const ConstraintEvaluator& eval)
{
    std::mt19937_64 rng(seed);
    constexpr double h = 2e-3;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 12, 0.5);
        auto g_along = [&](double s) {
            const Eigen::VectorXd x = p.x + s * p.xdot;
            const Eigen::VectorXd w = p.w + s * p.wdot;
            return eval(p.net, x, w, p.xdot, p.wdot, p.input->sample(p.t + s)).g;
        };
        const auto ce = eval(p.net, p.x, p.w, p.xdot, p.wdot, p.input->sample(p.t));
        const Eigen::VectorXd g0 = g_along(0.0);
        auto second_difference = [&](double step) -> Eigen::VectorXd {
            return (g_along(step) - 2.0 * g0 + g_along(-step)) / (step * step);
        };
        // Richardson extrapolation, O(h^4)
        const Eigen::VectorXd fd = (4.0 * second_difference(h / 2) - second_difference(h)) / 3.0;
        for (Eigen::Index i = 0; i < fd.size(); ++i)
            worst = std::max(worst, scaled_error(fd[i], ce.c[i]));
    }
    return finish("second-order contraction vs finite differences", worst, 1e-6);
}

CheckResult check_forward_pass(std::uint64_t seed, int trials)
{
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 30, 0.0);
        const Eigen::VectorXd e = normal_vector(rng, p.net.input_count(), 1.0);
        const Eigen::VectorXd x = forward_pass<double>(p.net, e, p.w);
        worst = std::max(worst, constraint_residuals<double>(p.net, x, p.w, e).cwiseAbs().maxCoeff());
    }
    return finish("forward pass zeroes constraints", worst, 1e-12);
}

CheckResult check_gram_positive(std::uint64_t seed, int trials)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_mass(-3.0, 1.0);
    double min_eig = std::numeric_limits<double>::infinity();
    double worst_asym = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 50, 1.0);
        DynParams params;
        params.mass_x = std::pow(10.0, log_mass(rng));
        params.mass_w = std::pow(10.0, log_mass(rng));
        const auto ce = eval_constraints<double>(p.net, p.x, p.w, p.xdot, p.wdot, p.input->sample(p.t));
        const Eigen::MatrixXd gram = assemble_gram(ce, params);
        worst_asym = std::max(worst_asym, (gram - gram.transpose()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
    std::ostringstream detail;
    detail << "min eigenvalue " << min_eig << ", max asymmetry " << worst_asym;
    CheckResult r{"Gram matrix symmetric positive definite", min_eig > 0.0 && worst_asym <= 1e-12, worst_asym, 1e-12,
                  detail.str()};
    return r;
}

CheckResult check_triangular_solve(std::uint64_t seed, int trials)
{
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 30, 0.0);
        const auto ce = eval_constraints<double>(p.net, p.x, p.w, p.xdot, p.wdot, p.input->sample(p.t));
        const Eigen::VectorXd v = normal_vector(rng, p.net.neuron_count(), 1.0);
        const Eigen::MatrixXd upper = ce.Gx.transpose();
        const Eigen::VectorXd tri = solve_triangular_gram<double>(upper, v);
        const Eigen::VectorXd spd = solve_spd<double>(ce.Gx * ce.Gx.transpose(), v);
        worst = std::max(worst, (tri - spd).cwiseAbs().maxCoeff() / std::max(1.0, spd.cwiseAbs().maxCoeff()));
    }
    return finish("triangular Gram solve vs Cholesky", worst, 1e-10);
}

CheckResult check_bp_equivalence(std::uint64_t seed, int trials)
{
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 30, 0.0);
        const Eigen::VectorXd e = normal_vector(rng, p.net.input_count(), 1.0);
        const Eigen::VectorXd y = normal_vector(rng, p.net.output_count(), 1.0);
        const Eigen::VectorXd x = forward_pass<double>(p.net, e, p.w);
        const Eigen::VectorXd chain = chain_rule_deltas<double>(p.net, x, p.w, y).delta;
        const Eigen::VectorXd gram = gram_deltas<double>(p.net, x, p.w, y);
        worst = std::max(worst, (gram - chain).cwiseAbs().maxCoeff() / std::max(1.0, chain.cwiseAbs().maxCoeff()));
    }
    return finish("Gram deltas vs chain-rule deltas", worst, 1e-10);
}

CheckResult check_weight_gradient(std::uint64_t seed, int trials)
{
    std::mt19937_64 rng(seed);
    constexpr double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial)
    {
        const auto p = random_point(rng, 20, 0.0);
        const Eigen::VectorXd e = normal_vector(rng, p.net.input_count(), 1.0);
        const Eigen::VectorXd y = normal_vector(rng, p.net.output_count(), 1.0);
        auto loss = [&](const Eigen::VectorXd& w) {
            const Eigen::VectorXd x = forward_pass<double>(p.net, e, w);
            return chain_rule_deltas<double>(p.net, x, w, y).loss;
        };
        const Eigen::VectorXd x = forward_pass<double>(p.net, e, p.w);
        const Eigen::VectorXd grad = chain_rule_deltas<double>(p.net, x, p.w, y).weight_gradient;
        for (Eigen::Index k = 0; k < p.w.size(); ++k)
        {
            Eigen::VectorXd plus = p.w, minus = p.w;
            plus[k] += h;
            minus[k] -= h;
            worst = std::max(worst, scaled_error((loss(plus) - loss(minus)) / (2 * h), grad[k]));
        }
    }
    return finish("chain-rule weight gradient vs finite differences", worst, 1e-6);
}

CheckResult check_hidden_residual()
{
    double worst = 0.0;
    for (const auto preset : {Preset::fig1a, Preset::fig2b})
    {
        auto cfg = preset_config(preset);
        cfg.params.horizon = 5.0;
        const NetworkSpec net = build_network(cfg.network);
        const Drive drive = build_drive(cfg);
        const DynState start = make_initial_state(net, initial_weights(cfg, net), drive);
        integrate(start, net, drive, cfg.params, 1,
                  [&](const TrajectorySample& s) { worst = std::max(worst, s.hidden_residual); });
    }
    return finish("hidden-constraint residual along trajectories", worst, 1e-8);
}

CheckResult check_limit(std::vector<LimitRow>* rows)
{
    const auto cfg = preset_config(Preset::limit);
    std::ostringstream sink;
    const auto result = run_experiment(cfg, sink);
    if (rows)
        *rows = result.limit_rows;
    const double monotone = result.metrics.at("monotone");
    const auto it = result.metrics.find("min_reduction_per_decade");
    const double reduction = it == result.metrics.end() ? 0.0 : it->second;
    std::ostringstream detail;
    detail << "min reduction per decade " << reduction;
    return {"stiff limit approaches backprop gradient flow", monotone > 0.0 && reduction >= 2.0, reduction, 2.0,
            detail.str()};
}

std::vector<CheckResult> run_verification(std::uint64_t seed, std::ostream* limit_table)
{
    std::vector<CheckResult> checks;
    checks.push_back(check_jacobians(seed, 50));
    checks.push_back(check_contraction(seed + 1, 50));
    checks.push_back(check_forward_pass(seed + 2, 100));
    checks.push_back(check_gram_positive(seed + 3, 100));
    checks.push_back(check_triangular_solve(seed + 4, 100));
    checks.push_back(check_bp_equivalence(seed + 5, 100));
    checks.push_back(check_weight_gradient(seed + 6, 30));
    checks.push_back(check_hidden_residual());
    std::vector<LimitRow> rows;
    checks.push_back(check_limit(&rows));
    if (limit_table)
        write_limit_table(*limit_table, rows);
    return checks;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks)
{
    const auto flags = out.flags();
    for (const auto& c : checks)
    {
        out << (c.passed ? "[PASS] " : "[FAIL] ") << std::left << std::setw(50) << c.name << std::right
            << " worst=" << std::setprecision(3) << std::scientific << c.worst << " tol=" << c.tolerance;
        if (!c.detail.empty())
            out << "  (" << c.detail << ')';
        out << '\n';
        out.flags(flags);
    }
}

} // namespace holonet

#ifndef HOLONET_DYNAMICS_HPP
#define HOLONET_DYNAMICS_HPP

#include <functional>
#include <vector>

#include "holonet/multipliers.hpp"
#include "holonet/network.hpp"
#include "holonet/params.hpp"
#include "holonet/signals.hpp"

namespace holonet
{

/// Generalized coordinates (x, W) and velocities at time t.
struct DynState
{
    double t{0.0};
    Eigen::VectorXd x;
    Eigen::VectorXd w;
    Eigen::VectorXd xdot;
    Eigen::VectorXd wdot;
};

template <typename Scalar>
struct LossTerms
{
    Scalar value;
    Vec<Scalar> grad_x;
    Vec<Scalar> grad_w;
};

/*
 * V = 1/2 sum_i (y^i - x_out^i)^2 + (c_p/2) |g|^2.
 * The penalty adds c_p Gx^T g to V_x and c_p Gm^T g to V_W; it vanishes on the
 * constraint manifold and only acts on numerical drift.
 */
template <typename Scalar>
LossTerms<Scalar> loss_and_gradients(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& target,
                                     Scalar penalty, const ConstraintEval<Scalar>& ce)
{
    assert(target.size() == net.output_count());
    LossTerms<Scalar> terms{Scalar(0), Vec<Scalar>::Zero(net.neuron_count()), Vec<Scalar>::Zero(net.weight_count())};
    for (Eigen::Index r = 0; r < net.output_count(); ++r)
    {
        const auto p = net.outputs()[static_cast<std::size_t>(r)];
        const Scalar err = target[r] - x[p];
        terms.value += Scalar(0.5) * err * err;
        terms.grad_x[p] -= err;
    }
    if (penalty != Scalar(0))
    {
        terms.value += Scalar(0.5) * penalty * ce.g.squaredNorm();
        terms.grad_x.noalias() += penalty * (ce.Gx.transpose() * ce.g);
        terms.grad_w.noalias() += penalty * (ce.Gm.transpose() * ce.g);
    }
    return terms;
}

template <typename Scalar>
struct Acceleration
{
    Vec<Scalar> xddot;
    Vec<Scalar> wddot;
    Vec<Scalar> multipliers; // lambda~ = exp(-theta t) lambda
    ConstraintEval<Scalar> constraints;
    LossTerms<Scalar> loss;
};

/*
 * Euler-Lagrange accelerations divided through by varpi = exp(theta t):
 *   xddot = -theta xdot - (Gx^T lambda~ + V_x) / m_x
 *   Wddot = -theta Wdot - (Gm^T lambda~ + V_W) / m_W
 * with lambda~ from the Gram system of multipliers.hpp.
 */
template <typename Scalar>
Acceleration<Scalar> el_acceleration(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights,
                                     const Vec<Scalar>& xdot, const Vec<Scalar>& wdot,
                                     const SignalSampleT<Scalar>& input, const Vec<Scalar>& target,
                                     const DynParams& params)
{
    Acceleration<Scalar> acc;
    acc.constraints = eval_constraints(net, x, weights, xdot, wdot, input);
    const auto& ce = acc.constraints;
    acc.loss = loss_and_gradients(net, x, target, Scalar(params.penalty), ce);

    const Mat<Scalar> gram = assemble_gram(ce, params);
    const Vec<Scalar> rhs = assemble_rhs(ce, xdot, wdot, acc.loss.grad_x, acc.loss.grad_w, params);
    acc.multipliers = solve_spd(gram, rhs);

    const Scalar theta(params.theta);
    acc.xddot = -theta * xdot - (ce.Gx.transpose() * acc.multipliers + acc.loss.grad_x) / Scalar(params.mass_x);
    acc.wddot = -theta * wdot - (ce.Gm.transpose() * acc.multipliers + acc.loss.grad_w) / Scalar(params.mass_w);
    return acc;
}

/// d^2 g/dt^2 implied by the accelerations; zero up to rounding by construction.
template <typename Scalar>
Vec<Scalar> hidden_constraint_residual(const Acceleration<Scalar>& acc)
{
    const auto& ce = acc.constraints;
    return ce.Gx * acc.xddot + ce.Gm * acc.wddot + ce.c;
}

Acceleration<double> el_acceleration(const NetworkSpec& net, const DynState& state, const Drive& drive,
                                     const DynParams& params);

/*
 * Consistent Cauchy data: x(0) = forward_pass(e(0), W0), Wdot(0) = 0, hidden
 * velocities 0 and input velocities edot(0) (the input rows are x^i = e^i(t), so
 * any other choice violates dg/dt(0) = 0 on those rows). The neuron rows then
 * have dg/dt(0) = -sigma' sum_k w_ik edot^k(0), which must vanish: either the
 * input starts flat or the weights leaving the inputs are zero. Throws
 * InconsistentInitialDataError naming the first offending constraint.
 */
DynState make_initial_state(const NetworkSpec& net, const Eigen::VectorXd& initial_weights, const Drive& drive,
                            double t0 = 0.0, double tolerance = 1e-10);

struct TrajectorySample
{
    double t;
    Eigen::VectorXd x;
    Eigen::VectorXd w;
    Eigen::VectorXd xdot;
    Eigen::VectorXd wdot;
    Eigen::VectorXd multipliers;
    Eigen::VectorXd g;
    double loss;
    double hidden_residual; // max_i |Gx xddot + Gm Wddot + c|_i
};

using TrajectorySink = std::function<void(const TrajectorySample&)>;

/*
 * Classical fixed-step RK4 on (x, W, xdot, Wdot), multipliers recomputed at every
 * stage. The step is adjusted to horizon / round(horizon / dt) so the run ends
 * exactly at the horizon. Samples are emitted at t0, every `stride` steps and at
 * the final time. Throws BlowUpError on a non-finite state.
 */
DynState integrate(const DynState& initial, const NetworkSpec& net, const Drive& drive, const DynParams& params,
                   int stride, const TrajectorySink& sink);

std::vector<TrajectorySample> integrate(const DynState& initial, const NetworkSpec& net, const Drive& drive,
                                        const DynParams& params, int stride = 1);

struct ActionValue
{
    double action;          // integral of (1/2 m_x |xdot|^2 + 1/2 m_W |Wdot|^2 - V) varpi dt
    double constraint_term; // integral of -lambda . g dt, zero on the constraint manifold
};

/// Streaming trapezoidal quadrature of the action over successive samples.
class ActionAccumulator
{
public:
    explicit ActionAccumulator(const DynParams& params) : params_(params) {}
    void add(const TrajectorySample& sample);
    const ActionValue& value() const { return total_; }

private:
    DynParams params_;
    ActionValue total_{0.0, 0.0};
    bool started_{false};
    double last_t_{0.0};
    double last_action_{0.0};
    double last_constraint_{0.0};
};

/// Trapezoidal quadrature over recorded samples. Diagnostic only: varpi(t)
/// overflows double beyond theta t ~ 700.
ActionValue action_eval(const std::vector<TrajectorySample>& samples, const DynParams& params);

} // namespace holonet

#endif // HOLONET_DYNAMICS_HPP

#ifndef HOLONET_BP_ORACLE_HPP
#define HOLONET_BP_ORACLE_HPP

#include <string>
#include <vector>

#include "holonet/dynamics.hpp"
#include "holonet/multipliers.hpp"
#include "holonet/network.hpp"

namespace holonet
{

/*
 * Sign convention, used everywhere in this library:
 *
 *   delta_i = -dVbar/dx^i
 *
 * the total derivative of the supervised loss Vbar(W) = 1/2 |y - f_W(e)|^2 through
 * every downstream neuron. On an output neuron with no successors delta = y - x.
 * This is exactly the stiff limit of the rescaled multiplier lambda~, which
 * solves Gx Gx^T delta = -Gx V_x, i.e. Gx^T delta = -V_x. The weight gradient is
 * dVbar/dw_ik = -sigma'(z_i) delta_i x^k and the gradient flow is
 * Wdot = -(1/gamma) dVbar/dW.
 */
template <typename Scalar>
struct BpResult
{
    Vec<Scalar> delta;
    Vec<Scalar> weight_gradient; // dVbar/dW
    Scalar loss;
};

template <typename Scalar>
Vec<Scalar> output_loss_gradient(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& target)
{
    Vec<Scalar> grad = Vec<Scalar>::Zero(net.neuron_count());
    for (Eigen::Index r = 0; r < net.output_count(); ++r)
    {
        const auto p = net.outputs()[static_cast<std::size_t>(r)];
        grad[p] = x[p] - target[r];
    }
    return grad;
}

/// Reverse sweep of the chain rule over the topological order.
template <typename Scalar>
BpResult<Scalar> chain_rule_deltas(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights,
                                   const Vec<Scalar>& target)
{
    const Vec<Scalar> z = pre_activations(net, x, weights);
    BpResult<Scalar> out;
    out.delta = -output_loss_gradient(net, x, target);
    out.loss = Scalar(0.5) * out.delta.squaredNorm();
    out.weight_gradient = Vec<Scalar>::Zero(net.weight_count());

    for (Eigen::Index i = net.neuron_count() - 1; i >= net.input_count(); --i)
    {
        const Scalar slope = activate(net.activation(i), z[i]).d1;
        for (const auto e : net.incoming(i))
        {
            const auto& link = net.links()[e];
            if (link.is_bias())
            {
                out.weight_gradient[e] = -slope * out.delta[i];
                continue;
            }
            out.weight_gradient[e] = -slope * out.delta[i] * x[link.source];
            out.delta[link.source] += slope * weights[e] * out.delta[i];
        }
    }
    return out;
}

/// The same deltas from the Gram system T^T T delta = -Gx V_x with T = Gx^T.
template <typename Scalar>
Vec<Scalar> gram_deltas(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights,
                        const Vec<Scalar>& target)
{
    const auto zero_x = Vec<Scalar>::Zero(net.neuron_count());
    const auto zero_w = Vec<Scalar>::Zero(net.weight_count());
    const auto ce = eval_constraints<Scalar>(net, x, weights, zero_x, zero_w,
                                             frozen_sample(Vec<Scalar>(x.head(net.input_count()))));
    const Vec<Scalar> v = -(ce.Gx * output_loss_gradient(net, x, target));
    return solve_triangular_gram<Scalar>(ce.Gx.transpose(), v);
}

/// Wdot = -(1/gamma) dVbar/dW at the network solved for input e.
template <typename Scalar>
Vec<Scalar> gradient_flow_step(const Vec<Scalar>& weights, Scalar gamma, const NetworkSpec& net,
                               const Vec<Scalar>& inputs, const Vec<Scalar>& target)
{
    const Vec<Scalar> x = forward_pass(net, inputs, weights);
    return -chain_rule_deltas(net, x, weights, target).weight_gradient / gamma;
}

struct MassPair
{
    double mass_x;
    double mass_w;
};

/// m_x = m_W^2: the ratio m_x/m_W tends to zero along the sequence.
std::vector<MassPair> squared_mass_sequence(const std::vector<double>& mass_w);
/// m_x = ratio * m_W: negative control, the ratio stays fixed.
std::vector<MassPair> proportional_mass_sequence(const std::vector<double>& mass_w, double ratio);

struct LimitOptions
{
    double gamma{1.0};
    double horizon{6.0};
    double base_dt{1e-2};          // dt = base_dt * sqrt(m_W), then snapped to grid_unit
    double grid_unit{1.0};         // every sample time is a multiple of this
    std::vector<double> sample_times;
};

struct LimitRow
{
    MassPair masses;
    double theta{0.0};
    double dt{0.0};
    double multiplier_deviation{0.0}; // max |lambda~ - delta|
    double velocity_deviation{0.0};   // max |Wdot - Wdot_gradient_flow|
    double deviation{0.0};            // max of the two
    double velocity_rhs_deviation{0.0}; // max |delta_v - delta| with T^T T delta_v = -gamma Gx xdot
    bool ok{true};
    std::string failure;
};

/// Sample times at plateau midpoints (n + 1/2) tau inside (0, horizon].
std::vector<double> plateau_midpoints(const PlateauSignal& signal, double horizon, std::size_t skip_first = 0);

/*
 * Integrates the full dynamics with theta = gamma / m_W for each mass pair
 * (concurrently) and measures how far the multipliers and weight velocities are
 * from the backprop deltas and the gradient flow at the sample times. A blow-up
 * is recorded in the row, not thrown.
 */
std::vector<LimitRow> limit_comparison(const NetworkSpec& net, const Drive& drive, const Eigen::VectorXd& initial_weights,
                                       const std::vector<MassPair>& masses, const LimitOptions& options);

} // namespace holonet

#endif // HOLONET_BP_ORACLE_HPP

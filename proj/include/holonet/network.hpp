#ifndef HOLONET_NETWORK_HPP
#define HOLONET_NETWORK_HPP

#include <cassert>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "holonet/activation.hpp"
#include "holonet/types.hpp"

namespace holonet
{

/*
 * Network description as written by a user. Neurons carry 1-based ids:
 * 1..input_count are inputs, the remaining ids are listed in `neurons`.
 * An edge with no source is a bias weight on a constant pseudo-input of value 1.
 */
struct NeuronDescription
{
    int id;
    Activation activation{Activation::identity};
};

struct EdgeDescription
{
    int target;
    std::optional<int> source; // nullopt: bias
};

struct NetworkDescription
{
    int input_count{0};
    std::vector<NeuronDescription> neurons;
    std::vector<EdgeDescription> edges;
    std::vector<int> outputs; // ids, in the order of the supervision channels
};

/// One weight w_ik connecting neuron k (or the bias) to neuron i, both given as
/// positions in the topological order.
struct WeightLink
{
    static constexpr Eigen::Index bias = -1;

    Eigen::Index target;
    Eigen::Index source;

    bool is_bias() const { return source == bias; }
};

/*
 * Validated feedforward network. All neuron-indexed vectors used by the library
 * (x, xdot, g, lambda, ...) are in topological order: position 0..omega-1 are
 * the inputs, outputs come last. Weight-indexed vectors follow the edge order
 * of the description.
 *
 * Every neuron carries one holonomic constraint:
 *   input i:      G^i = x^i - e^i(t)
 *   otherwise:    G^i = x^i - sigma_i(z_i),  z_i = sum_k w_ik x^k  (+ w_ib * 1)
 * so r = nu and the Jacobian in x is unit lower triangular in this ordering.
 *
 * Immutable after construction.
 */
class NetworkSpec
{
public:
    Eigen::Index neuron_count() const { return static_cast<Eigen::Index>(labels_.size()); }
    Eigen::Index input_count() const { return input_count_; }
    Eigen::Index output_count() const { return static_cast<Eigen::Index>(outputs_.size()); }
    Eigen::Index weight_count() const { return static_cast<Eigen::Index>(links_.size()); }

    bool is_input(Eigen::Index position) const { return position < input_count_; }
    Activation activation(Eigen::Index position) const { return activations_[position]; }

    const std::vector<WeightLink>& links() const { return links_; }

    /// Weight indices feeding the neuron at `position`.
    std::span<const Eigen::Index> incoming(Eigen::Index position) const
    {
        const auto begin = incoming_offsets_[position];
        const auto end = incoming_offsets_[position + 1];
        return {incoming_.data() + begin, static_cast<std::size_t>(end - begin)};
    }

    /// Positions of the output neurons, in supervision-channel order.
    const std::vector<Eigen::Index>& outputs() const { return outputs_; }

    /// Original 1-based id of the neuron at `position`.
    int label(Eigen::Index position) const { return labels_[position]; }
    std::string weight_label(Eigen::Index weight) const;

    const NetworkDescription& description() const { return description_; }

private:
    friend NetworkSpec build_network(const NetworkDescription& description);

    Eigen::Index input_count_{0};
    std::vector<int> labels_;
    std::vector<Activation> activations_;
    std::vector<WeightLink> links_;
    std::vector<Eigen::Index> incoming_;
    std::vector<Eigen::Index> incoming_offsets_;
    std::vector<Eigen::Index> outputs_;
    NetworkDescription description_;
};

/// Validates a description and computes the topological order (inputs first,
/// outputs last). Throws ConfigError on cycles, dangling edges or bad outputs.
NetworkSpec build_network(const NetworkDescription& description);

struct RandomNetworkOptions
{
    int max_neurons{30};
    int max_inputs{3};
    int max_outputs{3};
    double edge_probability{0.5};
    double bias_probability{0.5};
    double tanh_probability{0.5};
};

/// Random feedforward description with ids already in topological order.
NetworkDescription random_description(std::mt19937_64& rng, const RandomNetworkOptions& options = {});

/// Pre-activations z_i for non-input neurons (zero on input rows).
template <typename Scalar>
Vec<Scalar> pre_activations(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights)
{
    Vec<Scalar> z = Vec<Scalar>::Zero(net.neuron_count());
    for (Eigen::Index i = net.input_count(); i < net.neuron_count(); ++i)
    {
        for (const auto e : net.incoming(i))
        {
            const auto& link = net.links()[e];
            z[i] += weights[e] * (link.is_bias() ? Scalar(1) : x[link.source]);
        }
    }
    return z;
}

/// Solves all constraints at once by sweeping the topological order.
template <typename Scalar>
Vec<Scalar> forward_pass(const NetworkSpec& net, const Vec<Scalar>& inputs, const Vec<Scalar>& weights)
{
    assert(inputs.size() == net.input_count());
    assert(weights.size() == net.weight_count());

    Vec<Scalar> x(net.neuron_count());
    x.head(net.input_count()) = inputs;
    for (Eigen::Index i = net.input_count(); i < net.neuron_count(); ++i)
    {
        Scalar z(0);
        for (const auto e : net.incoming(i))
        {
            const auto& link = net.links()[e];
            z += weights[e] * (link.is_bias() ? Scalar(1) : x[link.source]);
        }
        x[i] = activate(net.activation(i), z).value;
    }
    return x;
}

/*
 * Constraint residuals and every derivative the multiplier equation needs, at
 * one point (t, x, W, xdot, Wdot).
 */
template <typename Scalar>
struct ConstraintEval
{
    Vec<Scalar> g;   // G^i
    Mat<Scalar> Gx;  // dG^i / dx^a            (nu x nu)
    Mat<Scalar> Gm;  // dG^i / dw_e            (nu x |W|)
    Vec<Scalar> Gt;  // dG^i / dt
    Vec<Scalar> Gtt; // d^2 G^i / dt^2
    Vec<Scalar> c;   // second-order part of d^2 g^i/dt^2 (everything but Gx xddot + Gm Wddot)
};

/*
 * Input rows:  Gx = e_i, Gm = 0, Gt = -edot, Gtt = -eddot, c = -eddot.
 *
 * Neuron rows, with z = sum_e w_e x^{k_e}:
 *   G_{x^k}      = delta_ik - sigma'(z) sum_{e:k_e=k} w_e
 *   G_{w_e}      = -sigma'(z) x^{k_e}                       (x^bias = 1)
 *   G_{x^a x^b}  = -sigma''(z) W_a W_b                      (W_a = sum_{e:k_e=a} w_e)
 *   G_{x^a w_e}  = -sigma''(z) W_a x^{k_e} - sigma'(z) [a = k_e]
 *   G_{w_e w_f}  = -sigma''(z) x^{k_e} x^{k_f}
 * Contracting the Hessian with (xdot, Wdot) collapses to
 *   c = -sigma''(z) zdot^2 - 2 sigma'(z) sum_e wdot_e xdot^{k_e},
 *   zdot = sum_e (wdot_e x^{k_e} + w_e xdot^{k_e}).
 * The time partials vanish on neuron rows.
 */
template <typename Scalar>
ConstraintEval<Scalar> eval_constraints(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights,
                                        const Vec<Scalar>& xdot, const Vec<Scalar>& wdot,
                                        const SignalSampleT<Scalar>& input)
{
    const auto nu = net.neuron_count();
    const auto omega = net.input_count();
    assert(x.size() == nu && xdot.size() == nu);
    assert(weights.size() == net.weight_count() && wdot.size() == net.weight_count());
    assert(input.value.size() == omega);

    ConstraintEval<Scalar> ce;
    ce.g.resize(nu);
    ce.Gx = Mat<Scalar>::Identity(nu, nu);
    ce.Gm = Mat<Scalar>::Zero(nu, net.weight_count());
    ce.Gt = Vec<Scalar>::Zero(nu);
    ce.Gtt = Vec<Scalar>::Zero(nu);
    ce.c = Vec<Scalar>::Zero(nu);

    for (Eigen::Index i = 0; i < omega; ++i)
    {
        ce.g[i] = x[i] - input.value[i];
        ce.Gt[i] = -input.rate[i];
        ce.Gtt[i] = -input.accel[i];
        ce.c[i] = -input.accel[i];
    }

    for (Eigen::Index i = omega; i < nu; ++i)
    {
        Scalar z(0);
        Scalar zdot(0);
        Scalar cross(0);
        for (const auto e : net.incoming(i))
        {
            const auto& link = net.links()[e];
            const Scalar xk = link.is_bias() ? Scalar(1) : x[link.source];
            const Scalar xdotk = link.is_bias() ? Scalar(0) : xdot[link.source];
            z += weights[e] * xk;
            zdot += wdot[e] * xk + weights[e] * xdotk;
            cross += wdot[e] * xdotk;
        }
        const auto act = activate(net.activation(i), z);
        ce.g[i] = x[i] - act.value;
        for (const auto e : net.incoming(i))
        {
            const auto& link = net.links()[e];
            if (link.is_bias())
            {
                ce.Gm(i, e) = -act.d1;
            }
            else
            {
                ce.Gm(i, e) = -act.d1 * x[link.source];
                ce.Gx(i, link.source) -= act.d1 * weights[e];
            }
        }
        ce.c[i] = -act.d2 * zdot * zdot - Scalar(2) * act.d1 * cross;
    }
    return ce;
}

/// Residuals only.
template <typename Scalar>
Vec<Scalar> constraint_residuals(const NetworkSpec& net, const Vec<Scalar>& x, const Vec<Scalar>& weights,
                                 const Vec<Scalar>& inputs)
{
    Vec<Scalar> g(net.neuron_count());
    g.head(net.input_count()) = x.head(net.input_count()) - inputs;
    const Vec<Scalar> z = pre_activations(net, x, weights);
    for (Eigen::Index i = net.input_count(); i < net.neuron_count(); ++i)
        g[i] = x[i] - activate(net.activation(i), z[i]).value;
    return g;
}

} // namespace holonet

#endif // HOLONET_NETWORK_HPP

#ifndef HOLONET_MULTIPLIERS_HPP
#define HOLONET_MULTIPLIERS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "holonet/errors.hpp"
#include "holonet/network.hpp"
#include "holonet/params.hpp"

namespace holonet
{

/*
 * Multiplier system of the constrained Euler-Lagrange equations.
 *
 * Requiring d^2 g/dt^2 = Gx xddot + Gm Wddot + c = 0 and substituting
 *   xddot = -theta xdot - (Gx^T lambda~ + V_x) / m_x
 *   Wddot = -theta Wdot - (Gm^T lambda~ + V_W) / m_W
 * gives A lambda~ = rhs with
 *   A   = Gx Gx^T / m_x + Gm Gm^T / m_W
 *   rhs = c - theta (Gx xdot + Gm Wdot) - Gx V_x / m_x - Gm V_W / m_W.
 * A is the Gram matrix of the scaled constraint gradients; it is positive
 * definite because Gx is unit lower triangular.
 */
template <typename Scalar>
Mat<Scalar> assemble_gram(const ConstraintEval<Scalar>& ce, const DynParams& params)
{
    if (!(params.mass_x > 0.0) || !(params.mass_w > 0.0))
        throw ConfigError("masses must be positive");

    const auto n = ce.Gx.rows();
    Mat<Scalar> gram = Mat<Scalar>::Zero(n, n);
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(ce.Gx, Scalar(1) / Scalar(params.mass_x));
    if (ce.Gm.cols() > 0)
        gram.template selfadjointView<Eigen::Lower>().rankUpdate(ce.Gm, Scalar(1) / Scalar(params.mass_w));
    gram.template triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

template <typename Scalar>
Vec<Scalar> assemble_rhs(const ConstraintEval<Scalar>& ce, const Vec<Scalar>& xdot, const Vec<Scalar>& wdot,
                         const Vec<Scalar>& grad_x, const Vec<Scalar>& grad_w, const DynParams& params)
{
    const Scalar theta(params.theta);
    Vec<Scalar> rhs = ce.c - theta * (ce.Gx * xdot + ce.Gm * wdot);
    rhs.noalias() -= ce.Gx * grad_x / Scalar(params.mass_x);
    if (ce.Gm.cols() > 0)
        rhs.noalias() -= ce.Gm * grad_w / Scalar(params.mass_w);
    return rhs;
}

/// Cholesky solve. A non-positive pivot means rank-deficient constraints and is
/// reported, never regularized.
template <typename Scalar>
Vec<Scalar> solve_spd(const Mat<Scalar>& gram, const Vec<Scalar>& rhs)
{
    Eigen::LLT<Mat<Scalar>> llt(gram);
    if (llt.info() != Eigen::Success)
        throw IndefiniteSystemError("multiplier system is not positive definite (constraint gradients are dependent)");
    return llt.solve(rhs);
}

/*
 * Solves T^T T delta = v for upper triangular T in O(n^2): forward substitution
 * for T^T mu = v, then back substitution for T delta = mu, which recovers delta
 * starting from the last (output) neuron. With T = Gx^T this is the pure-Gx
 * Gram system.
 */
template <typename Scalar>
Vec<Scalar> solve_triangular_gram(const Mat<Scalar>& upper, const Vec<Scalar>& v)
{
    const auto n = upper.rows();
    assert(upper.cols() == n && v.size() == n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (upper(i, i) == Scalar(0))
            throw IndefiniteSystemError("zero diagonal in triangular Gram factor at row " + std::to_string(i));

    Vec<Scalar> mu(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        Scalar acc = v[i];
        for (Eigen::Index k = 0; k < i; ++k)
            acc -= upper(k, i) * mu[k];
        mu[i] = acc / upper(i, i);
    }

    Vec<Scalar> delta(n);
    for (Eigen::Index i = n - 1; i >= 0; --i)
    {
        Scalar acc = mu[i];
        for (Eigen::Index k = i + 1; k < n; ++k)
            acc -= upper(i, k) * delta[k];
        delta[i] = acc / upper(i, i);
    }
    return delta;
}

} // namespace holonet

#endif // HOLONET_MULTIPLIERS_HPP

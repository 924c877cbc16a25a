#ifndef HOLONET_TYPES_HPP
#define HOLONET_TYPES_HPP

#include <Eigen/Core>

namespace holonet
{

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A multi-channel signal and its first two time derivatives at one instant.
template <typename Scalar>
struct SignalSampleT
{
    Vec<Scalar> value;
    Vec<Scalar> rate;  // d/dt
    Vec<Scalar> accel; // d^2/dt^2

    template <typename Other>
    SignalSampleT<Other> cast() const
    {
        return {value.template cast<Other>(), rate.template cast<Other>(), accel.template cast<Other>()};
    }
};

using SignalSample = SignalSampleT<double>;

/// A sample with zero derivatives, i.e. a frozen input.
template <typename Derived>
SignalSampleT<typename Derived::Scalar> frozen_sample(const Eigen::MatrixBase<Derived>& value)
{
    using Scalar = typename Derived::Scalar;
    const auto n = value.size();
    return {value, Vec<Scalar>::Zero(n), Vec<Scalar>::Zero(n)};
}

} // namespace holonet

#endif // HOLONET_TYPES_HPP

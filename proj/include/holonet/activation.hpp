#ifndef HOLONET_ACTIVATION_HPP
#define HOLONET_ACTIVATION_HPP

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace holonet
{

enum class Activation
{
    identity,
    tanh,
};

/// Value of an activation together with its first two derivatives.
template <typename Scalar>
struct ActivationValue
{
    Scalar value;
    Scalar d1; // sigma'(z)
    Scalar d2; // sigma''(z)
};

/// Closed-form evaluation. For tanh, sigma' = 1 - sigma^2 and sigma'' = -2 sigma sigma'.
template <typename Scalar>
ActivationValue<Scalar> activate(Activation kind, const Scalar& z)
{
    using std::tanh;
    switch (kind)
    {
    case Activation::tanh:
    {
        const Scalar s = tanh(z);
        const Scalar ds = Scalar(1) - s * s;
        return {s, ds, Scalar(-2) * s * ds};
    }
    case Activation::identity:
    default:
        return {z, Scalar(1), Scalar(0)};
    }
}

inline std::string_view to_string(Activation kind)
{
    return kind == Activation::tanh ? "tanh" : "identity";
}

inline std::optional<Activation> parse_activation(std::string_view name)
{
    if (name == "identity" || name == "linear")
        return Activation::identity;
    if (name == "tanh")
        return Activation::tanh;
    return std::nullopt;
}

} // namespace holonet

#endif // HOLONET_ACTIVATION_HPP

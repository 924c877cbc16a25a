#ifndef HOLONET_PARAMS_HPP
#define HOLONET_PARAMS_HPP

namespace holonet
{

/*
 * Parameters of the learning dynamics. The dissipation factor is
 * varpi(t) = exp(theta t); all equations are integrated in the form divided
 * through by varpi, with rescaled multipliers lambda~ = exp(-theta t) lambda.
 */
struct DynParams
{
    double mass_x{1.0};      // m_x > 0
    double mass_w{1.0};      // m_W > 0
    double theta{1.0};       // dissipation rate >= 0
    double gamma{1.0};       // gradient-flow scale, only used by the stiff-limit harness
    double penalty{0.0};     // c_p >= 0, weight of (c_p/2) |g|^2 added to the potential
    double dt{1e-3};         // RK4 step
    double horizon{1.0};     // final time
};

/// Throws ConfigError when a field is outside its admissible range.
void validate(const DynParams& params);

} // namespace holonet

#endif // HOLONET_PARAMS_HPP

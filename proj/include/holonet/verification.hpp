#ifndef HOLONET_VERIFICATION_HPP
#define HOLONET_VERIFICATION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "holonet/bp_oracle.hpp"
#include "holonet/network.hpp"

namespace holonet
{

struct CheckResult
{
    std::string name;
    bool passed{false};
    double worst{0.0};     // largest observed error
    double tolerance{0.0};
    std::string detail;
};

using ConstraintEvaluator =
    std::function<ConstraintEval<double>(const NetworkSpec&, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                         const Eigen::VectorXd& xdot, const Eigen::VectorXd& wdot,
                                         const SignalSample& input)>;

/// The library's analytic evaluator; checks accept a replacement for mutation testing.
ConstraintEvaluator default_evaluator();

/// Gx, Gm, Gt against central differences of g (relative 1e-6, unit floor).
CheckResult check_jacobians(std::uint64_t seed, int trials, const ConstraintEvaluator& eval = default_evaluator());
/// c against the second difference of g along a frozen-velocity path (relative 1e-6, unit floor).
CheckResult check_contraction(std::uint64_t seed, int trials, const ConstraintEvaluator& eval = default_evaluator());
CheckResult check_forward_pass(std::uint64_t seed, int trials);
CheckResult check_gram_positive(std::uint64_t seed, int trials);
CheckResult check_triangular_solve(std::uint64_t seed, int trials);
CheckResult check_bp_equivalence(std::uint64_t seed, int trials);
CheckResult check_weight_gradient(std::uint64_t seed, int trials);
CheckResult check_hidden_residual();
/// Runs the limit preset; passes when deviations fall by at least 2x per decade.
CheckResult check_limit(std::vector<LimitRow>* rows = nullptr);

std::vector<CheckResult> run_verification(std::uint64_t seed, std::ostream* limit_table = nullptr);

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

} // namespace holonet

#endif // HOLONET_VERIFICATION_HPP

#pragma once

#include <cstdint>
#include <optional>

#include "succession/prior.hpp"
#include "succession/rational.hpp"

namespace succession {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxPanels = std::size_t{1} << 20;

/// Process-wide default for quadrature tolerance, initially
/// kDefaultTolerance. The CLI maps the SUCCESSION_TOL environment variable
/// and --tol flag here before running a command.
double default_tolerance();
void set_default_tolerance(double tol);

/// Above this order, tabulated moments integrate in the substituted
/// variable u = x^(n+1), which flattens the integrand instead of letting it
/// concentrate at x = 1.
inline constexpr std::uint64_t kSubstitutionThreshold = 64;

/// E[x^n] under a prior, with a log-domain companion for huge n.
struct MomentValue {
    double value = 0.0;
    double log_value = 0.0;  // natural log; -inf when value is 0
    std::optional<Rational> exact;
    double error_bound = 0.0;  // absolute; 0 on closed-form and exact paths
};

/// M_n = E[x^n]. Dispatch: closed form for point masses and Beta, direct or
/// log-domain summation for discrete mixtures, quadrature for tabulated
/// densities. Monotone nonincreasing in n.
MomentValue moment(const Prior& prior, std::uint64_t n);

/// Exact M_n for exactly-representable priors (rational atoms and weights,
/// Beta with integer b, rational table nodes).
/// Throws NotExactlyRepresentableError otherwise.
Rational moment_exact(const Prior& prior, std::uint64_t n);

/// Quadrature route for tabulated densities with an explicit tolerance:
/// |value - M_n| <= error_bound <= tol, or ToleranceNotMetError.
MomentValue quadrature_moment(const Tabulated& density, std::uint64_t n,
                              double tol, std::size_t max_panels = kDefaultMaxPanels);
MomentValue quadrature_moment(const Tabulated& density, std::uint64_t n);

/// ln M_n, computed without underflow (max-shifted log-domain sums for
/// discrete mixtures). Throws ImpossibleEvidenceError when M_n is exactly 0.
double log_moment(const Prior& prior, std::uint64_t n);

/// Mixed evidence moment E[x^s (1-x)^f]; reduces to moment() when f = 0.
MomentValue mixed_moment(const Prior& prior, std::uint64_t successes, std::uint64_t failures);

/// Exact mixed moment; same representability rules as moment_exact, except
/// that Beta accepts any exact rational parameters (finite product form).
Rational mixed_moment_exact(const Prior& prior, std::uint64_t successes, std::uint64_t failures);

}  // namespace succession

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "succession/moments.hpp"
#include "succession/prior.hpp"

namespace succession {

/// Observed evidence: n successes, optionally followed by failures.
/// The classic setting is a pure run (failures = 0).
struct RunEvidence {
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
};

enum class Method { closed_form, exact_rational, quadrature, log_domain };
std::string_view method_name(Method method);

/// Probability that the next trial succeeds, with provenance.
struct PredictiveResult {
    double value = 0.0;
    std::optional<Rational> exact;
    Method method = Method::closed_form;
    double error_bound = 0.0;  // 0 for closed_form and exact_rational
};

/// P(next success | n observed successes) = M_{n+1} / M_n. Picks the best
/// route: exact rationals when the prior is exactly representable, closed
/// forms for point masses and Beta, log-domain ratios for discrete
/// mixtures, quadrature with a propagated bound for tabulated densities.
/// Throws ImpossibleEvidenceError when M_n = 0 (never reports 0/0).
PredictiveResult predictive_after_run(const Prior& prior, std::uint64_t n);

/// Uniform-prior closed form (n+1)/(n+2), exactly.
Rational predictive_uniform(std::uint64_t n);

/// The sunrise question: predictive_uniform(days), decimal-renderable.
PredictiveResult sunrise(std::uint64_t days);

/// Fixed-point decimal rendering, round-half-even, locale independent.
/// Uses the exact rational when present.
std::string render_decimal(const PredictiveResult& result, int digits = 8);
std::string render_decimal(double value, int digits = 8);

/// Evidence with failures: E[x^{s+1}(1-x)^f] / E[x^s(1-x)^f]. Reduces to
/// predictive_after_run when failures = 0; equals (a+s)/(a+b+s+f) for Beta.
PredictiveResult predictive_with_failures(const Prior& prior, const RunEvidence& evidence);

/// predictive_after_run(prior, n) divided by the uniform-prior reference
/// (n+1)/(n+2). For a continuous density with f(1) != 0 this tends to 1.
/// Defined for Beta and tabulated priors.
double asymptotic_ratio(const Prior& prior, std::uint64_t n);

struct PredictiveTable {
    struct Row {
        std::uint64_t n;
        PredictiveResult result;
    };
    std::vector<Row> rows;
    /// Set when M_n hit zero before n_max; `truncated_at` is the first such n.
    bool truncated = false;
    std::uint64_t truncated_at = 0;
};

/// Rows for n = 0..n_max, computed incrementally (one new moment per row).
PredictiveTable predictive_table(const Prior& prior, std::uint64_t n_max);

}  // namespace succession

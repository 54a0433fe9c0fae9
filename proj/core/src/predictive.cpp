#include "succession/predictive.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "succession/errors.hpp"

namespace succession {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void impossible_evidence() {
    throw ImpossibleEvidenceError(
        "evidence has probability zero under the prior; cannot condition");
}

PredictiveResult from_exact(Rational value) {
    PredictiveResult r;
    r.value = value.to_double();
    r.method = Method::exact_rational;
    r.error_bound = 0.0;
    r.exact = std::move(value);
    return r;
}

// Conservative float bound for a log-domain ratio exp(l1 - l0): a few ulps
// of each log plus slack for the summations behind them.
double log_domain_bound(double value, double l0, double l1, std::size_t terms) {
    const double eps = std::numeric_limits<double>::epsilon();
    return value * (std::abs(l0) + std::abs(l1) + 4.0 + static_cast<double>(terms)) * 4.0 *
           eps;
}

PredictiveResult discrete_log_domain(const DiscreteMixture& mixture, const Prior& prior,
                                     std::uint64_t s, std::uint64_t f) {
    const MomentValue m0 = mixed_moment(prior, s, f);
    if (m0.value == 0.0) impossible_evidence();
    const MomentValue m1 = mixed_moment(prior, s + 1, f);
    const double value = std::clamp(std::exp(m1.log_value - m0.log_value), 0.0, 1.0);
    PredictiveResult r;
    r.value = value;
    r.method = Method::log_domain;
    r.error_bound = log_domain_bound(value, m0.log_value, m1.log_value,
                                     mixture.atoms.size());
    return r;
}

PredictiveResult tabulated_quadrature(const Prior& prior, std::uint64_t s, std::uint64_t f) {
    const MomentValue m0 = mixed_moment(prior, s, f);
    if (m0.value <= m0.error_bound) {
        // Mass numerically indistinguishable from zero: refuse to divide.
        impossible_evidence();
    }
    const MomentValue m1 = mixed_moment(prior, s + 1, f);
    const double value = std::clamp(m1.value / m0.value, 0.0, 1.0);
    PredictiveResult r;
    r.value = value;
    r.method = Method::quadrature;
    r.error_bound = (m1.error_bound + value * m0.error_bound) / (m0.value - m0.error_bound);
    return r;
}

}  // namespace

std::string_view method_name(Method method) {
    switch (method) {
        case Method::closed_form: return "closed_form";
        case Method::exact_rational: return "exact_rational";
        case Method::quadrature: return "quadrature";
        case Method::log_domain: return "log_domain";
    }
    return "unknown";
}

PredictiveResult predictive_with_failures(const Prior& prior, const RunEvidence& evidence) {
    const std::uint64_t s = evidence.successes, f = evidence.failures;
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    if (f >= kMax || s > kMax - 1 - f) {
        throw DomainError("evidence length overflows the trial counter");
    }

    if (prior.is_exact()) {
        const Rational m0 = mixed_moment_exact(prior, s, f);
        if (m0.is_zero()) impossible_evidence();
        return from_exact(mixed_moment_exact(prior, s + 1, f) / m0);
    }

    return std::visit(
        [&](const auto& d) -> PredictiveResult {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                const double x = d.x.value;
                const bool possible = (x > 0.0 || s == 0) && (x < 1.0 || f == 0);
                if (!possible) impossible_evidence();
                return {x, std::nullopt, Method::closed_form, 0.0};
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double a = d.a.value, b = d.b.value;
                const double value = (a + static_cast<double>(s)) /
                                     (a + b + static_cast<double>(s) + static_cast<double>(f));
                return {value, std::nullopt, Method::closed_form, 0.0};
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                return discrete_log_domain(d, prior, s, f);
            } else {
                return tabulated_quadrature(prior, s, f);
            }
        },
        prior.distribution());
}

PredictiveResult predictive_after_run(const Prior& prior, std::uint64_t n) {
    return predictive_with_failures(prior, RunEvidence{n, 0});
}

Rational predictive_uniform(std::uint64_t n) {
    mpz_class num, den;
    mpz_set_ui(num.get_mpz_t(), static_cast<unsigned long>(n));
    num += 1;
    den = num + 1;
    return Rational(num, den);
}

PredictiveResult sunrise(std::uint64_t days) {
    return from_exact(predictive_uniform(days));
}

std::string render_decimal(double value, int digits) {
    if (digits < 0) throw DomainError("negative digit count");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed,
                                   digits);
    if (ec != std::errc{}) throw DomainError("value not renderable");
    return std::string(buf, end);
}

std::string render_decimal(const PredictiveResult& result, int digits) {
    if (result.exact) return result.exact->to_decimal_string(digits);
    return render_decimal(result.value, digits);
}

double asymptotic_ratio(const Prior& prior, std::uint64_t n) {
    if (!prior.get_if<BetaParams>() && !prior.get_if<Tabulated>()) {
        throw DomainError("asymptotic ratio needs a continuous density (Beta or tabulated)");
    }
    const PredictiveResult p = predictive_after_run(prior, n);
    if (p.exact) {
        const Rational reference = predictive_uniform(n);
        return (*p.exact / reference).to_double();
    }
    const double reference =
        (static_cast<double>(n) + 1.0) / (static_cast<double>(n) + 2.0);
    return p.value / reference;
}

PredictiveTable predictive_table(const Prior& prior, std::uint64_t n_max) {
    PredictiveTable table;
    table.rows.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n_max + 1, 1 << 20)));

    if (prior.is_exact()) {
        if (const auto* pm = prior.get_if<PointMass>()) {
            const Rational& x = *pm->x.exact;
            for (std::uint64_t n = 0; n <= n_max; ++n) {
                if (n >= 1 && x.is_zero()) {
                    table.truncated = true;
                    table.truncated_at = n;
                    return table;
                }
                table.rows.push_back({n, from_exact(x)});
            }
            return table;
        }
        // One exact moment per step; M_{n+1} reuses per-atom powers.
        if (const auto* mix = prior.get_if<DiscreteMixture>()) {
            std::vector<Rational> powers(mix->atoms.size(), Rational(1));
            Rational current(1);  // M_0 over normalized weights
            for (std::uint64_t n = 0; n <= n_max; ++n) {
                if (current.is_zero()) {
                    table.truncated = true;
                    table.truncated_at = n;
                    return table;
                }
                Rational next(0);
                for (std::size_t j = 0; j < mix->atoms.size(); ++j) {
                    powers[j] *= *mix->atoms[j].x.exact;
                    next += *mix->atoms[j].weight.exact * powers[j];
                }
                table.rows.push_back({n, from_exact(next / current)});
                current = std::move(next);
            }
            return table;
        }
        Rational current(1);
        for (std::uint64_t n = 0; n <= n_max; ++n) {
            if (current.is_zero()) {
                table.truncated = true;
                table.truncated_at = n;
                return table;
            }
            const Rational next = moment_exact(prior, n + 1);
            table.rows.push_back({n, from_exact(next / current)});
            current = next;
        }
        return table;
    }

    return std::visit(
        [&](const auto& d) -> PredictiveTable {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                const double x = d.x.value;
                for (std::uint64_t n = 0; n <= n_max; ++n) {
                    if (x == 0.0 && n >= 1) {
                        table.truncated = true;
                        table.truncated_at = n;
                        return table;
                    }
                    table.rows.push_back({n, {x, std::nullopt, Method::closed_form, 0.0}});
                }
                return table;
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double a = d.a.value, b = d.b.value;
                for (std::uint64_t n = 0; n <= n_max; ++n) {
                    const double value = (a + static_cast<double>(n)) /
                                         (a + b + static_cast<double>(n));
                    table.rows.push_back({n, {value, std::nullopt, Method::closed_form, 0.0}});
                }
                return table;
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                // Incremental log-domain power sums: one multiply per atom
                // per row, never a recomputation from scratch.
                std::vector<double> log_x, term;  // term_j = ln w_j + n ln x_j
                for (const auto& atom : d.atoms) {
                    if (atom.weight.value <= 0.0 || atom.x.value <= 0.0) continue;
                    log_x.push_back(std::log(atom.x.value));
                    term.push_back(std::log(atom.weight.value));
                }
                const auto lse = [&]() {
                    double max = kNegInf;
                    for (double t : term) max = std::max(max, t);
                    if (max == kNegInf) return kNegInf;
                    double sum = 0.0;
                    for (double t : term) sum += std::exp(t - max);
                    return max + std::log(sum);
                };
                if (term.empty()) {
                    // Every atom sits at x = 0: one row of certain failure,
                    // after which the evidence is impossible.
                    table.rows.push_back({0, {0.0, std::nullopt, Method::closed_form, 0.0}});
                    if (n_max >= 1) {
                        table.truncated = true;
                        table.truncated_at = 1;
                    }
                    return table;
                }
                double current_log = 0.0;  // ln M_0 = 0 for a normalized prior
                for (std::uint64_t n = 0; n <= n_max; ++n) {
                    for (std::size_t j = 0; j < term.size(); ++j) term[j] += log_x[j];
                    const double next_log = lse();
                    const double value =
                        std::clamp(std::exp(next_log - current_log), 0.0, 1.0);
                    PredictiveResult r;
                    r.value = value;
                    r.method = Method::log_domain;
                    r.error_bound = log_domain_bound(value, current_log, next_log, term.size());
                    table.rows.push_back({n, r});
                    current_log = next_log;
                }
                return table;
            } else {
                MomentValue current{1.0, 0.0, std::nullopt, 0.0};
                for (std::uint64_t n = 0; n <= n_max; ++n) {
                    if (current.value <= current.error_bound) {
                        table.truncated = true;
                        table.truncated_at = n;
                        return table;
                    }
                    const MomentValue next = quadrature_moment(d, n + 1);
                    const double value = std::clamp(next.value / current.value, 0.0, 1.0);
                    const double bound = (next.error_bound + value * current.error_bound) /
                                         (current.value - current.error_bound);
                    table.rows.push_back({n, {value, std::nullopt, Method::quadrature, bound}});
                    current = next;
                }
                return table;
            }
        },
        prior.distribution());
}

}  // namespace succession

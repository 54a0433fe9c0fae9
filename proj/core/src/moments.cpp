#include "succession/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "succession/errors.hpp"
#include "succession/quadrature.hpp"

namespace succession {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Running max-shifted log-sum-exp of positive terms.
struct LogSum {
    double max = kNegInf;
    double sum = 0.0;  // sum of exp(term - max)

    void add(double term) {
        if (term == kNegInf) return;
        if (sum == 0.0) {
            max = term;
            sum = 1.0;
        } else if (term <= max) {
            sum += std::exp(term - max);
        } else {
            sum = sum * std::exp(max - term) + 1.0;
            max = term;
        }
    }

    double log() const { return sum == 0.0 ? kNegInf : max + std::log(sum); }
};

MomentValue from_log(double log_value, double error_bound = 0.0) {
    return {log_value == kNegInf ? 0.0 : std::exp(log_value), log_value, std::nullopt,
            error_bound};
}

MomentValue unit_moment() { return {1.0, 0.0, std::nullopt, 0.0}; }

double density_at(const Tabulated& tab, double x) {
    const auto& nodes = tab.nodes;
    if (x <= nodes.front().x.value) return nodes.front().density.value;
    if (x >= nodes.back().x.value) return nodes.back().density.value;
    std::size_t lo = 0, hi = nodes.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (nodes[mid].x.value <= x ? lo : hi) = mid;
    }
    const double x0 = nodes[lo].x.value, x1 = nodes[hi].x.value;
    const double f0 = nodes[lo].density.value, f1 = nodes[hi].density.value;
    return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
}

std::vector<double> interior_breakpoints(const Tabulated& tab) {
    std::vector<double> bps;
    for (std::size_t i = 1; i + 1 < tab.nodes.size(); ++i) {
        bps.push_back(tab.nodes[i].x.value);
    }
    return bps;
}

// ln Gamma(a+k) - ln Gamma(a) as a directly accumulated sum for small k,
// lgamma difference otherwise.
double log_rising(double a, std::uint64_t k) {
    if (k <= 64) {
        double s = 0.0;
        for (std::uint64_t i = 0; i < k; ++i) s += std::log(a + static_cast<double>(i));
        return s;
    }
    return std::lgamma(a + static_cast<double>(k)) - std::lgamma(a);
}

Rational rational_of(std::uint64_t n) {
    mpz_class z;
    mpz_set_ui(z.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(z, mpz_class(1));
}

void require_exact(const Prior& prior) {
    if (!prior.is_exact()) {
        throw NotExactlyRepresentableError("prior was built from non-rational inputs");
    }
}

// Exact integral of x^n * (linear density) over each table segment:
//   f(x) = c + m x on [x0, x1], integral = c I(n) + m I(n+1),
//   I(k) = (x1^{k+1} - x0^{k+1}) / (k+1).
Rational tabulated_moment_exact(const Tabulated& tab, std::uint64_t n) {
    Rational total(0);
    const Rational kp1 = rational_of(n + 1), kp2 = rational_of(n + 2);
    for (std::size_t i = 1; i < tab.nodes.size(); ++i) {
        const Rational& x0 = *tab.nodes[i - 1].x.exact;
        const Rational& x1 = *tab.nodes[i].x.exact;
        const Rational& f0 = *tab.nodes[i - 1].density.exact;
        const Rational& f1 = *tab.nodes[i].density.exact;
        const Rational slope = (f1 - f0) / (x1 - x0);
        const Rational c = f0 - slope * x0;
        const Rational i_n = (x1.pow(n + 1) - x0.pow(n + 1)) / kp1;
        const Rational i_n1 = (x1.pow(n + 2) - x0.pow(n + 2)) / kp2;
        total += c * i_n + slope * i_n1;
    }
    return total;
}

// B(a+s, b+f) / B(a, b) as a finite product of rational ratios.
Rational beta_mixed_exact(const Rational& a, const Rational& b, std::uint64_t s,
                          std::uint64_t f) {
    Rational result(1);
    const Rational ab = a + b;
    for (std::uint64_t i = 0; i < s; ++i) {
        result *= (a + rational_of(i)) / (ab + rational_of(i));
    }
    const Rational ab_s = ab + rational_of(s);
    for (std::uint64_t j = 0; j < f; ++j) {
        result *= (b + rational_of(j)) / (ab_s + rational_of(j));
    }
    return result;
}

MomentValue tabulated_mixed_quadrature(const Tabulated& tab, std::uint64_t s,
                                       std::uint64_t f, double tol,
                                       std::size_t max_panels) {
    const double ds = static_cast<double>(s), df = static_cast<double>(f);
    auto integrand = [&](double x) {
        if (x <= 0.0) return s == 0 ? density_at(tab, 0.0) : 0.0;
        if (x >= 1.0) return f == 0 ? density_at(tab, 1.0) : 0.0;
        return std::exp(ds * std::log(x) + df * std::log1p(-x)) * density_at(tab, x);
    };
    auto bps = interior_breakpoints(tab);
    if (s + f > 0) bps.push_back(ds / (ds + df));  // integrand peak
    const auto q = integrate_adaptive(integrand, bps, tol, max_panels);
    const double value = std::clamp(q.value, 0.0, 1.0);
    return {value, value > 0.0 ? std::log(value) : kNegInf, std::nullopt, q.error_bound};
}

std::atomic<double>& tolerance_slot() {
    static std::atomic<double> tol{kDefaultTolerance};
    return tol;
}

}  // namespace

double default_tolerance() { return tolerance_slot().load(); }

void set_default_tolerance(double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    tolerance_slot().store(tol);
}

MomentValue quadrature_moment(const Tabulated& density, std::uint64_t n) {
    return quadrature_moment(density, n, default_tolerance(), kDefaultMaxPanels);
}

MomentValue quadrature_moment(const Tabulated& density, std::uint64_t n, double tol,
                              std::size_t max_panels) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

    if (n <= kSubstitutionThreshold) {
        const double dn = static_cast<double>(n);
        auto integrand = [&](double x) {
            return (n == 0 ? 1.0 : std::pow(x, dn)) * density_at(density, x);
        };
        const auto q = integrate_adaptive(integrand, interior_breakpoints(density), tol,
                                          max_panels);
        const double value = std::clamp(q.value, 0.0, 1.0);
        return {value, value > 0.0 ? std::log(value) : kNegInf, std::nullopt,
                q.error_bound};
    }

    // u = x^{n+1}:  M_n = (1/(n+1)) * integral of f(u^{1/(n+1)}) du.
    // The substituted integrand is O(1)-flat where x^n would concentrate at 1.
    const double order = static_cast<double>(n) + 1.0;
    auto integrand = [&](double u) {
        return density_at(density, u <= 0.0 ? 0.0 : std::exp(std::log(u) / order));
    };
    std::vector<double> bps;
    for (std::size_t i = 1; i + 1 < density.nodes.size(); ++i) {
        bps.push_back(std::pow(density.nodes[i].x.value, order));
    }
    const auto q = integrate_adaptive(integrand, bps, tol * order, max_panels);
    const double value = std::clamp(q.value / order, 0.0, 1.0);
    return {value, value > 0.0 ? std::log(value) : kNegInf, std::nullopt,
            q.error_bound / order};
}

MomentValue moment(const Prior& prior, std::uint64_t n) {
    if (n == 0) return unit_moment();
    // Closed-form and summation dispatches surface the exact rational when
    // the prior carries one and the powers stay small. Tabulated priors are
    // excluded: their moment() route is quadrature by contract, and the
    // exact segment sums exist as the independent cross-check.
    if (n <= 64 && prior.is_exact() && !prior.get_if<Tabulated>()) {
        Rational exact = moment_exact(prior, n);
        const double value = exact.to_double();
        return {value, value > 0.0 ? std::log(value) : kNegInf, std::move(exact), 0.0};
    }
    return std::visit(
        [&](const auto& d) -> MomentValue {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                const double x = d.x.value;
                if (x == 0.0) return from_log(kNegInf);
                return from_log(static_cast<double>(n) * std::log(x));
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double a = d.a.value, b = d.b.value;
                if (n <= 64) {
                    double p = 1.0;
                    for (std::uint64_t i = 0; i < n; ++i) {
                        const double di = static_cast<double>(i);
                        p *= (a + di) / (a + b + di);
                    }
                    return {p, std::log(p), std::nullopt, 0.0};
                }
                return from_log(log_rising(a, n) -
                                (std::lgamma(a + b + static_cast<double>(n)) -
                                 std::lgamma(a + b)));
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                if (n <= 64) {
                    double sum = 0.0;
                    for (const auto& atom : d.atoms) {
                        sum += atom.weight.value * std::pow(atom.x.value, static_cast<double>(n));
                    }
                    sum = std::clamp(sum, 0.0, 1.0);
                    return {sum, sum > 0.0 ? std::log(sum) : kNegInf, std::nullopt, 0.0};
                }
                LogSum acc;
                for (const auto& atom : d.atoms) {
                    if (atom.x.value <= 0.0 || atom.weight.value <= 0.0) continue;
                    acc.add(std::log(atom.weight.value) +
                            static_cast<double>(n) * std::log(atom.x.value));
                }
                return from_log(acc.log());
            } else {
                return quadrature_moment(d, n);
            }
        },
        prior.distribution());
}

Rational moment_exact(const Prior& prior, std::uint64_t n) {
    require_exact(prior);
    return std::visit(
        [&](const auto& d) -> Rational {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return d.x.exact->pow(n);
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                Rational sum(0);
                for (const auto& atom : d.atoms) {
                    sum += *atom.weight.exact * atom.x.exact->pow(n);
                }
                return sum;
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const Rational& a = *d.a.exact;
                const Rational& b = *d.b.exact;
                if (b.is_integer() && b.raw().get_num().fits_ulong_p()) {
                    // Telescoped form: product of b terms instead of n.
                    const unsigned long bi = b.raw().get_num().get_ui();
                    Rational result(1);
                    const Rational rn = rational_of(n);
                    for (unsigned long j = 0; j < bi; ++j) {
                        const Rational rj = rational_of(j);
                        result *= (a + rj) / (a + rn + rj);
                    }
                    return result;
                }
                return beta_mixed_exact(a, b, n, 0);
            } else {
                return tabulated_moment_exact(d, n);
            }
        },
        prior.distribution());
}

double log_moment(const Prior& prior, std::uint64_t n) {
    if (n == 0) return 0.0;
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                if (d.x.value == 0.0) {
                    throw ImpossibleEvidenceError("moment is exactly zero: all mass at x = 0");
                }
                return static_cast<double>(n) * std::log(d.x.value);
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return log_rising(d.a.value, n) -
                       (std::lgamma(d.a.value + d.b.value + static_cast<double>(n)) -
                        std::lgamma(d.a.value + d.b.value));
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                LogSum acc;
                for (const auto& atom : d.atoms) {
                    if (atom.x.value <= 0.0 || atom.weight.value <= 0.0) continue;
                    acc.add(std::log(atom.weight.value) +
                            static_cast<double>(n) * std::log(atom.x.value));
                }
                const double lv = acc.log();
                if (lv == kNegInf) {
                    throw ImpossibleEvidenceError("moment is exactly zero: all mass at x = 0");
                }
                return lv;
            } else {
                const MomentValue m = quadrature_moment(d, n);
                if (m.value <= 0.0) {
                    throw ToleranceNotMetError(
                        "tabulated moment underflowed; log-moment not resolvable");
                }
                return m.log_value;
            }
        },
        prior.distribution());
}

MomentValue mixed_moment(const Prior& prior, std::uint64_t successes, std::uint64_t failures) {
    if (failures == 0) return moment(prior, successes);
    const std::uint64_t s = successes, f = failures;
    return std::visit(
        [&](const auto& d) -> MomentValue {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                const double x = d.x.value;
                if (x == 0.0) return s == 0 ? unit_moment() : from_log(kNegInf);
                if (x == 1.0) return from_log(kNegInf);  // f >= 1 here
                return from_log(static_cast<double>(s) * std::log(x) +
                                static_cast<double>(f) * std::log1p(-x));
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                const double a = d.a.value, b = d.b.value;
                if (s + f <= 64) {
                    double p = 1.0;
                    for (std::uint64_t i = 0; i < s; ++i) {
                        const double di = static_cast<double>(i);
                        p *= (a + di) / (a + b + di);
                    }
                    for (std::uint64_t j = 0; j < f; ++j) {
                        const double dj = static_cast<double>(j);
                        p *= (b + dj) / (a + b + static_cast<double>(s) + dj);
                    }
                    return {p, std::log(p), std::nullopt, 0.0};
                }
                const double lv = log_rising(a, s) + log_rising(b, f) - log_rising(a + b, s + f);
                return from_log(lv);
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                if (s + f <= 64) {
                    double sum = 0.0;
                    for (const auto& atom : d.atoms) {
                        sum += atom.weight.value *
                               std::pow(atom.x.value, static_cast<double>(s)) *
                               std::pow(1.0 - atom.x.value, static_cast<double>(f));
                    }
                    sum = std::clamp(sum, 0.0, 1.0);
                    return {sum, sum > 0.0 ? std::log(sum) : kNegInf, std::nullopt, 0.0};
                }
                LogSum acc;
                for (const auto& atom : d.atoms) {
                    const double x = atom.x.value, w = atom.weight.value;
                    if (w <= 0.0) continue;
                    if (x == 0.0) {
                        if (s == 0) acc.add(std::log(w));
                        continue;
                    }
                    if (x == 1.0) continue;  // f >= 1
                    acc.add(std::log(w) + static_cast<double>(s) * std::log(x) +
                            static_cast<double>(f) * std::log1p(-x));
                }
                return from_log(acc.log());
            } else {
                return tabulated_mixed_quadrature(d, s, f, default_tolerance(),
                                                  kDefaultMaxPanels);
            }
        },
        prior.distribution());
}

Rational mixed_moment_exact(const Prior& prior, std::uint64_t successes,
                            std::uint64_t failures) {
    if (failures == 0) return moment_exact(prior, successes);
    require_exact(prior);
    const std::uint64_t s = successes, f = failures;
    return std::visit(
        [&](const auto& d) -> Rational {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return d.x.exact->pow(s) * (Rational(1) - *d.x.exact).pow(f);
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                Rational sum(0);
                for (const auto& atom : d.atoms) {
                    sum += *atom.weight.exact * atom.x.exact->pow(s) *
                           (Rational(1) - *atom.x.exact).pow(f);
                }
                return sum;
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return beta_mixed_exact(*d.a.exact, *d.b.exact, s, f);
            } else {
                // Binomial expansion of (1-x)^f, then power integrals per segment.
                Rational total(0);
                for (std::uint64_t t = 0; t <= f; ++t) {
                    mpz_class binom;
                    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(f),
                                 static_cast<unsigned long>(t));
                    Rational coeff(binom, mpz_class(1));
                    if (t % 2 == 1) coeff = -coeff;
                    total += coeff * tabulated_moment_exact(d, s + t);
                }
                return total;
            }
        },
        prior.distribution());
}

}  // namespace succession

#include "succession/prior.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "succession/errors.hpp"

namespace succession {

namespace {

bool scalar_equal(const Scalar& a, const Scalar& b) {
    if (a.exact && b.exact) return *a.exact == *b.exact;
    return a.value == b.value;
}

void require_probability(const Scalar& s, const char* what) {
    const bool ok = s.exact ? (s.exact->sign() >= 0 && *s.exact <= Rational(1))
                            : (s.value >= 0.0 && s.value <= 1.0);
    if (!ok) throw DomainError(std::string(what) + " outside [0,1]");
}

std::string format_scalar(const Scalar& s) {
    if (s.exact) {
        if (s.exact->is_integer()) return s.exact->raw().get_num().get_str();
        return s.exact->to_fraction_string();
    }
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, s.value,
                                   std::chars_format::general, 17);
    return std::string(buf, end);
}

}  // namespace

Scalar Scalar::parse(std::string_view text) {
    return Scalar::of(Rational::parse(text));
}

Prior Prior::point_mass(Scalar x) {
    require_probability(x, "point mass");
    return Prior(PointMass{std::move(x)});
}

Prior Prior::beta(Scalar a, Scalar b) {
    const bool a_pos = a.exact ? a.exact->sign() > 0 : a.value > 0.0;
    const bool b_pos = b.exact ? b.exact->sign() > 0 : b.value > 0.0;
    if (!a_pos || !b_pos) throw DomainError("Beta parameters must be positive");
    return Prior(BetaParams{std::move(a), std::move(b)});
}

Prior Prior::discrete(std::vector<MixtureAtom> atoms) {
    if (atoms.empty()) throw DomainError("discrete mixture needs at least one atom");
    for (const auto& atom : atoms) {
        require_probability(atom.x, "mixture atom");
        const bool nonneg = atom.weight.exact ? atom.weight.exact->sign() >= 0
                                              : atom.weight.value >= 0.0;
        if (!nonneg) throw DomainError("mixture weight must be nonnegative");
    }

    std::stable_sort(atoms.begin(), atoms.end(), [](const auto& l, const auto& r) {
        if (l.x.exact && r.x.exact) return *l.x.exact < *r.x.exact;
        return l.x.value < r.x.value;
    });

    // Merge duplicate abscissae by summing weights.
    std::vector<MixtureAtom> merged;
    for (auto& atom : atoms) {
        if (!merged.empty() && scalar_equal(merged.back().x, atom.x)) {
            Scalar& w = merged.back().weight;
            if (w.exact && atom.weight.exact) {
                w = Scalar::of(*w.exact + *atom.weight.exact);
            } else {
                w = Scalar::of(w.value + atom.weight.value);
            }
        } else {
            merged.push_back(std::move(atom));
        }
    }

    const bool exact_weights = std::all_of(merged.begin(), merged.end(),
                                           [](const auto& a) { return a.weight.is_exact(); });
    if (exact_weights) {
        Rational total(0);
        for (const auto& a : merged) total += *a.weight.exact;
        if (total.is_zero()) throw ZeroMassError("all mixture weights are zero");
        for (auto& a : merged) a.weight = Scalar::of(*a.weight.exact / total);
    } else {
        double total = 0.0;
        for (const auto& a : merged) total += a.weight.value;
        if (total <= 0.0) throw ZeroMassError("all mixture weights are zero");
        // Skip the rescale when the sum is already 1 up to accumulated
        // rounding, so renormalizing is bitwise idempotent.
        const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                             static_cast<double>(merged.size());
        if (std::abs(total - 1.0) > slack) {
            for (auto& a : merged) a.weight = Scalar::of(a.weight.value / total);
        }
    }
    return Prior(DiscreteMixture{std::move(merged)});
}

Prior Prior::tabulated(std::vector<TableNode> nodes) {
    if (nodes.size() < 2) throw DomainError("tabulated density needs at least two nodes");
    for (const auto& node : nodes) {
        require_probability(node.x, "table abscissa");
        const bool nonneg = node.density.exact ? node.density.exact->sign() >= 0
                                               : node.density.value >= 0.0;
        if (!nonneg) throw DomainError("table ordinate must be nonnegative");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const bool increasing = nodes[i - 1].x.exact && nodes[i].x.exact
                                    ? *nodes[i - 1].x.exact < *nodes[i].x.exact
                                    : nodes[i - 1].x.value < nodes[i].x.value;
        if (!increasing) throw DomainError("table abscissae must be strictly increasing");
    }
    const auto is_zero = [](const Scalar& s) {
        return s.exact ? s.exact->is_zero() : s.value == 0.0;
    };
    const auto is_one = [](const Scalar& s) {
        return s.exact ? *s.exact == Rational(1) : s.value == 1.0;
    };
    if (!is_zero(nodes.front().x) || !is_one(nodes.back().x)) {
        throw DomainError("table must cover [0,1]: first abscissa 0, last 1");
    }

    const bool exact = std::all_of(nodes.begin(), nodes.end(), [](const auto& n) {
        return n.x.is_exact() && n.density.is_exact();
    });
    if (exact) {
        // Trapezoid mass, exactly.
        Rational mass(0);
        const Rational half(1, 2);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            mass += half * (*nodes[i].x.exact - *nodes[i - 1].x.exact) *
                    (*nodes[i].density.exact + *nodes[i - 1].density.exact);
        }
        if (mass.is_zero()) throw ZeroMassError("tabulated density is identically zero");
        for (auto& n : nodes) n.density = Scalar::of(*n.density.exact / mass);
    } else {
        double mass = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            mass += 0.5 * (nodes[i].x.value - nodes[i - 1].x.value) *
                    (nodes[i].density.value + nodes[i - 1].density.value);
        }
        if (mass <= 0.0) throw ZeroMassError("tabulated density is identically zero");
        const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                             static_cast<double>(nodes.size());
        if (std::abs(mass - 1.0) > slack) {
            for (auto& n : nodes) n.density = Scalar::of(n.density.value / mass);
        }
    }
    return Prior(Tabulated{std::move(nodes)});
}

bool Prior::is_exact() const {
    return std::visit(
        [](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return d.x.is_exact();
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                return std::all_of(d.atoms.begin(), d.atoms.end(), [](const auto& a) {
                    return a.x.is_exact() && a.weight.is_exact();
                });
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return d.a.is_exact() && d.b.is_exact();
            } else {
                return std::all_of(d.nodes.begin(), d.nodes.end(), [](const auto& n) {
                    return n.x.is_exact() && n.density.is_exact();
                });
            }
        },
        dist_);
}

bool Prior::is_uniform() const {
    const auto* beta = get_if<BetaParams>();
    if (!beta) return false;
    const Rational one(1);
    const bool a_one = beta->a.exact ? *beta->a.exact == one : beta->a.value == 1.0;
    const bool b_one = beta->b.exact ? *beta->b.exact == one : beta->b.value == 1.0;
    return a_one && b_one;
}

Prior normalize(const Prior& prior) {
    return std::visit(
        [](const auto& d) -> Prior {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return Prior::point_mass(d.x);
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                return Prior::discrete(d.atoms);
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return Prior::beta(d.a, d.b);
            } else {
                return Prior::tabulated(d.nodes);
            }
        },
        prior.distribution());
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Scalar parse_scalar(std::string_view text) {
    auto r = Rational::try_parse(trim(text));
    if (!r) throw ParseError("bad number in prior spec: '" + std::string(text) + "'");
    return Scalar::of(std::move(*r));
}

}  // namespace

Prior parse_prior(std::string_view spec) {
    const std::string_view s = trim(spec);
    if (s == "uniform") return Prior::uniform();

    const std::size_t colon = s.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("unrecognized prior spec: '" + std::string(spec) + "'");
    }
    const std::string_view kind = s.substr(0, colon);
    const std::string_view body = s.substr(colon + 1);

    if (kind == "point") {
        return Prior::point_mass(parse_scalar(body));
    }
    if (kind == "beta") {
        const auto parts = split(body, ',');
        if (parts.size() != 2) throw ParseError("beta prior needs two parameters");
        return Prior::beta(parse_scalar(parts[0]), parse_scalar(parts[1]));
    }
    if (kind == "discrete") {
        std::vector<MixtureAtom> atoms;
        for (std::string_view part : split(body, ',')) {
            const std::size_t at = part.find('@');
            if (at == std::string_view::npos) {
                throw ParseError("discrete atom must be '<x>@<w>': '" + std::string(part) + "'");
            }
            atoms.push_back({parse_scalar(part.substr(0, at)), parse_scalar(part.substr(at + 1))});
        }
        return Prior::discrete(std::move(atoms));
    }
    if (kind == "table") {
        std::vector<TableNode> nodes;
        for (std::string_view part : split(body, ',')) {
            const std::size_t sep = part.find(':');
            if (sep == std::string_view::npos) {
                throw ParseError("table node must be '<x>:<f>': '" + std::string(part) + "'");
            }
            nodes.push_back({parse_scalar(part.substr(0, sep)), parse_scalar(part.substr(sep + 1))});
        }
        return Prior::tabulated(std::move(nodes));
    }
    throw ParseError("unrecognized prior kind: '" + std::string(kind) + "'");
}

std::string format_prior(const Prior& prior) {
    if (prior.is_uniform()) return "uniform";
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return "point:" + format_scalar(d.x);
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return "beta:" + format_scalar(d.a) + "," + format_scalar(d.b);
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                std::string out = "discrete:";
                for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                    if (i) out += ',';
                    out += format_scalar(d.atoms[i].x) + "@" + format_scalar(d.atoms[i].weight);
                }
                return out;
            } else {
                std::string out = "table:";
                for (std::size_t i = 0; i < d.nodes.size(); ++i) {
                    if (i) out += ',';
                    out += format_scalar(d.nodes[i].x) + ":" + format_scalar(d.nodes[i].density);
                }
                return out;
            }
        },
        prior.distribution());
}

double prior_mean(const Prior& prior) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return d.x.value;
            } else if constexpr (std::is_same_v<T, DiscreteMixture>) {
                double mean = 0.0;
                for (const auto& a : d.atoms) mean += a.weight.value * a.x.value;
                return std::clamp(mean, 0.0, 1.0);
            } else if constexpr (std::is_same_v<T, BetaParams>) {
                return d.a.value / (d.a.value + d.b.value);
            } else {
                // Per segment: integral of x * (linear density), closed form.
                double mean = 0.0;
                for (std::size_t i = 1; i < d.nodes.size(); ++i) {
                    const double x0 = d.nodes[i - 1].x.value, x1 = d.nodes[i].x.value;
                    const double f0 = d.nodes[i - 1].density.value, f1 = d.nodes[i].density.value;
                    const double m = (f1 - f0) / (x1 - x0);
                    const double c = f0 - m * x0;
                    mean += c * (x1 * x1 - x0 * x0) / 2.0 + m * (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
                }
                return std::clamp(mean, 0.0, 1.0);
            }
        },
        prior.distribution());
}

}  // namespace succession

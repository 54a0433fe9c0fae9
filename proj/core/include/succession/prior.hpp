#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "succession/rational.hpp"

namespace succession {

/// Numeric parameter that may carry an exact rational alongside its double.
/// Parameters built from text keep the exact value; parameters built from
/// raw doubles do not, and exact-arithmetic paths reject them.
struct Scalar {
    double value = 0.0;
    std::optional<Rational> exact;

    static Scalar of(double v) { return {v, std::nullopt}; }
    static Scalar of(Rational r) {
        const double v = r.to_double();
        return {v, std::move(r)};
    }
    static Scalar of(long num, long den) { return of(Rational(num, den)); }

    /// Parses a decimal or "p/q" literal into an exact scalar.
    static Scalar parse(std::string_view text);

    bool is_exact() const { return exact.has_value(); }
};

struct PointMass {
    Scalar x;
};

struct MixtureAtom {
    Scalar x;
    Scalar weight;
};

struct DiscreteMixture {
    std::vector<MixtureAtom> atoms;  // sorted by abscissa, duplicates merged
};

struct BetaParams {
    Scalar a;
    Scalar b;
};

struct TableNode {
    Scalar x;
    Scalar density;
};

/// Piecewise-linear density on [0,1]: first node at 0, last at 1.
struct Tabulated {
    std::vector<TableNode> nodes;
};

/// Immutable prior over the latent success parameter x in [0,1].
/// Normalization (weights summing to 1, density integrating to 1) happens
/// once at construction; instances are safe to share across threads.
class Prior {
  public:
    using Distribution = std::variant<PointMass, DiscreteMixture, BetaParams, Tabulated>;

    static Prior point_mass(Scalar x);
    static Prior uniform() { return beta(Scalar::of(1, 1), Scalar::of(1, 1)); }
    static Prior beta(Scalar a, Scalar b);
    static Prior discrete(std::vector<MixtureAtom> atoms);
    static Prior tabulated(std::vector<TableNode> nodes);

    const Distribution& distribution() const { return dist_; }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&dist_);
    }

    /// True when every parameter carries an exact rational.
    bool is_exact() const;

    /// True for Beta(1,1), the uniform density on [0,1].
    bool is_uniform() const;

  private:
    explicit Prior(Distribution d) : dist_(std::move(d)) {}
    Distribution dist_;
};

/// Re-applies construction-time normalization. Idempotent.
Prior normalize(const Prior& prior);

/// Prior spec grammar:
///   "uniform" | "point:<x>" | "beta:<a>,<b>"
///   | "discrete:<x1>@<w1>,<x2>@<w2>,..." | "table:<x1>:<f1>,<x2>:<f2>,..."
/// Numbers are decimal literals or exact fractions "p/q".
Prior parse_prior(std::string_view spec);

/// Canonical spec string; parse_prior(format_prior(p)) reproduces p.
std::string format_prior(const Prior& prior);

/// First moment E[x]; always in [0,1].
double prior_mean(const Prior& prior);

}  // namespace succession

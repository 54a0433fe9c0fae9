#include <doctest.h>

#include <cmath>
#include <vector>

#include "succession/errors.hpp"
#include "succession/prior.hpp"
#include "succession/quadrature.hpp"
#include "succession/rng.hpp"

using namespace succession;

namespace {

MixtureAtom atom(long xn, long xd, long wn, long wd) {
    return {Scalar::of(xn, xd), Scalar::of(wn, wd)};
}

bool priors_equal(const Prior& a, const Prior& b) {
    return format_prior(a) == format_prior(b);
}

}  // namespace

TEST_CASE("construction normalizes discrete weights") {
    // Identical atoms merge, then rescale.
    const Prior same = Prior::discrete({atom(1, 2, 2, 1), atom(1, 2, 2, 1)});
    const auto* mix = same.get_if<DiscreteMixture>();
    REQUIRE(mix != nullptr);
    REQUIRE(mix->atoms.size() == 1);
    CHECK(*mix->atoms[0].weight.exact == Rational(1));

    const Prior ratio = Prior::discrete({atom(9, 10, 3, 1), atom(1, 10, 1, 1)});
    const auto* atoms = ratio.get_if<DiscreteMixture>();
    REQUIRE(atoms->atoms.size() == 2);
    CHECK(*atoms->atoms[0].weight.exact == Rational(1, 4));  // sorted: 1/10 first
    CHECK(*atoms->atoms[1].weight.exact == Rational(3, 4));
    CHECK(atoms->atoms[0].weight.value == 0.25);
    CHECK(atoms->atoms[1].weight.value == 0.75);
}

TEST_CASE("construction normalizes tabulated densities") {
    // Constant ordinate 2 on [0,1] has trapezoid mass 2; both rescale to 1.
    const Prior flat = Prior::tabulated({{Scalar::of(0, 1), Scalar::of(2, 1)},
                                         {Scalar::of(1, 1), Scalar::of(2, 1)}});
    const auto* tab = flat.get_if<Tabulated>();
    REQUIRE(tab != nullptr);
    CHECK(*tab->nodes[0].density.exact == Rational(1));
    CHECK(*tab->nodes[1].density.exact == Rational(1));
}

TEST_CASE("structural invariants are enforced") {
    CHECK_THROWS_AS(Prior::discrete({}), DomainError);
    CHECK_THROWS_AS(Prior::discrete({atom(3, 2, 1, 1)}), DomainError);   // atom > 1
    CHECK_THROWS_AS(Prior::discrete({atom(1, 2, -1, 1)}), DomainError);  // negative weight
    CHECK_THROWS_AS(Prior::discrete({atom(1, 2, 0, 1)}), ZeroMassError);
    CHECK_THROWS_AS(Prior::beta(Scalar::of(0, 1), Scalar::of(1, 1)), DomainError);
    CHECK_THROWS_AS(Prior::point_mass(Scalar::of(-1, 2)), DomainError);
    CHECK_THROWS_AS(Prior::tabulated({{Scalar::of(0, 1), Scalar::of(1, 1)}}), DomainError);
    CHECK_THROWS_AS(Prior::tabulated({{Scalar::of(0, 1), Scalar::of(0, 1)},
                                      {Scalar::of(1, 1), Scalar::of(0, 1)}}),
                    ZeroMassError);
    // Grid must start at 0 and end at 1, strictly increasing.
    CHECK_THROWS_AS(Prior::tabulated({{Scalar::of(1, 4), Scalar::of(1, 1)},
                                      {Scalar::of(1, 1), Scalar::of(1, 1)}}),
                    DomainError);
    CHECK_THROWS_AS(Prior::tabulated({{Scalar::of(0, 1), Scalar::of(1, 1)},
                                      {Scalar::of(1, 2), Scalar::of(1, 1)},
                                      {Scalar::of(1, 2), Scalar::of(1, 1)},
                                      {Scalar::of(1, 1), Scalar::of(1, 1)}}),
                    DomainError);
}

TEST_CASE("parse_prior handles the full grammar") {
    CHECK(parse_prior("uniform").is_uniform());
    CHECK(parse_prior("beta:1,1").is_uniform());
    CHECK(parse_prior(" uniform ").is_uniform());

    const Prior p = parse_prior("point:0.3");
    CHECK(*p.get_if<PointMass>()->x.exact == Rational(3, 10));

    const Prior d = parse_prior("discrete:0.9@0.5,0.1@0.5");
    const auto* mix = d.get_if<DiscreteMixture>();
    REQUIRE(mix->atoms.size() == 2);
    CHECK(*mix->atoms[0].x.exact == Rational(1, 10));
    CHECK(*mix->atoms[1].x.exact == Rational(9, 10));
    CHECK(*mix->atoms[0].weight.exact == Rational(1, 2));

    const Prior t = parse_prior("table:0:0,1/2:1,1:2");
    CHECK(t.get_if<Tabulated>()->nodes.size() == 3);

    CHECK_THROWS_AS(parse_prior(""), ParseError);
    CHECK_THROWS_AS(parse_prior("gauss:1"), ParseError);
    CHECK_THROWS_AS(parse_prior("point:"), ParseError);
    CHECK_THROWS_AS(parse_prior("discrete:0.5"), ParseError);
    CHECK_THROWS_AS(parse_prior("beta:1"), ParseError);
    CHECK_THROWS_AS(parse_prior("point:1.5"), DomainError);
    CHECK_THROWS_AS(parse_prior("beta:-1,1"), DomainError);
}

TEST_CASE("normalize is idempotent and format round-trips") {
    const std::vector<std::string> specs = {
        "uniform",
        "point:1/3",
        "beta:2,5",
        "discrete:0.9@0.5,0.1@0.5",
        "discrete:1@1,0@3",
        "table:0:0,1/2:1,1:2",
        "table:0:2,1:2",
    };
    for (const auto& spec : specs) {
        CAPTURE(spec);
        const Prior p = parse_prior(spec);
        CHECK(priors_equal(p, normalize(p)));
        CHECK(priors_equal(p, parse_prior(format_prior(p))));
    }
}

TEST_CASE("normalize is bitwise idempotent on float-valued priors") {
    PhiloxRng rng(401, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<MixtureAtom> atoms;
        const int k = 1 + static_cast<int>(rng.next_u64() % 8);
        for (int j = 0; j < k; ++j) {
            atoms.push_back({Scalar::of(rng.next_double()),
                             Scalar::of(0.01 + 3.0 * rng.next_double())});
        }
        const Prior once = Prior::discrete(atoms);
        const Prior twice = normalize(once);
        const auto* a = once.get_if<DiscreteMixture>();
        const auto* b = twice.get_if<DiscreteMixture>();
        REQUIRE(a->atoms.size() == b->atoms.size());
        for (std::size_t i = 0; i < a->atoms.size(); ++i) {
            CHECK(a->atoms[i].x.value == b->atoms[i].x.value);
            CHECK(a->atoms[i].weight.value == b->atoms[i].weight.value);
        }

        const Prior table = Prior::tabulated({{Scalar::of(0.0), Scalar::of(rng.next_double())},
                                              {Scalar::of(0.5), Scalar::of(rng.next_double())},
                                              {Scalar::of(1.0), Scalar::of(1.0)}});
        const Prior table_twice = normalize(table);
        const auto* ta = table.get_if<Tabulated>();
        const auto* tb = table_twice.get_if<Tabulated>();
        for (std::size_t i = 0; i < ta->nodes.size(); ++i) {
            CHECK(ta->nodes[i].density.value == tb->nodes[i].density.value);
        }
        // The weight-sum invariant survives the idempotence shortcut.
        double sum = 0.0;
        for (const auto& atom : a->atoms) sum += atom.weight.value;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("round-trip survives non-exact doubles within float noise") {
    const Prior p = Prior::discrete({{Scalar::of(0.123456789), Scalar::of(0.25)},
                                     {Scalar::of(0.75), Scalar::of(0.75)}});
    const Prior q = parse_prior(format_prior(p));
    const auto* before = p.get_if<DiscreteMixture>();
    const auto* after = q.get_if<DiscreteMixture>();
    REQUIRE(after->atoms.size() == before->atoms.size());
    for (std::size_t i = 0; i < after->atoms.size(); ++i) {
        CHECK(after->atoms[i].x.value ==
              doctest::Approx(before->atoms[i].x.value).epsilon(1e-12));
        CHECK(after->atoms[i].weight.value ==
              doctest::Approx(before->atoms[i].weight.value).epsilon(1e-12));
    }
}

TEST_CASE("prior_mean closed forms") {
    CHECK(prior_mean(parse_prior("point:0.3")) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(prior_mean(Prior::uniform()) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(prior_mean(parse_prior("discrete:1@0.5,0@0.5")) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(prior_mean(parse_prior("beta:2,5")) == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
    // Density 2x has mean 2/3.
    CHECK(prior_mean(parse_prior("table:0:0,1:2")) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("prior_mean lies between the extreme atoms") {
    PhiloxRng rng(2026, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MixtureAtom> atoms;
        const int k = 1 + static_cast<int>(rng.next_u64() % 8);
        double lo = 1.0, hi = 0.0;
        for (int j = 0; j < k; ++j) {
            const double x = rng.next_double();
            atoms.push_back({Scalar::of(x), Scalar::of(rng.next_double() + 1e-3)});
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double mean = prior_mean(Prior::discrete(atoms));
        CHECK(mean >= lo - 1e-12);
        CHECK(mean <= hi + 1e-12);
    }
}

TEST_CASE("beta mean agrees with direct quadrature of the density") {
    // Test-only oracle: integrate x * beta density numerically and compare.
    PhiloxRng rng(99, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 1.0 + 4.0 * rng.next_double();
        const double b = 1.0 + 4.0 * rng.next_double();
        const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
        const auto integrand = [&](double x) {
            if (x <= 0.0 || x >= 1.0) return 0.0;
            return x * std::exp(log_norm + (a - 1.0) * std::log(x) +
                                (b - 1.0) * std::log1p(-x));
        };
        const auto q = integrate_adaptive(integrand, {}, 1e-13, 1 << 20);
        const double mean = prior_mean(Prior::beta(Scalar::of(a), Scalar::of(b)));
        CHECK(mean == doctest::Approx(q.value).epsilon(1e-12));
    }
}

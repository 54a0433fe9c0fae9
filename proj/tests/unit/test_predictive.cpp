#include <doctest.h>

#include <cmath>
#include <vector>

#include "succession/errors.hpp"
#include "succession/montecarlo.hpp"
#include "succession/predictive.hpp"
#include "succession/prior.hpp"
#include "succession/rng.hpp"

using namespace succession;

namespace {

Prior two_coins() { return parse_prior("discrete:9/10@1/2,1/10@1/2"); }

Prior random_float_mixture(PhiloxRng& rng, int max_atoms = 6) {
    std::vector<MixtureAtom> atoms;
    const int k = 1 + static_cast<int>(rng.next_u64() % max_atoms);
    for (int j = 0; j < k; ++j) {
        atoms.push_back({Scalar::of(0.02 + 0.96 * rng.next_double()),
                         Scalar::of(0.05 + rng.next_double())});
    }
    return Prior::discrete(std::move(atoms));
}

}  // namespace

TEST_CASE("two-coin predictive follows the power-sum formula") {
    const PredictiveResult r = predictive_after_run(two_coins(), 5);
    REQUIRE(r.exact.has_value());
    // (x1^6 + x2^6) / (x1^5 + x2^5) with equal weights.
    CHECK(*r.exact == Rational(531442, 590500));
    CHECK(r.method == Method::exact_rational);
    CHECK(r.value == doctest::Approx(0.8999864521591872).epsilon(1e-15));
    CHECK(render_decimal(r, 7) == "0.8999865");

    // The enumeration oracle computes the same fraction.
    CHECK(bruteforce_conditional(two_coins(), 5) == *r.exact);
}

TEST_CASE("point masses are memoryless") {
    const Prior pm = parse_prior("point:0.5");
    for (const std::uint64_t n : {std::uint64_t{0}, std::uint64_t{7}, std::uint64_t{10000}}) {
        const PredictiveResult r = predictive_after_run(pm, n);
        CHECK(*r.exact == Rational(1, 2));
        CHECK(r.value == 0.5);
    }
    const Prior pf = Prior::point_mass(Scalar::of(0.3));  // float path
    CHECK(predictive_after_run(pf, 12).value == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(predictive_after_run(pf, 12).method == Method::closed_form);
}

TEST_CASE("sure-coin mixtures give probability one") {
    CHECK(*predictive_after_run(parse_prior("discrete:1@0.5,0@0.5"), 5).exact == Rational(1));
}

TEST_CASE("uniform prior reproduces the rule of succession") {
    CHECK(*predictive_after_run(Prior::uniform(), 1).exact == Rational(2, 3));
    CHECK(predictive_uniform(0) == Rational(1, 2));
    CHECK(predictive_uniform(1) == Rational(2, 3));
    CHECK(predictive_uniform(1826213) == Rational(1826214, 1826215));
    for (const std::uint64_t n : {std::uint64_t{0}, std::uint64_t{10}, std::uint64_t{12345}}) {
        CHECK(*predictive_after_run(Prior::uniform(), n).exact == predictive_uniform(n));
    }
}

TEST_CASE("sunrise renders the paper's eight decimals") {
    const PredictiveResult r = sunrise(1826213);
    CHECK(*r.exact == Rational(1826214, 1826215));
    CHECK(render_decimal(r) == "0.99999945");
    CHECK(render_decimal(sunrise(0)) == "0.50000000");
    CHECK(*sunrise(999).exact == Rational(1000, 1001));
    CHECK(render_decimal(sunrise(999)) == "0.99900100");
}

TEST_CASE("impossible evidence is an error, not 0/0") {
    CHECK_THROWS_AS((void)predictive_after_run(parse_prior("point:0"), 1),
                    ImpossibleEvidenceError);
    CHECK_THROWS_AS((void)predictive_after_run(Prior::point_mass(Scalar::of(0.0)), 3),
                    ImpossibleEvidenceError);
    CHECK_THROWS_AS(
        (void)predictive_with_failures(parse_prior("point:1"), RunEvidence{2, 1}),
        ImpossibleEvidenceError);
    // n = 0 conditions on nothing and stays fine.
    CHECK(*predictive_after_run(parse_prior("point:0"), 0).exact == Rational(0));
}

TEST_CASE("predictive_with_failures closed forms") {
    // Uniform with s=3, f=1 is the Beta posterior mean (1+3)/(2+4).
    const PredictiveResult r = predictive_with_failures(Prior::uniform(), {3, 1});
    CHECK(*r.exact == Rational(2, 3));

    CHECK(*predictive_with_failures(Prior::uniform(), {0, 0}).exact == Rational(1, 2));

    const PredictiveResult pm = predictive_with_failures(parse_prior("point:0.4"), {5, 3});
    CHECK(*pm.exact == Rational(2, 5));

    // Beta(a,b) gives (a+s)/(a+b+s+f); float route.
    const PredictiveResult b =
        predictive_with_failures(Prior::beta(Scalar::of(2.0), Scalar::of(3.0)), {4, 2});
    CHECK(b.value == doctest::Approx(6.0 / 11.0).epsilon(1e-14));
    CHECK(b.method == Method::closed_form);

    // Reduces exactly to the pure-run predictive when failures = 0.
    PhiloxRng rng(5, 0);
    for (int i = 0; i < 20; ++i) {
        const Prior p = random_float_mixture(rng);
        const std::uint64_t n = rng.next_u64() % 40;
        CHECK(predictive_with_failures(p, {n, 0}).value == predictive_after_run(p, n).value);
    }
}

TEST_CASE("asymptotic ratio of the uniform prior is exactly one") {
    for (const std::uint64_t n : {std::uint64_t{0}, std::uint64_t{17}, std::uint64_t{40000}}) {
        CHECK(asymptotic_ratio(Prior::uniform(), n) == 1.0);
    }
}

TEST_CASE("asymptotic ratio for the ramp density matches the closed form") {
    // Beta(2,1) predictive is (n+2)/(n+3); ratio is (n+2)^2/((n+1)(n+3)).
    const Prior ramp = parse_prior("beta:2,1");
    CHECK(asymptotic_ratio(ramp, 10) == doctest::Approx(144.0 / 143.0).epsilon(1e-15));
    CHECK(asymptotic_ratio(ramp, 1000) ==
          doctest::Approx(1002.0 * 1002.0 / (1001.0 * 1003.0)).epsilon(1e-15));
    CHECK(std::abs(asymptotic_ratio(ramp, 1000) - 1.0000010) < 5e-8);

    CHECK_THROWS_AS((void)asymptotic_ratio(parse_prior("point:0.5"), 3), DomainError);
    CHECK_THROWS_AS((void)asymptotic_ratio(two_coins(), 3), DomainError);
}

TEST_CASE("Beta(a,1) ratio approaches one from above") {
    for (const long a : {1L, 2L, 5L}) {
        const Prior prior = Prior::beta(Scalar::of(a, 1), Scalar::of(1, 1));
        double prev = asymptotic_ratio(prior, 10);
        for (const std::uint64_t n : {std::uint64_t{100}, std::uint64_t{1000},
                                      std::uint64_t{10000}}) {
            const double r = asymptotic_ratio(prior, n);
            CHECK(r <= prev + 1e-15);
            CHECK(r >= 1.0 - 1e-15);
            prev = r;
        }
        CHECK(std::abs(asymptotic_ratio(prior, 10000) - 1.0) < 1e-3);
    }
}

TEST_CASE("predictive_table spec rows") {
    const PredictiveTable uni = predictive_table(Prior::uniform(), 3);
    REQUIRE(uni.rows.size() == 4);
    CHECK(*uni.rows[0].result.exact == Rational(1, 2));
    CHECK(*uni.rows[1].result.exact == Rational(2, 3));
    CHECK(*uni.rows[2].result.exact == Rational(3, 4));
    CHECK(*uni.rows[3].result.exact == Rational(4, 5));
    CHECK(!uni.truncated);

    const PredictiveTable pm = predictive_table(parse_prior("point:0.7"), 3);
    REQUIRE(pm.rows.size() == 4);
    for (const auto& row : pm.rows) CHECK(*row.result.exact == Rational(7, 10));

    // Ratio of exact power sums; the brute-force oracle agrees per row.
    const PredictiveTable coins = predictive_table(two_coins(), 2);
    REQUIRE(coins.rows.size() == 3);
    CHECK(*coins.rows[0].result.exact == Rational(1, 2));
    CHECK(*coins.rows[1].result.exact == Rational(41, 50));
    CHECK(coins.rows[1].result.value == doctest::Approx(0.82).epsilon(1e-15));
    CHECK(*coins.rows[2].result.exact == Rational(365, 410));
    CHECK(coins.rows[2].result.value == doctest::Approx(0.8902439024390244).epsilon(1e-14));
    for (const auto& row : coins.rows) {
        CHECK(bruteforce_conditional(two_coins(), row.n) == *row.result.exact);
    }
}

TEST_CASE("predictive_table truncates at zero-mass evidence") {
    const PredictiveTable t = predictive_table(parse_prior("point:0"), 5);
    REQUIRE(t.rows.size() == 1);
    CHECK(*t.rows[0].result.exact == Rational(0));
    CHECK(t.truncated);
    CHECK(t.truncated_at == 1);

    const PredictiveTable tf = predictive_table(Prior::point_mass(Scalar::of(0.0)), 5);
    REQUIRE(tf.rows.size() == 1);
    CHECK(tf.rows[0].result.value == 0.0);
    CHECK(tf.truncated);
}

TEST_CASE("predictive_table matches one-shot calls on float paths") {
    PhiloxRng rng(21, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const Prior p = random_float_mixture(rng);
        const PredictiveTable t = predictive_table(p, 30);
        REQUIRE(t.rows.size() == 31);
        for (const std::uint64_t n : {std::uint64_t{0}, std::uint64_t{7}, std::uint64_t{30}}) {
            const double direct = predictive_after_run(p, n).value;
            CHECK(t.rows[static_cast<std::size_t>(n)].result.value ==
                  doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotone learning, range, and rescaling invariance") {
    PhiloxRng rng(17, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const Prior p = random_float_mixture(rng);
        const auto* mix = p.get_if<DiscreteMixture>();
        double lo = 1.0, hi = 0.0;
        for (const auto& a : mix->atoms) {
            lo = std::min(lo, a.x.value);
            hi = std::max(hi, a.x.value);
        }
        const PredictiveTable t = predictive_table(p, 25);
        double prev = 0.0, prev_err = 0.0;
        for (const auto& row : t.rows) {
            CHECK(row.result.value >= prev - prev_err - row.result.error_bound);
            CHECK(row.result.value >= lo - 1e-12);
            CHECK(row.result.value <= hi + 1e-12);
            prev = row.result.value;
            prev_err = row.result.error_bound;
        }
    }

    // Rescaling all weights leaves the exact predictive untouched.
    const Prior base = parse_prior("discrete:1/4@1/8,2/3@3/8,9/10@1/2");
    const Prior scaled = parse_prior("discrete:1/4@7/8,2/3@21/8,9/10@7/2");
    for (std::uint64_t n = 0; n <= 12; ++n) {
        CHECK(*predictive_after_run(base, n).exact ==
              *predictive_after_run(scaled, n).exact);
    }
}

TEST_CASE("mixtures concentrated on one atom equal the point mass") {
    const Prior mix = parse_prior("discrete:2/5@1/3,2/5@2/3");
    const Prior pm = parse_prior("point:2/5");
    for (std::uint64_t n = 0; n <= 10; ++n) {
        CHECK(*predictive_after_run(mix, n).exact == *predictive_after_run(pm, n).exact);
    }
    CHECK(mixed_moment_exact(mix, 3, 2) == mixed_moment_exact(pm, 3, 2));
}

TEST_CASE("strictly monotone learning for two distinct support points") {
    const PredictiveTable t = predictive_table(two_coins(), 10);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        CHECK(*t.rows[i].result.exact > *t.rows[i - 1].result.exact);
    }
}

TEST_CASE("exact and float paths agree within the reported bound") {
    PhiloxRng rng(23, 0);
    for (int trial = 0; trial < 25; ++trial) {
        // Build a rational mixture and its float twin.
        std::vector<MixtureAtom> exact_atoms, float_atoms;
        const int k = 1 + static_cast<int>(rng.next_u64() % 5);
        for (int j = 0; j < k; ++j) {
            const long den = 2 + static_cast<long>(rng.next_u64() % 30);
            const long num = 1 + static_cast<long>(rng.next_u64() % (den - 1));
            const long w = 1 + static_cast<long>(rng.next_u64() % 9);
            exact_atoms.push_back({Scalar::of(num, den), Scalar::of(w, 1)});
            float_atoms.push_back({Scalar::of(static_cast<double>(num) / den),
                                   Scalar::of(static_cast<double>(w))});
        }
        const Prior exact_prior = Prior::discrete(exact_atoms);
        const Prior float_prior = Prior::discrete(float_atoms);
        for (const std::uint64_t n :
             {std::uint64_t{0}, std::uint64_t{3}, std::uint64_t{50}, std::uint64_t{200}}) {
            const PredictiveResult e = predictive_after_run(exact_prior, n);
            const PredictiveResult f = predictive_after_run(float_prior, n);
            CHECK(f.method == Method::log_domain);
            // Allow for the float twin's own representation error on top of
            // the log-domain bound.
            CHECK(std::abs(f.value - e.exact->to_double()) <=
                  f.error_bound + 256 * n * 1e-16 + 1e-12);
        }
    }
}

TEST_CASE("quadrature predictive carries a honest propagated bound") {
    const Prior ramp = Prior::tabulated({{Scalar::of(0.0), Scalar::of(0.0)},
                                         {Scalar::of(1.0), Scalar::of(2.0)}});
    for (const std::uint64_t n : {std::uint64_t{1}, std::uint64_t{10}, std::uint64_t{500}}) {
        const PredictiveResult r = predictive_after_run(ramp, n);
        CHECK(r.method == Method::quadrature);
        const double truth =
            (static_cast<double>(n) + 2.0) / (static_cast<double>(n) + 3.0);
        CHECK(std::abs(r.value - truth) <= r.error_bound + 1e-12);
    }
}

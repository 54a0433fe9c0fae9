#include "succession/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "succession/errors.hpp"
#include "succession/rng.hpp"

namespace succession {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 16;

// ---------------------------------------------------------------------------
// Latent-parameter sampling
// ---------------------------------------------------------------------------

double sample_normal(PhiloxRng& rng) {
    double u1 = rng.next_double();
    while (u1 == 0.0) u1 = rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Marsaglia-Tsang; shapes below 1 are boosted through Gamma(shape + 1).
double sample_gamma(PhiloxRng& rng, double shape) {
    if (shape < 1.0) {
        double u = rng.next_double();
        while (u == 0.0) u = rng.next_double();
        return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = sample_normal(rng);
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.next_double();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
}

/// Draws the latent success parameter from a prior: inverse CDF for discrete
/// and piecewise-linear priors, gamma-ratio sampling for Beta.
class LatentSampler {
  public:
    explicit LatentSampler(const Prior& prior) : prior_(&prior) {
        if (const auto* mix = prior.get_if<DiscreteMixture>()) {
            double cum = 0.0;
            for (const auto& atom : mix->atoms) {
                cum += atom.weight.value;
                cumulative_.push_back(cum);
                values_.push_back(atom.x.value);
            }
            cumulative_.back() = 1.0;
        } else if (const auto* tab = prior.get_if<Tabulated>()) {
            double cum = 0.0;
            for (std::size_t i = 1; i < tab->nodes.size(); ++i) {
                const double x0 = tab->nodes[i - 1].x.value, x1 = tab->nodes[i].x.value;
                const double f0 = tab->nodes[i - 1].density.value;
                const double f1 = tab->nodes[i].density.value;
                segments_.push_back({x0, x1, f0, (f1 - f0) / (x1 - x0), cum});
                cum += 0.5 * (x1 - x0) * (f0 + f1);
            }
            total_mass_ = cum;
        }
    }

    double draw(PhiloxRng& rng) const {
        if (const auto* pm = prior_->get_if<PointMass>()) return pm->x.value;
        if (const auto* beta = prior_->get_if<BetaParams>()) {
            const double ga = sample_gamma(rng, beta->a.value);
            const double gb = sample_gamma(rng, beta->b.value);
            const double sum = ga + gb;
            return sum > 0.0 ? ga / sum : 0.5;
        }
        if (!cumulative_.empty()) {
            const double u = rng.next_double();
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const std::size_t idx =
                std::min(static_cast<std::size_t>(it - cumulative_.begin()),
                         values_.size() - 1);
            return values_[idx];
        }
        return draw_tabulated(rng.next_double());
    }

  private:
    struct Segment {
        double x0, x1, f0, slope, cum_before;
    };

    double draw_tabulated(double u) const {
        const double target = u * total_mass_;
        std::size_t lo = 0, hi = segments_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (segments_[mid].cum_before <= target ? lo : hi) = mid;
        }
        const Segment& s = segments_[lo];
        const double r = std::max(target - s.cum_before, 0.0);
        // Solve f0 h + slope h^2 / 2 = r for h, with the stable root form.
        const double disc = std::max(s.f0 * s.f0 + 2.0 * s.slope * r, 0.0);
        const double denom = s.f0 + std::sqrt(disc);
        const double h = denom > 0.0 ? 2.0 * r / denom : 0.0;
        return std::clamp(s.x0 + h, s.x0, s.x1);
    }

    const Prior* prior_;
    std::vector<double> cumulative_;
    std::vector<double> values_;
    std::vector<Segment> segments_;
    double total_mass_ = 1.0;
};

// ---------------------------------------------------------------------------
// Deterministic block-parallel trial runner
// ---------------------------------------------------------------------------

// Partials are produced per fixed block of trial indices and merged in block
// order, so the result does not depend on thread count or scheduling.
template <typename Partial, typename Body>
std::vector<Partial> run_blocks(std::uint64_t trials, unsigned threads, const Body& body) {
    const std::uint64_t blocks = trials == 0 ? 0 : (trials - 1) / kBlockSize + 1;
    std::vector<Partial> partials(static_cast<std::size_t>(blocks));

    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    workers = std::clamp(workers, 1u, 64u);
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, std::max<std::uint64_t>(blocks, 1)));

    if (workers <= 1 || blocks <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) {
            const std::uint64_t begin = b * kBlockSize;
            const std::uint64_t end = std::min(trials, begin + kBlockSize);
            body(begin, end, partials[static_cast<std::size_t>(b)]);
        }
        return partials;
    }

    std::atomic<std::uint64_t> next_block{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t b = next_block.fetch_add(1);
                if (b >= blocks) return;
                const std::uint64_t begin = b * kBlockSize;
                const std::uint64_t end = std::min(trials, begin + kBlockSize);
                body(begin, end, partials[static_cast<std::size_t>(b)]);
            }
        });
    }
    for (auto& t : pool) t.join();
    return partials;
}

/// Running max-shifted log-sum-exp, mergeable in fixed order.
struct LogSum {
    double max = kNegInf;
    double sum = 0.0;

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

    void merge(const LogSum& o) {
        if (o.sum == 0.0) return;
        if (sum == 0.0) {
            *this = o;
        } else if (o.max <= max) {
            sum += o.sum * std::exp(o.max - max);
        } else {
            sum = sum * std::exp(max - o.max) + o.sum;
            max = o.max;
        }
    }

    double log() const { return sum == 0.0 ? kNegInf : max + std::log(sum); }
};

void validate(const SimulationConfig& config) {
    if (config.trials < 1) throw DomainError("simulation needs at least one trial");
}

}  // namespace

std::string_view estimator_name(Estimator estimator) {
    return estimator == Estimator::rejection ? "rejection" : "weighted";
}

// ---------------------------------------------------------------------------
// Brute-force enumeration oracle
// ---------------------------------------------------------------------------

namespace {

struct EnumerationMass {
    Rational prefix;  // mass of sequences whose first n entries are success
    Rational full;    // mass of sequences that are all success
};

// Walks the full binary outcome tree of depth n+1; one rational multiply
// per edge. No pruning: every one of the 2^{n+1} sequences is visited.
// prefix_ok tracks whether the first min(depth, n) flips were all success.
void enumerate(const Rational& x, std::uint64_t n, std::uint64_t depth, bool prefix_ok,
               std::vector<Rational>& product, EnumerationMass& mass) {
    const Rational& p = product[depth];
    const bool last = depth + 1 == n + 1;

    product[depth + 1] = p * x;
    if (last) {
        if (prefix_ok) {
            mass.prefix += product[depth + 1];
            mass.full += product[depth + 1];
        }
    } else {
        enumerate(x, n, depth + 1, prefix_ok, product, mass);
    }

    product[depth + 1] = p * (Rational(1) - x);
    if (last) {
        // A failure on the final flip leaves the length-n prefix intact.
        if (prefix_ok) mass.prefix += product[depth + 1];
    } else {
        enumerate(x, n, depth + 1, false, product, mass);
    }
}

}  // namespace

Rational bruteforce_conditional(const Prior& prior, std::uint64_t n) {
    if (n > kBruteforceMaxRun) {
        throw LimitExceededError("brute-force enumeration capped at n = 20");
    }
    if (!prior.is_exact()) {
        throw NotExactlyRepresentableError("brute-force oracle needs rational atoms");
    }

    std::vector<MixtureAtom> atoms;
    if (const auto* pm = prior.get_if<PointMass>()) {
        atoms.push_back({pm->x, Scalar::of(1, 1)});
    } else if (const auto* mix = prior.get_if<DiscreteMixture>()) {
        atoms = mix->atoms;
    } else {
        throw DomainError("brute-force oracle enumerates discrete mixtures only");
    }

    EnumerationMass mass;
    std::vector<Rational> product(static_cast<std::size_t>(n) + 2);
    for (const auto& atom : atoms) {
        product[0] = *atom.weight.exact;
        enumerate(*atom.x.exact, n, 0, true, product, mass);
    }
    if (mass.prefix.is_zero()) {
        throw ImpossibleEvidenceError("conditioning run has zero probability");
    }
    return mass.full / mass.prefix;
}

// ---------------------------------------------------------------------------
// Monte-Carlo estimators
// ---------------------------------------------------------------------------

Estimate simulate_conditional(const SimulationConfig& config) {
    validate(config);
    const LatentSampler sampler(config.prior);
    const std::uint64_t n = config.run_length;

    struct Partial {
        std::uint64_t kept = 0;
        std::uint64_t final_success = 0;
    };
    const auto partials = run_blocks<Partial>(
        config.trials, config.threads, [&](std::uint64_t begin, std::uint64_t end, Partial& p) {
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                PhiloxRng rng(config.seed, trial);
                const double x = sampler.draw(rng);
                bool prefix_ok = true;
                for (std::uint64_t i = 0; i < n; ++i) {
                    if (!(rng.next_double() < x)) {
                        prefix_ok = false;
                        break;
                    }
                }
                if (!prefix_ok) continue;
                ++p.kept;
                if (rng.next_double() < x) ++p.final_success;
            }
        });

    std::uint64_t kept = 0, success = 0;
    for (const auto& p : partials) {
        kept += p.kept;
        success += p.final_success;
    }
    if (kept == 0) {
        throw NoConditionedTrialsError("no trials survived the conditioning run");
    }

    Estimate e;
    e.p_hat = static_cast<double>(success) / static_cast<double>(kept);
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(kept));
    e.conditioned_trials = kept;
    e.total_trials = config.trials;
    e.estimator = Estimator::rejection;
    return e;
}

Estimate simulate_weighted(const SimulationConfig& config) {
    validate(config);
    const std::uint64_t n = config.run_length;

    // Constant weights degenerate to the point value itself.
    if (const auto* pm = config.prior.get_if<PointMass>()) {
        const double x = pm->x.value;
        if (x == 0.0 && n >= 1) {
            throw ImpossibleEvidenceError("all importance weights are zero");
        }
        return {x, 0.0, config.trials, config.trials, Estimator::weighted};
    }

    const LatentSampler sampler(config.prior);
    const double dn = static_cast<double>(n);

    struct Partial {
        LogSum w;        // sum of x^n
        LogSum wx;       // sum of x^{n+1}
        LogSum w2;       // sum of x^{2n}
        LogSum w2x;      // sum of x^{2n+1}
        LogSum w2xx;     // sum of x^{2n+2}
        std::uint64_t positive = 0;
    };
    const auto partials = run_blocks<Partial>(
        config.trials, config.threads, [&](std::uint64_t begin, std::uint64_t end, Partial& p) {
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                PhiloxRng rng(config.seed, trial);
                const double x = sampler.draw(rng);
                if (x <= 0.0 && n >= 1) continue;
                const double lx = x > 0.0 ? std::log(x) : 0.0;  // x == 0 only when n == 0
                const double lw = n == 0 ? 0.0 : dn * lx;
                ++p.positive;
                p.w.add(lw);
                p.w2.add(2.0 * lw);
                if (x > 0.0) {
                    p.wx.add(lw + lx);
                    p.w2x.add(2.0 * lw + lx);
                    p.w2xx.add(2.0 * lw + 2.0 * lx);
                }
            }
        });

    Partial total;
    for (const auto& p : partials) {
        total.w.merge(p.w);
        total.wx.merge(p.wx);
        total.w2.merge(p.w2);
        total.w2x.merge(p.w2x);
        total.w2xx.merge(p.w2xx);
        total.positive += p.positive;
    }
    if (total.positive == 0) {
        throw ImpossibleEvidenceError("all importance weights are zero");
    }

    const double log_w = total.w.log();
    const double p_hat = std::clamp(std::exp(total.wx.log() - log_w), 0.0, 1.0);

    // Delta-method variance of the self-normalized ratio:
    //   V = sum w_i^2 (x_i - p)^2 / (sum w_i)^2, expanded into the three
    //   accumulated second-order sums and evaluated under a common shift.
    const double l2xx = total.w2xx.log(), l2x = total.w2x.log(), l2 = total.w2.log();
    const double shift = std::max({l2xx, l2x, l2});
    double variance = 0.0;
    if (shift != kNegInf) {
        const double a = (l2xx == kNegInf ? 0.0 : std::exp(l2xx - shift)) -
                         2.0 * p_hat * (l2x == kNegInf ? 0.0 : std::exp(l2x - shift)) +
                         p_hat * p_hat * (l2 == kNegInf ? 0.0 : std::exp(l2 - shift));
        variance = std::max(a, 0.0) * std::exp(shift - 2.0 * log_w);
    }

    Estimate e;
    e.p_hat = p_hat;
    e.std_error = std::sqrt(variance);
    e.conditioned_trials = total.positive;
    e.total_trials = config.trials;
    e.estimator = Estimator::weighted;
    return e;
}

// ---------------------------------------------------------------------------
// Turkey scenario
// ---------------------------------------------------------------------------

ScenarioReport turkey_scenario(std::uint64_t feed_days, const Prior& prior) {
    if (feed_days < 1) throw DomainError("scenario needs at least one day");

    ScenarioReport report;
    const PredictiveTable table = predictive_table(prior, feed_days - 1);
    if (table.truncated) {
        throw ImpossibleEvidenceError("prior cannot produce the feeding run");
    }

    report.days.reserve(static_cast<std::size_t>(feed_days));
    double log_loss = 0.0;
    for (std::uint64_t day = 1; day < feed_days; ++day) {
        const PredictiveResult& p = table.rows[static_cast<std::size_t>(day - 1)].result;
        report.days.push_back({day, p.value, true});
        log_loss -= std::log(p.value);
    }

    const PredictiveResult& eve = table.rows.back().result;
    report.eve_of_doom = eve;
    report.days.push_back({feed_days, eve.value, false});

    if (eve.exact) {
        const Rational failure = Rational(1) - *eve.exact;
        if (failure.is_zero()) {
            throw ImpossibleEvidenceError(
                "the prior is certain of success; the failure day has probability zero");
        }
        log_loss -= std::log(failure.to_double());
    } else {
        if (eve.value >= 1.0) {
            throw ImpossibleEvidenceError(
                "the prior is certain of success; the failure day has probability zero");
        }
        log_loss -= std::log1p(-eve.value);
    }
    report.log_loss = log_loss;
    return report;
}

}  // namespace succession

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "succession/predictive.hpp"
#include "succession/prior.hpp"
#include "succession/rational.hpp"

namespace succession {

/// Hard cap on the brute-force run length: 2^{n+1} sequences per coin.
inline constexpr std::uint64_t kBruteforceMaxRun = 20;

struct SimulationConfig {
    Prior prior;
    std::uint64_t run_length = 0;  // n observed successes to condition on
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    /// Worker threads; 0 picks a hardware default. Results are bit-identical
    /// for every value: trials use counter-derived substreams and partial
    /// sums are reduced in fixed block order.
    unsigned threads = 0;
};

enum class Estimator { rejection, weighted };
std::string_view estimator_name(Estimator estimator);

struct Estimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t conditioned_trials = 0;
    std::uint64_t total_trials = 0;
    Estimator estimator = Estimator::rejection;
};

/// Exact conditional probability by literal enumeration: for every coin and
/// every length-(n+1) outcome sequence, accumulate the total-probability
/// mass of the all-success prefix and of the full all-success run, then
/// divide. Requires a rational discrete mixture (or point mass) and
/// n <= kBruteforceMaxRun. Must equal moment_exact(n+1)/moment_exact(n).
Rational bruteforce_conditional(const Prior& prior, std::uint64_t n);

/// Rejection estimator: draw the latent x from the prior, flip n+1 coins,
/// keep trials whose first n flips all succeed; p_hat is the success
/// fraction of the final flip among kept trials.
/// Throws NoConditionedTrialsError when nothing survives conditioning.
Estimate simulate_conditional(const SimulationConfig& config);

/// Self-normalized importance estimator: weight each latent draw x by x^n
/// (log domain) and average the next-success probability x. Usable where
/// rejection starves, e.g. n in the millions.
Estimate simulate_weighted(const SimulationConfig& config);

/// Regime-switch scenario: feed_days - 1 successes, then one failure.
struct ScenarioDay {
    std::uint64_t day = 0;          // 1-based
    double predicted_success = 0.0; // model's predictive before the outcome
    bool observed_success = true;
};

struct ScenarioReport {
    std::vector<ScenarioDay> days;
    PredictiveResult eve_of_doom;  // predictive after feed_days - 1 successes
    double log_loss = 0.0;         // cumulative negative log likelihood
};

/// Throws ImpossibleEvidenceError if the prior cannot produce the stream
/// (for instance a point mass at 1 facing the final failure).
ScenarioReport turkey_scenario(std::uint64_t feed_days, const Prior& prior);

}  // namespace succession

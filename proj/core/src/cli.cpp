#include "succession/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string_view>

#include <CLI11.hpp>
#include <json.hpp>

#include "succession/errors.hpp"
#include "succession/moments.hpp"
#include "succession/montecarlo.hpp"
#include "succession/predictive.hpp"
#include "succession/prior.hpp"

namespace succession {

namespace {

using json = nlohmann::ordered_json;

enum class Format { text, json, csv };

struct OutputOptions {
    Format format = Format::text;
    int digits = 8;
};

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_field(fields[i]);
    }
    out << '\n';
}

std::string exact_string(const std::optional<Rational>& exact) {
    return exact ? exact->to_fraction_string() : std::string();
}

json exact_json(const std::optional<Rational>& exact) {
    if (exact) return exact->to_fraction_string();
    return nullptr;
}

// Scalar predictive-style payload shared by predict, sunrise, ratio, bruteforce.
struct ScalarRecord {
    std::string command;
    std::string prior;
    std::uint64_t n = 0;
    double value = 0.0;
    std::string rendered;
    std::optional<Rational> exact;
    std::string method;
    double error_bound = 0.0;
    std::vector<std::pair<std::string, json>> extras;
};

void emit_scalar(const ScalarRecord& rec, const OutputOptions& opts, std::ostream& out) {
    switch (opts.format) {
        case Format::text:
            out << rec.rendered << '\n';
            if (rec.exact) out << "exact: " << rec.exact->to_fraction_string() << '\n';
            out << "method: " << rec.method << '\n';
            if (rec.error_bound > 0.0) {
                out << "error_bound: " << format_double(rec.error_bound) << '\n';
            }
            break;
        case Format::json: {
            json doc;
            doc["command"] = rec.command;
            doc["prior"] = rec.prior;
            doc["n"] = rec.n;
            doc["value"] = rec.value;
            doc["rendered"] = rec.rendered;
            doc["exact"] = exact_json(rec.exact);
            doc["method"] = rec.method;
            doc["error_bound"] = rec.error_bound;
            for (const auto& [key, value] : rec.extras) doc[key] = value;
            out << doc.dump() << '\n';
            break;
        }
        case Format::csv:
            write_csv_row(out, {"command", "prior", "n", "value", "exact", "method",
                                "error_bound"});
            write_csv_row(out, {rec.command, rec.prior, std::to_string(rec.n), rec.rendered,
                                exact_string(rec.exact), rec.method,
                                format_double(rec.error_bound)});
            break;
    }
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ImpossibleEvidenceError*>(&e)) return 3;
    if (dynamic_cast<const ToleranceNotMetError*>(&e)) return 4;
    if (dynamic_cast<const LimitExceededError*>(&e)) return 4;
    if (dynamic_cast<const NoConditionedTrialsError*>(&e)) return 5;
    return 2;  // parse, domain, zero mass, not exactly representable
}

struct CommandContext {
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

ScalarRecord scalar_record(std::string command, std::string prior, std::uint64_t n,
                           const PredictiveResult& r, int digits) {
    ScalarRecord rec;
    rec.command = std::move(command);
    rec.prior = std::move(prior);
    rec.n = n;
    rec.value = r.value;
    rec.rendered = render_decimal(r, digits);
    rec.exact = r.exact;
    rec.method = method_name(r.method);
    rec.error_bound = r.error_bound;
    return rec;
}

void cmd_predict(const std::string& prior_spec, std::uint64_t successes,
                 std::uint64_t failures, const OutputOptions& opts, CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    const PredictiveResult r = predictive_with_failures(prior, {successes, failures});
    ScalarRecord rec =
        scalar_record("predict", format_prior(prior), successes, r, opts.digits);
    rec.extras.emplace_back("failures", failures);
    emit_scalar(rec, opts, ctx.out);
}

void cmd_sunrise(std::uint64_t days, const OutputOptions& opts, CommandContext ctx) {
    emit_scalar(scalar_record("sunrise", "uniform", days, sunrise(days), opts.digits), opts,
                ctx.out);
}

void cmd_ratio(const std::string& prior_spec, std::uint64_t n, const OutputOptions& opts,
               CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    const PredictiveResult p = predictive_after_run(prior, n);
    const double scale = (static_cast<double>(n) + 2.0) / (static_cast<double>(n) + 1.0);

    ScalarRecord rec;
    rec.command = "ratio";
    rec.prior = format_prior(prior);
    rec.n = n;
    rec.method = method_name(p.method);
    rec.error_bound = p.error_bound * scale;
    if (p.exact) {
        rec.exact = *p.exact / predictive_uniform(n);
        rec.value = rec.exact->to_double();
        rec.rendered = rec.exact->to_decimal_string(opts.digits);
    } else {
        rec.value = p.value * scale;
        rec.rendered = render_decimal(rec.value, opts.digits);
    }
    emit_scalar(rec, opts, ctx.out);
}

void cmd_bruteforce(const std::string& prior_spec, std::uint64_t successes,
                    const OutputOptions& opts, CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    const Rational exact = bruteforce_conditional(prior, successes);
    ScalarRecord rec;
    rec.command = "bruteforce";
    rec.prior = format_prior(prior);
    rec.n = successes;
    rec.value = exact.to_double();
    rec.rendered = exact.to_decimal_string(opts.digits);
    rec.exact = exact;
    rec.method = "exact_rational";
    emit_scalar(rec, opts, ctx.out);
}

void cmd_table(const std::string& prior_spec, std::uint64_t n_max, const OutputOptions& opts,
               CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    const PredictiveTable table = predictive_table(prior, n_max);
    const std::string prior_text = format_prior(prior);

    switch (opts.format) {
        case Format::csv:
        case Format::text:
            write_csv_row(ctx.out, {"n", "value", "exact", "method", "error_bound"});
            for (const auto& row : table.rows) {
                write_csv_row(ctx.out,
                              {std::to_string(row.n), render_decimal(row.result, opts.digits),
                               exact_string(row.result.exact),
                               std::string(method_name(row.result.method)),
                               format_double(row.result.error_bound)});
            }
            break;
        case Format::json: {
            json doc;
            doc["command"] = "table";
            doc["prior"] = prior_text;
            doc["n"] = n_max;
            doc["value"] =
                table.rows.empty() ? json(nullptr) : json(table.rows.back().result.value);
            doc["exact"] = table.rows.empty() ? json(nullptr)
                                              : exact_json(table.rows.back().result.exact);
            doc["method"] = table.rows.empty()
                                ? json(nullptr)
                                : json(method_name(table.rows.back().result.method));
            doc["error_bound"] =
                table.rows.empty() ? json(nullptr) : json(table.rows.back().result.error_bound);
            json rows = json::array();
            for (const auto& row : table.rows) {
                json r;
                r["n"] = row.n;
                r["value"] = row.result.value;
                r["rendered"] = render_decimal(row.result, opts.digits);
                r["exact"] = exact_json(row.result.exact);
                r["method"] = method_name(row.result.method);
                r["error_bound"] = row.result.error_bound;
                rows.push_back(std::move(r));
            }
            doc["rows"] = std::move(rows);
            doc["truncated_at"] = table.truncated ? json(table.truncated_at) : json(nullptr);
            ctx.out << doc.dump() << '\n';
            break;
        }
    }
    if (table.truncated && opts.format != Format::json) {
        ctx.err << "warning: table truncated at n = " << table.truncated_at
                << " (evidence mass is zero from there on)\n";
    }
}

void cmd_simulate(const std::string& prior_spec, std::uint64_t successes, std::uint64_t trials,
                  std::uint64_t seed, const std::string& estimator_text, unsigned threads,
                  const OutputOptions& opts, CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    Estimator estimator;
    if (estimator_text == "rejection") {
        estimator = Estimator::rejection;
    } else if (estimator_text == "weighted") {
        estimator = Estimator::weighted;
    } else {
        throw ParseError("estimator must be 'rejection' or 'weighted'");
    }

    SimulationConfig config{prior, successes, trials, seed, threads};
    const Estimate e = estimator == Estimator::rejection ? simulate_conditional(config)
                                                         : simulate_weighted(config);
    const std::string prior_text = format_prior(prior);

    switch (opts.format) {
        case Format::text:
            ctx.out << render_decimal(e.p_hat, opts.digits) << '\n';
            ctx.out << "stderr: " << format_double(e.std_error) << '\n';
            ctx.out << "conditioned_trials: " << e.conditioned_trials << '/' << e.total_trials
                    << '\n';
            ctx.out << "estimator: " << estimator_name(e.estimator) << '\n';
            break;
        case Format::json: {
            json doc;
            doc["command"] = "simulate";
            doc["prior"] = prior_text;
            doc["n"] = successes;
            doc["value"] = e.p_hat;
            doc["rendered"] = render_decimal(e.p_hat, opts.digits);
            doc["exact"] = nullptr;
            doc["method"] = estimator_name(e.estimator);
            doc["error_bound"] = e.std_error;
            doc["trials"] = trials;
            doc["seed"] = seed;
            json est;
            est["p_hat"] = e.p_hat;
            est["stderr"] = e.std_error;
            est["conditioned_trials"] = e.conditioned_trials;
            est["total_trials"] = e.total_trials;
            est["estimator"] = estimator_name(e.estimator);
            doc["estimate"] = std::move(est);
            ctx.out << doc.dump() << '\n';
            break;
        }
        case Format::csv:
            write_csv_row(ctx.out, {"command", "prior", "n", "estimator", "trials", "seed",
                                    "p_hat", "stderr", "conditioned_trials", "total_trials"});
            write_csv_row(ctx.out,
                          {"simulate", prior_text, std::to_string(successes),
                           std::string(estimator_name(e.estimator)), std::to_string(trials),
                           std::to_string(seed), render_decimal(e.p_hat, opts.digits),
                           format_double(e.std_error), std::to_string(e.conditioned_trials),
                           std::to_string(e.total_trials)});
            break;
    }
}

void cmd_turkey(std::uint64_t feed_days, const std::string& prior_spec,
                const OutputOptions& opts, CommandContext ctx) {
    const Prior prior = parse_prior(prior_spec);
    const ScenarioReport report = turkey_scenario(feed_days, prior);
    const std::string prior_text = format_prior(prior);

    switch (opts.format) {
        case Format::text:
            ctx.out << "feed_days: " << feed_days << '\n';
            ctx.out << "eve_of_doom: " << render_decimal(report.eve_of_doom, opts.digits);
            if (report.eve_of_doom.exact) {
                ctx.out << " (exact " << report.eve_of_doom.exact->to_fraction_string() << ')';
            }
            ctx.out << '\n';
            ctx.out << "log_loss: " << format_double(report.log_loss) << '\n';
            break;
        case Format::json: {
            json doc;
            doc["command"] = "turkey";
            doc["prior"] = prior_text;
            doc["n"] = feed_days - 1;
            doc["value"] = report.eve_of_doom.value;
            doc["rendered"] = render_decimal(report.eve_of_doom, opts.digits);
            doc["exact"] = exact_json(report.eve_of_doom.exact);
            doc["method"] = method_name(report.eve_of_doom.method);
            doc["error_bound"] = report.eve_of_doom.error_bound;
            doc["feed_days"] = feed_days;
            doc["log_loss"] = report.log_loss;
            json days = json::array();
            for (const auto& day : report.days) {
                json d;
                d["day"] = day.day;
                d["predicted"] = day.predicted_success;
                d["outcome"] = day.observed_success ? "success" : "failure";
                days.push_back(std::move(d));
            }
            doc["days"] = std::move(days);
            ctx.out << doc.dump() << '\n';
            break;
        }
        case Format::csv:
            write_csv_row(ctx.out, {"day", "predicted", "outcome"});
            for (const auto& day : report.days) {
                write_csv_row(ctx.out, {std::to_string(day.day),
                                        render_decimal(day.predicted_success, opts.digits),
                                        day.observed_success ? "success" : "failure"});
            }
            break;
    }
}

void add_output_options(CLI::App* cmd, OutputOptions& opts, Format default_format) {
    opts.format = default_format;
    cmd->add_option("--format", opts.format, "Output format: text, json, or csv")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Format>{
                {"text", Format::text}, {"json", Format::json}, {"csv", Format::csv}},
            CLI::ignore_case));
    cmd->add_option("--digits", opts.digits, "Decimal digits in rendered values")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Posterior-predictive probabilities for success/failure runs"};
    app.require_subcommand(1);

    double tol = kDefaultTolerance;
    auto* tol_opt =
        app.add_option("--tol", tol,
                       "Absolute tolerance for quadrature paths (env SUCCESSION_TOL)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();

    CommandContext ctx{out, err};

    // predict
    std::string predict_prior;
    std::uint64_t predict_successes = 0, predict_failures = 0;
    OutputOptions predict_opts;
    auto* predict = app.add_subcommand("predict", "Predictive probability after a run");
    predict->add_option("--prior", predict_prior, "Prior spec")->required();
    predict->add_option("--successes", predict_successes, "Observed successes")->required();
    predict->add_option("--failures", predict_failures, "Observed failures")
        ->capture_default_str();
    add_output_options(predict, predict_opts, Format::text);

    // sunrise
    std::uint64_t sunrise_days = 1826213;
    OutputOptions sunrise_opts;
    auto* sunrise_cmd = app.add_subcommand("sunrise", "The sunrise probability");
    sunrise_cmd->add_option("--days", sunrise_days, "Days the sun has risen so far")
        ->capture_default_str();
    add_output_options(sunrise_cmd, sunrise_opts, Format::text);

    // table
    std::string table_prior;
    std::uint64_t table_n_max = 10;
    OutputOptions table_opts;
    auto* table = app.add_subcommand("table", "Predictive values for n = 0..n-max");
    table->add_option("--prior", table_prior, "Prior spec")->required();
    table->add_option("--n-max", table_n_max, "Largest run length")->capture_default_str();
    add_output_options(table, table_opts, Format::csv);

    // ratio
    std::string ratio_prior;
    std::uint64_t ratio_n = 0;
    OutputOptions ratio_opts;
    auto* ratio = app.add_subcommand(
        "ratio", "Predictive divided by the uniform-prior reference (n+1)/(n+2)");
    ratio->add_option("--prior", ratio_prior, "Prior spec (beta or table)")->required();
    ratio->add_option("--n", ratio_n, "Run length")->required();
    add_output_options(ratio, ratio_opts, Format::text);

    // simulate
    std::string sim_prior, sim_estimator = "rejection";
    std::uint64_t sim_successes = 0, sim_trials = 100000, sim_seed = 0;
    unsigned sim_threads = 0;
    OutputOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo conditional estimate");
    simulate->add_option("--prior", sim_prior, "Prior spec")->required();
    simulate->add_option("--successes", sim_successes, "Run length to condition on")
        ->required();
    simulate->add_option("--trials", sim_trials, "Trial count")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--estimator", sim_estimator, "rejection or weighted")
        ->capture_default_str();
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = auto)")
        ->capture_default_str();
    add_output_options(simulate, sim_opts, Format::text);

    // bruteforce
    std::string brute_prior;
    std::uint64_t brute_successes = 0;
    OutputOptions brute_opts;
    auto* brute = app.add_subcommand(
        "bruteforce", "Exact conditional probability by outcome enumeration");
    brute->add_option("--prior", brute_prior, "Discrete prior spec with rational atoms")
        ->required();
    brute->add_option("--successes", brute_successes, "Run length (at most 20)")->required();
    add_output_options(brute, brute_opts, Format::text);

    // turkey
    std::string turkey_prior = "uniform";
    std::uint64_t turkey_days = 1000;
    OutputOptions turkey_opts;
    auto* turkey = app.add_subcommand("turkey", "Regime-switch feeding scenario");
    turkey->add_option("--feed-days", turkey_days, "Days until the regime switches")
        ->capture_default_str();
    turkey->add_option("--prior", turkey_prior, "Prior spec")->capture_default_str();
    add_output_options(turkey, turkey_opts, Format::text);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (tol_opt->count() == 0) {
            if (const char* env = std::getenv("SUCCESSION_TOL")) {
                char* end = nullptr;
                const double parsed = std::strtod(env, &end);
                if (end == env || *end != '\0' || !(parsed > 0.0) || !std::isfinite(parsed)) {
                    throw ParseError("SUCCESSION_TOL must be a positive number, got '" +
                                     std::string(env) + "'");
                }
                tol = parsed;
            }
        }
        set_default_tolerance(tol);
        if (predict->parsed()) {
            cmd_predict(predict_prior, predict_successes, predict_failures, predict_opts, ctx);
        } else if (sunrise_cmd->parsed()) {
            cmd_sunrise(sunrise_days, sunrise_opts, ctx);
        } else if (table->parsed()) {
            cmd_table(table_prior, table_n_max, table_opts, ctx);
        } else if (ratio->parsed()) {
            cmd_ratio(ratio_prior, ratio_n, ratio_opts, ctx);
        } else if (simulate->parsed()) {
            cmd_simulate(sim_prior, sim_successes, sim_trials, sim_seed, sim_estimator,
                         sim_threads, sim_opts, ctx);
        } else if (brute->parsed()) {
            cmd_bruteforce(brute_prior, brute_successes, brute_opts, ctx);
        } else if (turkey->parsed()) {
            cmd_turkey(turkey_days, turkey_prior, turkey_opts, ctx);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace succession

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbolab/archive.hpp"
#include "bbolab/backends.hpp"
#include "bbolab/parsing.hpp"
#include "bbolab/rng.hpp"

namespace bbolab {

/// Knobs of the optimization procedure: archive capacity n, solutions
/// requested per iteration m, the fixed iteration budget, and the cap on
/// failed attempts per required valid solution.
struct LoopConfig {
    int n = 16;
    int m = 4;
    int max_iterations = 100;
    int retry_cap = 100;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (n < 1) throw ConfigError("loop.n", "archive capacity must be >= 1");
        if (m < 1) throw ConfigError("loop.m", "solutions per iteration must be >= 1");
        if (retry_cap < 1) throw ConfigError("loop.retry_cap", "retry cap must be >= 1");
        if (max_iterations < 0) throw ConfigError("loop.max_iterations", "iterations must be >= 0");
    }
};

enum class RunStatus { Completed, Failed };
enum class RecordOutcome { Valid, ParseError, BackendError };

/// One backend query with everything needed to audit or replay it.
struct GenerationRecord {
    int iteration = 0;
    int attempt_index = 0; // attempts toward the current required solution
    std::string prompt_text;
    std::string raw_response;
    RecordOutcome outcome = RecordOutcome::Valid;
    double fitness = 0.0;                                       // Valid only
    ParseErrorKind parse_error = ParseErrorKind::NoTag;         // ParseError only
    BackendErrorKind backend_error = BackendErrorKind::Api;     // BackendError only
    double elapsed_ms = 0.0;
};

template <typename Solution>
struct RunOutcome {
    RunStatus status = RunStatus::Completed;
    Solution best_solution{};
    double best_fitness = 0.0;
    long total_retries = 0; // attempts that did not produce a valid solution
    int iterations_completed = 0;
    std::vector<GenerationRecord> records;
    std::vector<double> best_trace; // archive best after init and each iteration
};

/// Problem-specific pieces the loop is generic over. `build_prompt` renders
/// the full three-part prompt for the current archive; `parse` classifies a
/// raw response; `make_context` exposes problem statics to baseline
/// backends (the engine fills in the per-query fields).
template <typename Solution>
struct LoopDriver {
    std::function<double(const Solution&)> evaluate;
    std::function<Solution(Rng&)> sample_random;
    std::function<ParseOutcome<Solution>(const std::string&)> parse;
    std::function<std::string(const Archive<Solution>&)> build_prompt;
    std::function<GenerationContext()> make_context = [] { return GenerationContext{}; };
};

namespace detail {

inline void set_context_best(GenerationContext& ctx, const SolutionVector& best, double fitness) {
    ctx.best_solution = &best;
    ctx.best_fitness = fitness;
}

inline void set_context_best(GenerationContext& ctx, const Tour& best, double fitness) {
    ctx.best_tour = &best;
    ctx.best_fitness = fitness;
}

} // namespace detail

/// The optimization procedure. Steps: seed the archive with n random
/// solutions; each iteration, render one prompt from the archive and query
/// the backend repeatedly until m valid solutions are collected, each one
/// allowed at most retry_cap attempts; merge the batch into the archive.
/// Exhausting the retry budget ends the run as Failed with the best so far.
/// Every query is logged. Deterministic given (driver, backend, config).
template <typename Solution>
RunOutcome<Solution> run_loop(const LoopDriver<Solution>& driver, const Backend& backend,
                              const LoopConfig& config) {
    config.validate();
    Rng rng(config.rng_seed);
    RunOutcome<Solution> out;

    Archive<Solution> archive(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) {
        Solution s = driver.sample_random(rng);
        const double fitness = driver.evaluate(s);
        archive.insert(std::move(s), fitness);
    }
    out.best_trace.push_back(archive.best_fitness());

    auto session = backend.start_session(derive_seed(config.rng_seed, {0xbacce5d}));

    auto finalize = [&](RunStatus status) {
        out.status = status;
        out.best_solution = archive.best().solution;
        out.best_fitness = archive.best().fitness;
        return out;
    };

    for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
        const std::string prompt = driver.build_prompt(archive);
        std::vector<std::pair<Solution, double>> candidates;
        candidates.reserve(static_cast<std::size_t>(config.m));

        for (int needed = 0; needed < config.m; ++needed) {
            bool obtained = false;
            for (int attempt = 0; attempt < config.retry_cap; ++attempt) {
                GenerationContext ctx = driver.make_context();
                detail::set_context_best(ctx, archive.best().solution, archive.best().fitness);
                ctx.iteration = iteration;
                ctx.attempt = attempt;

                GenerationRecord record;
                record.iteration = iteration;
                record.attempt_index = attempt;
                record.prompt_text = prompt;

                const auto start = std::chrono::steady_clock::now();
                const GenerateResult result = session->generate(prompt, ctx);
                record.elapsed_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                        .count();

                if (!result.ok()) {
                    record.outcome = RecordOutcome::BackendError;
                    record.backend_error = *result.error;
                    record.raw_response = result.detail;
                    out.records.push_back(std::move(record));
                    ++out.total_retries;
                    continue;
                }
                record.raw_response = result.text;
                const ParseOutcome<Solution> parsed = driver.parse(result.text);
                if (!parsed.ok()) {
                    record.outcome = RecordOutcome::ParseError;
                    record.parse_error = parsed.error;
                    out.records.push_back(std::move(record));
                    ++out.total_retries;
                    continue;
                }
                const double fitness = driver.evaluate(*parsed.payload);
                record.outcome = RecordOutcome::Valid;
                record.fitness = fitness;
                out.records.push_back(std::move(record));
                candidates.emplace_back(std::move(*parsed.payload), fitness);
                obtained = true;
                break;
            }
            if (!obtained) {
                archive.update(std::span<const std::pair<Solution, double>>(candidates));
                return finalize(RunStatus::Failed);
            }
        }

        archive.update(std::span<const std::pair<Solution, double>>(candidates));
        out.best_trace.push_back(archive.best_fitness());
        out.iterations_completed = iteration + 1;
    }

    return finalize(RunStatus::Completed);
}

// --- aggregation ---------------------------------------------------------

/// Per-repeat inputs to aggregation: final status, the scalar metric of the
/// run (gap or best fitness), and its retrial count.
struct RepeatStats {
    RunStatus status = RunStatus::Completed;
    double metric = 0.0;
    long retrials = 0;
};

/// Averages over the repeats of one experimental arm. Means cover Completed
/// runs only; when every run failed they are absent, which reports as "-".
struct AggregateMetrics {
    int total = 0;
    int completed = 0;
    int failed = 0;
    double failure_rate = 0.0;
    std::optional<double> mean_metric;
    std::optional<double> mean_retrials;
    std::vector<std::optional<double>> per_repeat_metric; // absent for failed runs
    std::vector<long> per_repeat_retrials;
};

inline AggregateMetrics collect_metrics(const std::vector<RepeatStats>& repeats) {
    if (repeats.empty()) throw Error("collect_metrics needs at least one run");
    AggregateMetrics agg;
    agg.total = static_cast<int>(repeats.size());
    double metric_sum = 0.0;
    double retrial_sum = 0.0;
    for (const RepeatStats& r : repeats) {
        agg.per_repeat_retrials.push_back(r.retrials);
        if (r.status == RunStatus::Completed) {
            ++agg.completed;
            metric_sum += r.metric;
            retrial_sum += static_cast<double>(r.retrials);
            agg.per_repeat_metric.emplace_back(r.metric);
        } else {
            ++agg.failed;
            agg.per_repeat_metric.emplace_back(std::nullopt);
        }
    }
    agg.failure_rate = static_cast<double>(agg.failed) / static_cast<double>(agg.total);
    if (agg.completed > 0) {
        agg.mean_metric = metric_sum / static_cast<double>(agg.completed);
        agg.mean_retrials = retrial_sum / static_cast<double>(agg.completed);
    }
    return agg;
}

// --- run log / transcript ------------------------------------------------

inline nlohmann::json record_to_json(const GenerationRecord& record, bool include_prompt) {
    nlohmann::json j;
    j["iteration"] = record.iteration;
    j["attempt"] = record.attempt_index;
    switch (record.outcome) {
    case RecordOutcome::Valid:
        j["outcome"] = "valid";
        j["fitness"] = record.fitness;
        break;
    case RecordOutcome::ParseError:
        j["outcome"] = "parse_error";
        j["error"] = parse_error_id(record.parse_error);
        break;
    case RecordOutcome::BackendError:
        j["outcome"] = "backend_error";
        j["error"] = backend_error_id(record.backend_error);
        break;
    }
    j["response"] = record.raw_response;
    if (include_prompt) j["prompt"] = record.prompt_text;
    j["elapsed_ms"] = record.elapsed_ms;
    return j;
}

/// One header line, then one GenerationRecord per line. The prompt is
/// written only on the first record of each iteration; every record of an
/// iteration shares it.
template <typename Solution>
void write_run_log(std::ostream& out, const nlohmann::json& header, const RunOutcome<Solution>& run) {
    out << header.dump() << '\n';
    int last_iteration = -1;
    for (const GenerationRecord& record : run.records) {
        const bool include_prompt = record.iteration != last_iteration;
        last_iteration = record.iteration;
        out << record_to_json(record, include_prompt).dump() << '\n';
    }
}

/// Transcript of raw responses in query order; replayable.
template <typename Solution>
Transcript record_transcript(const RunOutcome<Solution>& run, std::string config_hash) {
    if (run.records.empty()) throw TranscriptError("refusing to record an empty run");
    Transcript t;
    t.config_hash = std::move(config_hash);
    t.responses.reserve(run.records.size());
    for (const GenerationRecord& record : run.records) {
        // Backend errors have no response text; replay re-injects an empty
        // line which fails parsing just as the original attempt failed.
        t.responses.push_back(record.outcome == RecordOutcome::BackendError ? std::string()
                                                                            : record.raw_response);
    }
    return t;
}

} // namespace bbolab

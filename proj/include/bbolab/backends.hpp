#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbolab/errors.hpp"
#include "bbolab/problems.hpp"
#include "bbolab/prompting.hpp"
#include "bbolab/rng.hpp"
#include "bbolab/tsp.hpp"

namespace bbolab {

enum class BackendErrorKind { Transport, Api, ContextLength, Exhausted };

inline const char* backend_error_id(BackendErrorKind kind) {
    switch (kind) {
    case BackendErrorKind::Transport: return "transport";
    case BackendErrorKind::Api: return "api";
    case BackendErrorKind::ContextLength: return "context_length";
    case BackendErrorKind::Exhausted: return "exhausted";
    }
    return "?";
}

struct GenerateResult {
    std::string text;
    std::optional<BackendErrorKind> error;
    std::string detail;

    bool ok() const { return !error.has_value(); }

    static GenerateResult success(std::string text) { return {std::move(text), std::nullopt, {}}; }
    static GenerateResult failure(BackendErrorKind kind, std::string detail = {}) {
        return {{}, kind, std::move(detail)};
    }
};

/// Read-only view of the run state a generator may consult. Baseline
/// generators use the problem description and the archive best; a remote
/// model sees nothing but the prompt.
struct GenerationContext {
    const ContinuousProblem* problem = nullptr; // continuous runs
    const TspInstance* instance = nullptr;      // tsp runs
    const PromptView* view = nullptr;           // what the prompt displays
    const SolutionVector* best_solution = nullptr;
    const Tour* best_tour = nullptr;
    double best_fitness = 0.0;
    int iteration = 0;
    int attempt = 0;
    NumberFormat format{};
};

/// Per-run generator state. Sessions are never shared between runs, so a
/// deterministic backend only needs its seed and its own counters.
class BackendSession {
public:
    virtual ~BackendSession() = default;
    virtual GenerateResult generate(const std::string& prompt, const GenerationContext& ctx) = 0;
};

/// A solution generator. Backend values are immutable and safely shareable
/// across concurrent runs; all per-run state lives in the session.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string kind() const = 0;
    virtual std::unique_ptr<BackendSession> start_session(std::uint64_t run_seed) const = 0;
};

// --- scripted backends -------------------------------------------------------

/// Deterministic test policies. Each one is a tiny closed-form generator
/// whose behavior the tests can predict exactly.
enum class ScriptedPolicy {
    EchoBest,        // archive best, rendered verbatim
    Halving,         // archive best scaled by 0.5 (continuous)
    TargetEcho,      // a fixed target vector truncated to `digits` decimals
    NearestNeighbor, // greedy tour over the prompt's displayed coordinates
    AlwaysInvalid,   // tagless prose, never parses
    InvalidThenEcho, // `invalid_count` rejects, then one echo of the best
    FixedResponse,   // one constant response string
    ContextLimit,    // echo best, but fail once the prompt exceeds a size cap
};

inline const char* scripted_policy_id(ScriptedPolicy policy) {
    switch (policy) {
    case ScriptedPolicy::EchoBest: return "echo_best";
    case ScriptedPolicy::Halving: return "halving";
    case ScriptedPolicy::TargetEcho: return "target_echo";
    case ScriptedPolicy::NearestNeighbor: return "nearest_neighbor";
    case ScriptedPolicy::AlwaysInvalid: return "always_invalid";
    case ScriptedPolicy::InvalidThenEcho: return "invalid_then_echo";
    case ScriptedPolicy::FixedResponse: return "fixed";
    case ScriptedPolicy::ContextLimit: return "context_limit";
    }
    return "?";
}

inline ScriptedPolicy scripted_policy_from_id(std::string_view id) {
    if (id == "echo_best") return ScriptedPolicy::EchoBest;
    if (id == "halving") return ScriptedPolicy::Halving;
    if (id == "target_echo") return ScriptedPolicy::TargetEcho;
    if (id == "nearest_neighbor") return ScriptedPolicy::NearestNeighbor;
    if (id == "always_invalid") return ScriptedPolicy::AlwaysInvalid;
    if (id == "invalid_then_echo") return ScriptedPolicy::InvalidThenEcho;
    if (id == "fixed") return ScriptedPolicy::FixedResponse;
    if (id == "context_limit") return ScriptedPolicy::ContextLimit;
    throw ConfigError("policy", "unknown scripted policy '" + std::string(id) + "'");
}

struct ScriptedSpec {
    ScriptedPolicy policy = ScriptedPolicy::EchoBest;
    int invalid_count = 2;               // InvalidThenEcho
    int digits = 5;                      // TargetEcho truncation
    std::vector<double> target;          // TargetEcho; typically the problem shift
    std::string fixed_response;          // FixedResponse
    std::size_t max_prompt_chars = 8000; // ContextLimit
};

namespace detail {

inline std::string echo_best(const GenerationContext& ctx) {
    if (ctx.best_tour) return render_trace_tag(*ctx.best_tour);
    if (ctx.best_solution) return render_solution_tag_exact(*ctx.best_solution);
    return "no best solution available";
}

/// Greedy nearest-neighbor tour over whatever coordinates the prompt shows,
/// measured with the instance's metric. Without displayed coordinates the
/// policy has nothing to go on and returns the identity order.
inline Tour nearest_neighbor_tour(const TspInstance& instance, const PromptView* view) {
    const int n = instance.size();
    Tour tour;
    tour.reserve(static_cast<std::size_t>(n));
    if (!view || !view->displayed_coordinates) {
        tour.resize(static_cast<std::size_t>(n));
        std::iota(tour.begin(), tour.end(), 0);
        return tour;
    }
    const auto& pts = *view->displayed_coordinates;
    auto dist = [&](int i, int j) {
        const Point& a = pts[static_cast<std::size_t>(i)];
        const Point& b = pts[static_cast<std::size_t>(j)];
        if (instance.metric() == Metric::Haversine) return haversine_km(a[0], a[1], b[0], b[1]);
        const double dx = a[0] - b[0];
        const double dy = a[1] - b[1];
        return std::sqrt(dx * dx + dy * dy);
    };
    std::vector<bool> visited(static_cast<std::size_t>(n), false);
    int current = 0;
    visited[0] = true;
    tour.push_back(0);
    for (int step = 1; step < n; ++step) {
        int next = -1;
        double best = 0.0;
        for (int c = 0; c < n; ++c) {
            if (visited[static_cast<std::size_t>(c)]) continue;
            const double d = dist(current, c);
            if (next < 0 || d < best) {
                next = c;
                best = d;
            }
        }
        visited[static_cast<std::size_t>(next)] = true;
        tour.push_back(next);
        current = next;
    }
    return tour;
}

} // namespace detail

class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(ScriptedSpec spec) : spec_(std::move(spec)) {}

    std::string kind() const override { return "scripted"; }
    const ScriptedSpec& spec() const { return spec_; }

    std::unique_ptr<BackendSession> start_session(std::uint64_t) const override {
        return std::make_unique<Session>(spec_);
    }

private:
    class Session final : public BackendSession {
    public:
        explicit Session(const ScriptedSpec& spec) : spec_(spec) {}

        GenerateResult generate(const std::string& prompt, const GenerationContext& ctx) override {
            const long call = calls_++;
            switch (spec_.policy) {
            case ScriptedPolicy::EchoBest:
                return GenerateResult::success(detail::echo_best(ctx));
            case ScriptedPolicy::Halving: {
                if (!ctx.best_solution) return GenerateResult::success("no best solution available");
                SolutionVector halved = *ctx.best_solution;
                for (double& v : halved) v *= 0.5;
                return GenerateResult::success(render_solution_tag_exact(halved));
            }
            case ScriptedPolicy::TargetEcho:
                return GenerateResult::success(
                    render_solution_tag(spec_.target, NumberFormat{spec_.digits}));
            case ScriptedPolicy::NearestNeighbor: {
                if (!ctx.instance) return GenerateResult::success("no instance available");
                return GenerateResult::success(
                    render_trace_tag(detail::nearest_neighbor_tour(*ctx.instance, ctx.view)));
            }
            case ScriptedPolicy::AlwaysInvalid:
                return GenerateResult::success("I am unable to provide a solution in that form.");
            case ScriptedPolicy::InvalidThenEcho: {
                const long cycle = spec_.invalid_count + 1;
                if (call % cycle < spec_.invalid_count)
                    return GenerateResult::success("Let me think about this a bit more first.");
                return GenerateResult::success(detail::echo_best(ctx));
            }
            case ScriptedPolicy::FixedResponse:
                return GenerateResult::success(spec_.fixed_response);
            case ScriptedPolicy::ContextLimit:
                if (prompt.size() > spec_.max_prompt_chars)
                    return GenerateResult::failure(BackendErrorKind::ContextLength,
                                                   "prompt exceeds " +
                                                       std::to_string(spec_.max_prompt_chars) +
                                                       " characters");
                return GenerateResult::success(detail::echo_best(ctx));
            }
            return GenerateResult::failure(BackendErrorKind::Api, "unreachable policy");
        }

    private:
        ScriptedSpec spec_;
        long calls_ = 0;
    };

    ScriptedSpec spec_;
};

// --- classical baselines -----------------------------------------------------

/// Fresh uniform random solution each query: a permutation for TSP runs, a
/// point in the box for continuous runs.
class RandomSearchBackend final : public Backend {
public:
    std::string kind() const override { return "random_search"; }

    std::unique_ptr<BackendSession> start_session(std::uint64_t run_seed) const override {
        return std::make_unique<Session>(run_seed);
    }

private:
    class Session final : public BackendSession {
    public:
        explicit Session(std::uint64_t seed) : rng_(seed) {}

        GenerateResult generate(const std::string&, const GenerationContext& ctx) override {
            if (ctx.instance) {
                const int n = ctx.instance->size();
                Tour tour(static_cast<std::size_t>(n));
                std::iota(tour.begin(), tour.end(), 0);
                for (int i = n - 1; i > 0; --i) {
                    const auto j = static_cast<std::size_t>(rng_.uniform_int(0, i));
                    std::swap(tour[static_cast<std::size_t>(i)], tour[j]);
                }
                return GenerateResult::success(render_trace_tag(tour));
            }
            if (ctx.problem) {
                const SolutionVector x = random_solution(*ctx.problem, rng_);
                return GenerateResult::success(render_solution_tag_exact(x));
            }
            return GenerateResult::failure(BackendErrorKind::Api, "no problem in context");
        }

    private:
        Rng rng_;
    };
};

/// Gaussian perturbation of the archive best (continuous only). Proposals
/// falling outside the box are left as-is and rejected upstream.
class HillClimbBackend final : public Backend {
public:
    explicit HillClimbBackend(double sigma) : sigma_(sigma) {
        if (!(sigma > 0.0)) throw ConfigError("sigma", "hill climb sigma must be positive");
    }

    std::string kind() const override { return "hill_climb"; }
    double sigma() const { return sigma_; }

    std::unique_ptr<BackendSession> start_session(std::uint64_t run_seed) const override {
        return std::make_unique<Session>(run_seed, sigma_);
    }

private:
    class Session final : public BackendSession {
    public:
        Session(std::uint64_t seed, double sigma) : rng_(seed), sigma_(sigma) {}

        GenerateResult generate(const std::string&, const GenerationContext& ctx) override {
            if (!ctx.problem)
                return GenerateResult::failure(BackendErrorKind::Api,
                                               "hill climb needs a continuous problem");
            SolutionVector x =
                ctx.best_solution ? *ctx.best_solution : random_solution(*ctx.problem, rng_);
            if (ctx.best_solution) {
                for (double& v : x) v += rng_.gaussian(0.0, sigma_);
            }
            return GenerateResult::success(render_solution_tag_exact(x));
        }

    private:
        Rng rng_;
        double sigma_;
    };
};

// --- transcripts and replay --------------------------------------------------

/// Raw responses of one run, in query order, plus the hash of the config
/// that produced them. Replaying a transcript against the same config
/// reproduces the run bit for bit.
struct Transcript {
    std::string config_hash;
    std::vector<std::string> responses;
};

inline void write_transcript(std::ostream& out, const Transcript& transcript) {
    if (transcript.responses.empty()) throw TranscriptError("refusing to record an empty run");
    nlohmann::json header;
    header["type"] = "bbolab_transcript";
    header["config_hash"] = transcript.config_hash;
    out << header.dump() << '\n';
    for (const std::string& response : transcript.responses) {
        nlohmann::json line;
        line["response"] = response;
        out << line.dump() << '\n';
    }
}

/// Reads a transcript. Full per-run record logs are accepted too: any line
/// carrying a "response" string contributes, in file order.
inline Transcript read_transcript(std::istream& in) {
    Transcript transcript;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw TranscriptError("transcript holds a malformed JSONL line");
        if (j.contains("config_hash")) transcript.config_hash = j["config_hash"].get<std::string>();
        if (j.contains("response") && j["response"].is_string())
            transcript.responses.push_back(j["response"].get<std::string>());
    }
    return transcript;
}

/// Replays recorded responses in order; queries past the end fail with
/// Exhausted. One session consumes the whole transcript, so a replay
/// backend serves exactly one run.
class ReplayBackend final : public Backend {
public:
    explicit ReplayBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

    std::string kind() const override { return "replay"; }
    const Transcript& transcript() const { return transcript_; }

    std::unique_ptr<BackendSession> start_session(std::uint64_t) const override {
        return std::make_unique<Session>(transcript_.responses);
    }

private:
    class Session final : public BackendSession {
    public:
        explicit Session(const std::vector<std::string>& responses) : responses_(responses) {}

        GenerateResult generate(const std::string&, const GenerationContext&) override {
            if (cursor_ >= responses_.size())
                return GenerateResult::failure(BackendErrorKind::Exhausted,
                                               "transcript exhausted after " +
                                                   std::to_string(responses_.size()) + " responses");
            return GenerateResult::success(responses_[cursor_++]);
        }

    private:
        const std::vector<std::string>& responses_;
        std::size_t cursor_ = 0;
    };

    Transcript transcript_;
};

} // namespace bbolab

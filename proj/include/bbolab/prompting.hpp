#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "bbolab/archive.hpp"
#include "bbolab/errors.hpp"
#include "bbolab/problems.hpp"
#include "bbolab/tsp.hpp"

namespace bbolab {

/// Fixed-point display precision for numbers shown to the generator.
struct NumberFormat {
    int decimal_digits = 5;
};

/// Fixed-point decimal with exactly `decimal_digits` digits after the
/// point. Ties round away from zero; no exponent notation; a leading minus
/// appears only when the rounded value is negative.
inline std::string format_number(double x, NumberFormat fmt) {
    if (!std::isfinite(x)) throw FormatError("cannot format a non-finite number");
    const int d = fmt.decimal_digits;
    if (d < 0) throw FormatError("decimal_digits must be non-negative");

    double pow10 = 1.0;
    for (int k = 0; k < d && k < 23; ++k) pow10 *= 10.0; // exact up to 1e22
    const double scaled = std::abs(x) * pow10;
    if (d > 17 || scaled >= 9.0e18) {
        // Out of integer-scaling range. Doubles this large are exact
        // integers, so printf's expansion is exact and tie-free.
        std::vector<char> buf(static_cast<std::size_t>(d) + 512);
        std::snprintf(buf.data(), buf.size(), "%.*f", d, x);
        return std::string(buf.data());
    }

    const long long units = std::llround(scaled); // rounds halves away from zero
    std::string digits = std::to_string(units);
    if (d > 0) {
        if (digits.size() <= static_cast<std::size_t>(d))
            digits.insert(0, static_cast<std::size_t>(d) + 1 - digits.size(), '0');
        digits.insert(digits.size() - static_cast<std::size_t>(d), 1, '.');
    }
    if (x < 0.0 && units != 0) digits.insert(0, 1, '-');
    return digits;
}

/// Shortest fixed-notation string that parses back to the same double.
/// Integers render without a decimal point.
inline std::string format_plain(double x) {
    if (!std::isfinite(x)) throw FormatError("cannot format a non-finite number");
    char buf[800];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

// --- instruction pool -------------------------------------------------------

/// One selectable prompt variant: the per-kind task template is fixed, the
/// instruction comes from the pool.
struct PromptTemplate {
    std::string id;
    std::string instruction;
};

inline const std::vector<std::string>& tsp_instruction_pool() {
    static const std::vector<std::string> pool = {
        "Give me a new trace that is different from all traces above, and has a length lower than "
        "any of the above. The trace should traverse all points exactly once. The trace should "
        "start with </trace> and end with </trace>. No explanation is needed.",
        "Give me one new trace that is different from all traces above, and has a length lower "
        "than any of the above. That one trace should traverse all points exactly once. The trace "
        "should start with <trace> and end with </trace>. Do not explain, just give the answer.",
        "Give me a new solution that is different from all solutions above, and has a value lower "
        "than any of the above. Each solution starts with <trace> and ends with </trace>. No need "
        "to guess the length.",
        "Give me a new solution that is different from all solutions above, and has a value lower "
        "than any of the above. Each solution starts with <trace> and ends with </trace>. No need "
        "to guess the length.",
        "Give me a new solution that is different from all solutions above, and has a value lower "
        "than any of the above. Each solution starts with <trace> and ends with </trace>. No "
        "explanation is needed.",
    };
    return pool;
}

inline const std::vector<std::string>& continuous_instruction_pool() {
    static const std::vector<std::string> pool = {
        "Give me a new solution that has a fitness smaller than any of the above. The solution "
        "should start with <solution> and end with </solution>. No explanation is needed.",
        "Give me a new solution that has a fitness smaller than any of the above. The solution "
        "should start with <solution> and end with </solution>. No explanation is needed.",
        "Give me a new solution that has a fitness smaller than any of the above. The solution "
        "should start with <solution> and end with </solution>. No explanation is needed. No need "
        "to guess the fitness of the new solution.",
        "Give me a new solution that has a fitness smaller than any of the above. The solution "
        "should start with <solution> and end with </solution>. Do not explain. No need to "
        "guarantee the new solution is better.",
        "Give me a new solution that has a fitness smaller than any of the above. The solution "
        "should start with <solution> and end with </solution>. No explanation is needed.",
    };
    return pool;
}

enum class ProblemKind { Continuous, Tsp };

inline PromptTemplate select_template(ProblemKind kind, std::size_t instruction_id) {
    const auto& pool =
        kind == ProblemKind::Tsp ? tsp_instruction_pool() : continuous_instruction_pool();
    if (instruction_id >= pool.size())
        throw ConfigError("instruction_id", "pool has " + std::to_string(pool.size()) + " entries");
    const char* prefix = kind == ProblemKind::Tsp ? "tsp/" : "continuous/";
    return PromptTemplate{prefix + std::to_string(instruction_id), pool[instruction_id]};
}

// --- tag rendering ----------------------------------------------------------

inline std::string render_solution_tag(std::span<const double> values, NumberFormat fmt) {
    std::string out = "<solution>";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i], fmt);
    }
    out += "</solution>";
    return out;
}

/// Tagged solution whose components parse back bit-identically.
inline std::string render_solution_tag_exact(std::span<const double> values) {
    std::string out = "<solution>";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_plain(values[i]);
    }
    out += "</solution>";
    return out;
}

inline std::string render_trace_tag(const Tour& tour) {
    std::string out = "<trace>";
    for (std::size_t i = 0; i < tour.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(tour[i]);
    }
    out += "</trace>";
    return out;
}

// --- history ----------------------------------------------------------------

/// Solution history blocks, worst first by default (the order prompts use);
/// `best_first` reverses the block order for the sampling probe's
/// ascending-history variant.
inline std::string render_history(const Archive<SolutionVector>& archive, NumberFormat fmt,
                                  bool best_first = false) {
    if (archive.empty()) throw RenderError("cannot render an empty archive");
    std::string out;
    const auto& entries = archive.entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& entry = entries[best_first ? entries.size() - 1 - k : k];
        if (k) out += "\n\n";
        out += render_solution_tag(entry.solution, fmt);
        out += "\nvalue: ";
        out += format_number(entry.fitness, fmt);
    }
    return out;
}

inline std::string render_history(const Archive<Tour>& archive, NumberFormat fmt,
                                  bool best_first = false) {
    if (archive.empty()) throw RenderError("cannot render an empty archive");
    std::string out;
    const auto& entries = archive.entries();
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& entry = entries[best_first ? entries.size() - 1 - k : k];
        if (k) out += "\n\n";
        out += render_trace_tag(entry.solution);
        out += "\nlength: ";
        out += format_number(entry.fitness, fmt);
    }
    return out;
}

// --- task descriptions ------------------------------------------------------

inline std::string render_task(const ContinuousProblem& problem, NumberFormat /*fmt*/) {
    std::string out = "You are given an optimization problem. The problem has ";
    out += std::to_string(problem.dimension);
    out += " decision variables. Each decision variable is a real number between ";
    out += format_plain(problem.lower_bound);
    out += " and ";
    out += format_plain(problem.upper_bound);
    out += ". The two decision variables will be represented in the following form: "
           "<solution>...,...</solution>. Your task is to find a solution, with the minimum "
           "possible value.";
    return out;
}

inline std::string render_task(const TspInstance& instance, const PromptView& view) {
    const bool has_coords = view.displayed_coordinates.has_value();
    if (has_coords &&
        view.displayed_coordinates->size() != static_cast<std::size_t>(instance.size()))
        throw RenderError("view coordinate count does not match the instance");
    std::string out = "You are given a list of points with coordinates: ";
    for (int i = 0; i < instance.size(); ++i) {
        if (i) out += ", ";
        out += "(" + std::to_string(i) + "): ";
        if (view.show_names) {
            out += instance.labels()[static_cast<std::size_t>(i)];
            if (has_coords) out += ' ';
        }
        if (has_coords) {
            const Point& p = (*view.displayed_coordinates)[static_cast<std::size_t>(i)];
            out += "(" + format_plain(p[0]) + ", " + format_plain(p[1]) + ")";
        }
    }
    out += ". Your task is to find a trace, with the shortest possible length, that traverses "
           "each point exactly once.";
    return out;
}

inline const char* tsp_history_transition() {
    return "Below are some previous traces and their lengths. The traces are arranged in "
           "descending order based on their lengths, where lower values are better.";
}

/// Three-part prompt: task description, solution history, instruction.
/// Sections are separated by blank lines; empty sections are skipped. The
/// TSP variant carries the one transition line introducing the history.
inline std::string assemble_prompt(ProblemKind kind, const std::string& task,
                                   const std::string& history, const std::string& instruction) {
    std::string out;
    auto append = [&out](const std::string& part) {
        if (part.empty()) return;
        if (!out.empty()) out += "\n\n";
        out += part;
    };
    append(task);
    if (kind == ProblemKind::Tsp) append(tsp_history_transition());
    append(history);
    append(instruction);
    return out;
}

} // namespace bbolab

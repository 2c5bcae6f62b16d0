#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbolab/tsp.hpp"

namespace bbolab {

/// Why a raw response was rejected. Classification is total and
/// deterministic: any byte sequence maps to a payload or exactly one kind.
enum class ParseErrorKind {
    NoTag,
    MultipleTags,
    MalformedNumber,
    DimensionMismatch,
    OutOfBounds,
    DuplicateElement,
    MissingElement,
    UnknownElement,
};

inline const char* parse_error_id(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::NoTag: return "no_tag";
    case ParseErrorKind::MultipleTags: return "multiple_tags";
    case ParseErrorKind::MalformedNumber: return "malformed_number";
    case ParseErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ParseErrorKind::OutOfBounds: return "out_of_bounds";
    case ParseErrorKind::DuplicateElement: return "duplicate_element";
    case ParseErrorKind::MissingElement: return "missing_element";
    case ParseErrorKind::UnknownElement: return "unknown_element";
    }
    return "?";
}

template <typename Payload>
struct ParseOutcome {
    std::optional<Payload> payload;
    ParseErrorKind error = ParseErrorKind::NoTag; // meaningful only when !payload

    bool ok() const { return payload.has_value(); }
};

using SolutionParse = ParseOutcome<std::vector<double>>;
using TraceParse = ParseOutcome<Tour>;

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

struct TagToken {
    bool closing;
    std::size_t begin; // offset of '<'
    std::size_t end;   // offset one past '>'
};

/// Scans for occurrences of <name> / </name>, case-insensitively and with
/// whitespace tolerated inside the brackets. Anything that does not complete
/// a bracket pair is ignored, so arbitrary byte input is safe.
inline std::vector<TagToken> scan_tags(std::string_view text, std::string_view name) {
    std::vector<TagToken> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        auto skip_ws = [&] {
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        };
        skip_ws();
        bool closing = false;
        if (j < text.size() && text[j] == '/') {
            closing = true;
            ++j;
            skip_ws();
        }
        if (j + name.size() <= text.size() && iequals(text.substr(j, name.size()), name)) {
            j += name.size();
            skip_ws();
            if (j < text.size() && text[j] == '>') {
                tokens.push_back({closing, i, j + 1});
                i = j + 1;
                continue;
            }
        }
        ++i;
    }
    return tokens;
}

/// Extracts the payload of the single <name>...</name> pair, or reports
/// NoTag / MultipleTags.
inline std::optional<std::string_view> extract_tag_payload(std::string_view text, std::string_view name,
                                                           ParseErrorKind& error) {
    const std::vector<TagToken> tokens = scan_tags(text, name);
    std::size_t opens = 0;
    std::size_t closes = 0;
    for (const TagToken& t : tokens) (t.closing ? closes : opens)++;
    if (opens == 0 || closes == 0) {
        error = ParseErrorKind::NoTag;
        return std::nullopt;
    }
    if (opens > 1 || closes > 1) {
        error = ParseErrorKind::MultipleTags;
        return std::nullopt;
    }
    const TagToken& open = tokens[tokens[0].closing ? 1 : 0];
    const TagToken& close = tokens[tokens[0].closing ? 0 : 1];
    if (close.begin < open.end) {
        error = ParseErrorKind::NoTag; // </x> before <x> is not a pair
        return std::nullopt;
    }
    return text.substr(open.end, close.begin - open.end);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view payload) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= payload.size(); ++i) {
        if (i == payload.size() || payload[i] == ',') {
            out.push_back(trim(payload.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

/// Strict decimal parse: optional sign, digits, optional fraction. No
/// exponent notation; the whole token must be consumed.
inline std::optional<double> parse_decimal(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::size_t i = 0;
    if (token[i] == '+' || token[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
        ++i;
        ++digits;
    }
    if (i < token.size() && token[i] == '.') {
        ++i;
        while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) {
            ++i;
            ++digits;
        }
    }
    if (digits == 0 || i != token.size()) return std::nullopt;
    // Convert via strtod on a NUL-terminated copy; the token itself may be
    // an unterminated slice of the response.
    std::string buf(token);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return value;
}

inline std::optional<long> parse_integer(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::size_t i = 0;
    if (token[i] == '+' || token[i] == '-') ++i;
    if (i == token.size()) return std::nullopt;
    for (std::size_t k = i; k < token.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(token[k]))) return std::nullopt;
    }
    if (token.size() - i > 9) return std::nullopt; // absurdly long index
    long value = 0;
    for (std::size_t k = i; k < token.size(); ++k) value = value * 10 + (token[k] - '0');
    return token[0] == '-' ? -value : value;
}

} // namespace detail

/// Accepts exactly one <solution>...</solution> pair anywhere in the text,
/// with a comma-separated list of decimals inside. Surrounding prose and
/// whitespace around numbers are tolerated; everything else is classified.
inline SolutionParse parse_solution(std::string_view response, int dimension, double lower_bound,
                                    double upper_bound) {
    SolutionParse out;
    auto payload = detail::extract_tag_payload(response, "solution", out.error);
    if (!payload) return out;

    std::vector<double> values;
    for (std::string_view token : detail::split_commas(*payload)) {
        auto value = detail::parse_decimal(token);
        if (!value) {
            out.error = ParseErrorKind::MalformedNumber;
            return out;
        }
        values.push_back(*value);
    }
    if (static_cast<int>(values.size()) != dimension) {
        out.error = ParseErrorKind::DimensionMismatch;
        return out;
    }
    for (double v : values) {
        if (!(v >= lower_bound && v <= upper_bound)) {
            out.error = ParseErrorKind::OutOfBounds;
            return out;
        }
    }
    out.payload = std::move(values);
    return out;
}

/// Accepts exactly one <trace>...</trace> pair whose payload is a
/// permutation of 0..n_cities-1.
inline TraceParse parse_trace(std::string_view response, int n_cities) {
    TraceParse out;
    auto payload = detail::extract_tag_payload(response, "trace", out.error);
    if (!payload) return out;

    std::vector<long> values;
    for (std::string_view token : detail::split_commas(*payload)) {
        auto value = detail::parse_integer(token);
        if (!value) {
            out.error = ParseErrorKind::MalformedNumber;
            return out;
        }
        values.push_back(*value);
    }
    std::vector<bool> seen(static_cast<std::size_t>(n_cities), false);
    for (long v : values) {
        if (v < 0 || v >= n_cities) {
            out.error = ParseErrorKind::UnknownElement;
            return out;
        }
        if (seen[static_cast<std::size_t>(v)]) {
            out.error = ParseErrorKind::DuplicateElement;
            return out;
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
    if (static_cast<int>(values.size()) != n_cities) {
        out.error = ParseErrorKind::MissingElement;
        return out;
    }
    Tour tour;
    tour.reserve(values.size());
    for (long v : values) tour.push_back(static_cast<int>(v));
    out.payload = std::move(tour);
    return out;
}

} // namespace bbolab

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "bbolab/errors.hpp"
#include "bbolab/problems.hpp"
#include "bbolab/tsp.hpp"

namespace bbolab {

enum class OracleMethod { BruteForce, HeldKarp };

/// Exact reference solution for an instance. `optimal_length` is the length
/// of `optimal_tour` as measured by tour_length, so the two are consistent
/// bit for bit.
struct OracleResult {
    double optimal_length;
    Tour optimal_tour;
    OracleMethod method;
};

/// Exhaustive search over the (N-1)!/2 canonical cycles. Ground truth for
/// cross-checking the dynamic program; deliberately shares nothing with it
/// beyond the distance matrix.
inline OracleResult brute_force_tsp(const TspInstance& instance) {
    const int n = instance.size();
    if (n > 11) throw TooLargeError("brute force handles at most 11 cities");

    std::vector<int> rest(static_cast<std::size_t>(n - 1));
    std::iota(rest.begin(), rest.end(), 1);

    Tour best_tour;
    double best_length = std::numeric_limits<double>::infinity();
    Tour candidate(static_cast<std::size_t>(n));
    candidate[0] = 0;
    do {
        // Fixing rest[0] < rest[n-2] halves the search to one direction per cycle.
        if (n >= 3 && rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), candidate.begin() + 1);
        double length = instance.distance(0, candidate[1]);
        for (int i = 1; i + 1 < n; ++i)
            length += instance.distance(candidate[static_cast<std::size_t>(i)],
                                        candidate[static_cast<std::size_t>(i + 1)]);
        length += instance.distance(candidate[static_cast<std::size_t>(n - 1)], 0);
        if (length < best_length) {
            best_length = length;
            best_tour = candidate;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));

    best_tour = canonical_tour(std::move(best_tour));
    return OracleResult{tour_length(instance, best_tour), best_tour, OracleMethod::BruteForce};
}

/// Bitmask dynamic program over (visited subset, last city) states,
/// O(N^2 * 2^N) time and O(N * 2^N) memory. Exact for 3 <= N <= 20.
inline OracleResult held_karp_tsp(const TspInstance& instance) {
    const int n = instance.size();
    if (n < 3) throw TooLargeError("Held-Karp needs at least 3 cities");
    if (n > 20) throw TooLargeError("Held-Karp handles at most 20 cities");

    // City 0 is the fixed start; states range over subsets of cities 1..n-1.
    const int m = n - 1;
    const std::size_t n_masks = std::size_t{1} << m;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(n_masks * static_cast<std::size_t>(m), inf);
    std::vector<std::uint8_t> parent(n_masks * static_cast<std::size_t>(m), 0xff);

    auto at = [m](std::size_t mask, int last) { return mask * static_cast<std::size_t>(m) + static_cast<std::size_t>(last); };

    for (int last = 0; last < m; ++last)
        cost[at(std::size_t{1} << last, last)] = instance.distance(0, last + 1);

    for (std::size_t mask = 1; mask < n_masks; ++mask) {
        for (int last = 0; last < m; ++last) {
            if (!(mask & (std::size_t{1} << last))) continue;
            const double base = cost[at(mask, last)];
            if (base == inf) continue;
            for (int next = 0; next < m; ++next) {
                if (mask & (std::size_t{1} << next)) continue;
                const std::size_t next_mask = mask | (std::size_t{1} << next);
                const double candidate = base + instance.distance(last + 1, next + 1);
                if (candidate < cost[at(next_mask, next)]) {
                    cost[at(next_mask, next)] = candidate;
                    parent[at(next_mask, next)] = static_cast<std::uint8_t>(last);
                }
            }
        }
    }

    const std::size_t full = n_masks - 1;
    int best_last = 0;
    double best_cost = inf;
    for (int last = 0; last < m; ++last) {
        const double candidate = cost[at(full, last)] + instance.distance(last + 1, 0);
        if (candidate < best_cost) {
            best_cost = candidate;
            best_last = last;
        }
    }

    Tour tour(static_cast<std::size_t>(n));
    std::size_t mask = full;
    int last = best_last;
    for (int pos = n - 1; pos >= 1; --pos) {
        tour[static_cast<std::size_t>(pos)] = last + 1;
        const std::uint8_t prev = parent[at(mask, last)];
        mask ^= std::size_t{1} << last;
        if (prev == 0xff) break;
        last = prev;
    }
    tour[0] = 0;

    tour = canonical_tour(std::move(tour));
    return OracleResult{tour_length(instance, tour), tour, OracleMethod::HeldKarp};
}

/// Percentage excess of a found length over the exact optimum.
inline double optimality_gap(double found_length, double optimal_length) {
    if (!(optimal_length > 0.0)) throw OracleViolationError("optimal length must be positive");
    if (found_length < optimal_length - 1e-9)
        throw OracleViolationError("found length beats the exact optimum; oracle or evaluation is broken");
    return 100.0 * (found_length - optimal_length) / optimal_length;
}

/// Analytic optimum of every shifted benchmark function: 0 at x = shift.
inline double continuous_reference(const ContinuousProblem&) {
    return 0.0;
}

} // namespace bbolab

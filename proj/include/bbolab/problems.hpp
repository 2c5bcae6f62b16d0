#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bbolab/errors.hpp"
#include "bbolab/rng.hpp"

namespace bbolab {

enum class FunctionName { Ackley, Griewank, Rastrigin, Rosenbrock, Sphere };

inline const char* function_id(FunctionName name) {
    switch (name) {
    case FunctionName::Ackley: return "ackley";
    case FunctionName::Griewank: return "griewank";
    case FunctionName::Rastrigin: return "rastrigin";
    case FunctionName::Rosenbrock: return "rosenbrock";
    case FunctionName::Sphere: return "sphere";
    }
    return "?";
}

inline FunctionName function_from_id(std::string_view id) {
    if (id == "ackley") return FunctionName::Ackley;
    if (id == "griewank") return FunctionName::Griewank;
    if (id == "rastrigin") return FunctionName::Rastrigin;
    if (id == "rosenbrock") return FunctionName::Rosenbrock;
    if (id == "sphere") return FunctionName::Sphere;
    throw ConfigError("name", "unknown benchmark function '" + std::string(id) + "'");
}

/// Standard search-box defaults for each function.
inline double default_lower_bound(FunctionName name) {
    switch (name) {
    case FunctionName::Ackley: return -32.768;
    case FunctionName::Griewank: return -600.0;
    case FunctionName::Rastrigin: return -5.12;
    case FunctionName::Rosenbrock: return -5.0;
    case FunctionName::Sphere: return -5.12;
    }
    return 0.0;
}

inline double default_upper_bound(FunctionName name) {
    switch (name) {
    case FunctionName::Ackley: return 32.768;
    case FunctionName::Griewank: return 600.0;
    case FunctionName::Rastrigin: return 5.12;
    case FunctionName::Rosenbrock: return 10.0;
    case FunctionName::Sphere: return 5.12;
    }
    return 1.0;
}

using SolutionVector = std::vector<double>;

/// A named benchmark function to minimize. The objective is f(x - shift),
/// so the global optimum of a shifted problem sits at x = shift.
/// Immutable after construction; safe to share across threads.
struct ContinuousProblem {
    FunctionName name;
    int dimension;
    double lower_bound;
    double upper_bound;
    std::vector<double> shift; // length == dimension

    ContinuousProblem(FunctionName name, int dimension, double lower_bound, double upper_bound,
                      std::vector<double> shift)
        : name(name),
          dimension(dimension),
          lower_bound(lower_bound),
          upper_bound(upper_bound),
          shift(std::move(shift)) {
        if (dimension < 1) throw DimensionError("problem dimension must be >= 1");
        if (!(lower_bound < upper_bound)) throw ConfigError("bounds", "lower bound must be below upper bound");
        if (this->shift.size() != static_cast<std::size_t>(dimension))
            throw DimensionError("shift length must equal problem dimension");
    }

    std::string id() const { return function_id(name); }

    bool in_bounds(std::span<const double> x) const {
        for (double v : x) {
            if (!(v >= lower_bound && v <= upper_bound)) return false;
        }
        return true;
    }
};

/// Unshifted problem with the standard bounds for the function.
inline ContinuousProblem make_problem(FunctionName name, int dimension) {
    return ContinuousProblem(name, dimension, default_lower_bound(name), default_upper_bound(name),
                             std::vector<double>(static_cast<std::size_t>(dimension), 0.0));
}

/// Copy of `problem` with the given shift vector installed.
inline ContinuousProblem with_shift(const ContinuousProblem& problem, std::vector<double> shift) {
    return ContinuousProblem(problem.name, problem.dimension, problem.lower_bound, problem.upper_bound,
                             std::move(shift));
}

/// Copy whose shift components are drawn uniformly from
/// [magnitude_low, magnitude_high]; same seed yields the same shift.
inline ContinuousProblem make_shifted(const ContinuousProblem& problem, std::uint64_t rng_seed,
                                      double magnitude_low, double magnitude_high) {
    if (magnitude_low > magnitude_high)
        throw ConfigError("shift", "magnitude_low must not exceed magnitude_high");
    Rng rng(rng_seed);
    std::vector<double> shift(static_cast<std::size_t>(problem.dimension));
    for (double& s : shift) s = rng.uniform(magnitude_low, magnitude_high);
    return with_shift(problem, std::move(shift));
}

namespace detail {

inline double ackley(std::span<const double> z) {
    constexpr double a = 20.0;
    constexpr double b = 0.2;
    constexpr double c = 2.0 * std::numbers::pi;
    double sum_sq = 0.0;
    double sum_cos = 0.0;
    for (double v : z) {
        sum_sq += v * v;
        sum_cos += std::cos(c * v);
    }
    const double n = static_cast<double>(z.size());
    return -a * std::exp(-b * std::sqrt(sum_sq / n)) - std::exp(sum_cos / n) + a + std::numbers::e;
}

inline double griewank(std::span<const double> z) {
    double sum = 0.0;
    double product = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        sum += z[i] * z[i] / 4000.0;
        product *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return sum - product + 1.0;
}

inline double rastrigin(std::span<const double> z) {
    constexpr double A = 10.0;
    double sum = A * static_cast<double>(z.size());
    for (double v : z) sum += v * v - A * std::cos(2.0 * std::numbers::pi * v);
    return sum;
}

inline double rosenbrock(std::span<const double> z) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i + 1] - z[i] * z[i];
        const double b = 1.0 - z[i];
        sum += 100.0 * a * a + b * b;
    }
    return sum;
}

inline double sphere(std::span<const double> z) {
    double sum = 0.0;
    for (double v : z) sum += v * v;
    return sum;
}

} // namespace detail

/// Objective value f(x - shift); lower is better. Deterministic.
inline double evaluate(const ContinuousProblem& problem, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(problem.dimension))
        throw DimensionError("solution has " + std::to_string(x.size()) + " components, problem expects " +
                             std::to_string(problem.dimension));
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - problem.shift[i];
    switch (problem.name) {
    case FunctionName::Ackley: return detail::ackley(z);
    case FunctionName::Griewank: return detail::griewank(z);
    case FunctionName::Rastrigin: return detail::rastrigin(z);
    case FunctionName::Rosenbrock: return detail::rosenbrock(z);
    case FunctionName::Sphere: return detail::sphere(z);
    }
    throw Error("unreachable function name");
}

/// Uniform sample within the box, one draw per dimension.
inline SolutionVector random_solution(const ContinuousProblem& problem, Rng& rng) {
    SolutionVector x(static_cast<std::size_t>(problem.dimension));
    for (double& v : x) v = rng.uniform(problem.lower_bound, problem.upper_bound);
    return x;
}

} // namespace bbolab

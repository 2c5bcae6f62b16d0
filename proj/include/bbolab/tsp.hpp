#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbolab/errors.hpp"
#include "bbolab/rng.hpp"

namespace bbolab {

enum class Metric { Euclidean, Haversine };

inline const char* metric_id(Metric metric) {
    return metric == Metric::Euclidean ? "euclidean" : "haversine";
}

inline Metric metric_from_id(std::string_view id) {
    if (id == "euclidean") return Metric::Euclidean;
    if (id == "haversine") return Metric::Haversine;
    throw ConfigError("metric", "unknown metric '" + std::string(id) + "'");
}

/// Great-circle distance in kilometers between two (latitude, longitude)
/// points in degrees, on a sphere of radius 6371.0 km.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    constexpr double earth_radius_km = 6371.0;
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = lat1 * deg;
    const double phi2 = lat2 * deg;
    const double dphi = (lat2 - lat1) * deg;
    const double dlambda = (lon2 - lon1) * deg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * earth_radius_km * std::asin(std::min(1.0, std::sqrt(h)));
}

using Point = std::array<double, 2>; // planar (x, y) or geographic (lat, lon)
using Tour = std::vector<int>;       // permutation of 0..N-1

/// A TSP instance: labeled points plus a distance metric. The full pairwise
/// distance matrix is precomputed at construction. Immutable afterwards.
class TspInstance {
public:
    TspInstance(std::vector<std::string> labels, std::vector<Point> coordinates, Metric metric,
                std::optional<double> reference_length = std::nullopt)
        : labels_(std::move(labels)),
          coordinates_(std::move(coordinates)),
          metric_(metric),
          reference_length_(reference_length) {
        const std::size_t n = coordinates_.size();
        if (n < 3) throw InstanceError("a TSP instance needs at least 3 cities");
        if (labels_.size() != n) throw InstanceError("labels and coordinates differ in length");
        std::unordered_set<std::string> seen(labels_.begin(), labels_.end());
        if (seen.size() != n) throw InstanceError("city labels must be unique");
        if (metric_ == Metric::Haversine) {
            for (const Point& p : coordinates_) {
                if (std::abs(p[0]) > 90.0 || std::abs(p[1]) > 180.0)
                    throw InstanceError("haversine metric requires |lat| <= 90 and |lon| <= 180");
            }
        }
        distances_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = point_distance(coordinates_[i], coordinates_[j]);
                distances_[i * n + j] = d;
                distances_[j * n + i] = d;
            }
        }
    }

    int size() const { return static_cast<int>(coordinates_.size()); }
    Metric metric() const { return metric_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<Point>& coordinates() const { return coordinates_; }
    std::optional<double> reference_length() const { return reference_length_; }

    double distance(int i, int j) const {
        return distances_[static_cast<std::size_t>(i) * coordinates_.size() + static_cast<std::size_t>(j)];
    }

    /// True when every label is its own index, i.e. a synthetic instance.
    bool has_index_labels() const {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] != std::to_string(i)) return false;
        }
        return true;
    }

private:
    double point_distance(const Point& a, const Point& b) const {
        if (metric_ == Metric::Haversine) return haversine_km(a[0], a[1], b[0], b[1]);
        const double dx = a[0] - b[0];
        const double dy = a[1] - b[1];
        return std::sqrt(dx * dx + dy * dy);
    }

    std::vector<std::string> labels_;
    std::vector<Point> coordinates_;
    Metric metric_;
    std::optional<double> reference_length_;
    std::vector<double> distances_;
};

/// Synthetic instance with integer coordinates uniform in [0, 100]^2,
/// Euclidean metric, and labels "0".."N-1". Deterministic per seed.
inline TspInstance random_instance(int n_cities, std::uint64_t rng_seed) {
    if (n_cities < 3) throw InstanceError("a TSP instance needs at least 3 cities");
    Rng rng(rng_seed);
    std::vector<std::string> labels;
    std::vector<Point> points;
    labels.reserve(static_cast<std::size_t>(n_cities));
    points.reserve(static_cast<std::size_t>(n_cities));
    for (int i = 0; i < n_cities; ++i) {
        labels.push_back(std::to_string(i));
        const double x = static_cast<double>(rng.uniform_int(0, 100));
        const double y = static_cast<double>(rng.uniform_int(0, 100));
        points.push_back({x, y});
    }
    return TspInstance(std::move(labels), std::move(points), Metric::Euclidean);
}

inline void validate_tour(const TspInstance& instance, const Tour& tour) {
    const int n = instance.size();
    if (static_cast<int>(tour.size()) != n) throw TourError("tour length does not match the instance");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int city : tour) {
        if (city < 0 || city >= n) throw TourError("tour references city " + std::to_string(city));
        if (seen[static_cast<std::size_t>(city)]) throw TourError("tour repeats city " + std::to_string(city));
        seen[static_cast<std::size_t>(city)] = true;
    }
}

/// Length of the cyclic route, closing edge included.
inline double tour_length(const TspInstance& instance, const Tour& tour) {
    validate_tour(instance, tour);
    double total = 0.0;
    const int n = instance.size();
    for (int i = 0; i < n; ++i) {
        total += instance.distance(tour[static_cast<std::size_t>(i)],
                                   tour[static_cast<std::size_t>((i + 1) % n)]);
    }
    return total;
}

/// Rotates/reflects a tour to the canonical representative of its cycle:
/// starts at city 0 and runs in the direction whose second city has the
/// smaller index. Two tours describe the same cycle iff their canonical
/// forms are equal.
inline Tour canonical_tour(Tour tour) {
    const std::size_t n = tour.size();
    std::size_t start = 0;
    while (start < n && tour[start] != 0) ++start;
    if (start == n) throw TourError("tour does not contain city 0");
    Tour out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = tour[(start + i) % n];
    if (n >= 3 && out[1] > out[n - 1]) {
        std::reverse(out.begin() + 1, out.end());
    }
    return out;
}

enum class ViewMode { True, Masked, Shifted, NamesOnly, CoordsOnly, NamesAndCoords };

inline const char* view_mode_id(ViewMode mode) {
    switch (mode) {
    case ViewMode::True: return "true";
    case ViewMode::Masked: return "masked";
    case ViewMode::Shifted: return "shifted";
    case ViewMode::NamesOnly: return "names_only";
    case ViewMode::CoordsOnly: return "coords_only";
    case ViewMode::NamesAndCoords: return "names_and_coords";
    }
    return "?";
}

inline ViewMode view_mode_from_id(std::string_view id) {
    if (id == "true") return ViewMode::True;
    if (id == "masked") return ViewMode::Masked;
    if (id == "shifted") return ViewMode::Shifted;
    if (id == "names_only") return ViewMode::NamesOnly;
    if (id == "coords_only") return ViewMode::CoordsOnly;
    if (id == "names_and_coords") return ViewMode::NamesAndCoords;
    throw ConfigError("view", "unknown view mode '" + std::string(id) + "'");
}

/// What the generator is shown for an instance. Evaluation always uses the
/// instance's true coordinates; a view only changes the prompt.
struct PromptView {
    ViewMode mode = ViewMode::True;
    bool show_names = false;
    std::optional<std::vector<Point>> displayed_coordinates;
};

/// Builds the prompt-side representation of an instance.
///   Masked   -> fresh random integer coordinates in [0, 100]^2
///   Shifted  -> true coordinates plus one constant integer offset
///   True     -> true coordinates
///   NamesOnly / CoordsOnly / NamesAndCoords -> city-name settings, which
///   require a named geographic instance
inline PromptView make_view(const TspInstance& instance, ViewMode mode, std::uint64_t rng_seed) {
    PromptView view;
    view.mode = mode;
    switch (mode) {
    case ViewMode::True:
        view.displayed_coordinates = instance.coordinates();
        return view;
    case ViewMode::Masked: {
        if (instance.metric() != Metric::Euclidean)
            throw ViewError("masked views apply to planar Euclidean instances");
        Rng rng(rng_seed);
        std::vector<Point> points;
        points.reserve(static_cast<std::size_t>(instance.size()));
        for (int i = 0; i < instance.size(); ++i) {
            points.push_back({static_cast<double>(rng.uniform_int(0, 100)),
                              static_cast<double>(rng.uniform_int(0, 100))});
        }
        view.displayed_coordinates = std::move(points);
        return view;
    }
    case ViewMode::Shifted: {
        if (instance.metric() != Metric::Euclidean)
            throw ViewError("shifted views apply to planar Euclidean instances");
        Rng rng(rng_seed);
        const double ox = static_cast<double>(rng.uniform_int(50, 200));
        const double oy = static_cast<double>(rng.uniform_int(50, 200));
        std::vector<Point> points;
        points.reserve(static_cast<std::size_t>(instance.size()));
        for (const Point& p : instance.coordinates()) points.push_back({p[0] + ox, p[1] + oy});
        view.displayed_coordinates = std::move(points);
        return view;
    }
    case ViewMode::NamesOnly:
    case ViewMode::CoordsOnly:
    case ViewMode::NamesAndCoords:
        if (instance.metric() != Metric::Haversine || instance.has_index_labels())
            throw ViewError("city-name views require a named geographic instance");
        view.show_names = mode != ViewMode::CoordsOnly;
        if (mode != ViewMode::NamesOnly) view.displayed_coordinates = instance.coordinates();
        return view;
    }
    throw ViewError("unreachable view mode");
}

// --- instance file format: {"labels": [...], "coordinates": [[..,..],...],
//     "metric": "euclidean"|"haversine", "reference_length": optional} ---

inline nlohmann::json instance_to_json(const TspInstance& instance) {
    nlohmann::json j;
    j["labels"] = instance.labels();
    nlohmann::json coords = nlohmann::json::array();
    for (const Point& p : instance.coordinates()) coords.push_back({p[0], p[1]});
    j["coordinates"] = std::move(coords);
    j["metric"] = metric_id(instance.metric());
    if (instance.reference_length()) j["reference_length"] = *instance.reference_length();
    return j;
}

inline TspInstance instance_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InstanceError("instance file must hold a JSON object");
    if (!j.contains("coordinates") || !j["coordinates"].is_array())
        throw InstanceError("instance file needs a 'coordinates' array");
    std::vector<Point> points;
    for (const auto& c : j["coordinates"]) {
        if (!c.is_array() || c.size() != 2) throw InstanceError("each coordinate must be a [a, b] pair");
        points.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        labels = j["labels"].get<std::vector<std::string>>();
    } else {
        for (std::size_t i = 0; i < points.size(); ++i) labels.push_back(std::to_string(i));
    }
    const Metric metric = metric_from_id(j.value("metric", "euclidean"));
    std::optional<double> reference;
    if (j.contains("reference_length")) reference = j["reference_length"].get<double>();
    return TspInstance(std::move(labels), std::move(points), metric, reference);
}

} // namespace bbolab

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bbolab/errors.hpp"

namespace bbolab {

/// Capacity-bounded elitist set of (solution, fitness) pairs for
/// minimization. Entries are kept in worst-to-best order (descending
/// fitness), which is also the order prompts render them in. Exact
/// duplicates of stored solutions are ignored; when a truncation has to
/// choose between equal-fitness entries, the earlier-inserted one survives.
template <typename Solution>
class Archive {
public:
    struct Entry {
        Solution solution;
        double fitness;
        std::uint64_t seq; // insertion order, for deterministic tie-breaking
    };

    explicit Archive(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 1) throw ConfigError("n", "archive capacity must be >= 1");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Worst -> best.
    const std::vector<Entry>& entries() const { return entries_; }

    const Entry& best() const {
        if (entries_.empty()) throw Error("archive is empty");
        return entries_.back();
    }

    double best_fitness() const { return best().fitness; }

    /// Inserts one candidate; returns whether the archive changed.
    bool insert(Solution solution, double fitness) {
        for (const Entry& e : entries_) {
            if (e.solution == solution) return false;
        }
        if (entries_.size() == capacity_ && fitness >= entries_.front().fitness) {
            // Full and not better than the current worst: nothing to do. The
            // >= keeps the earlier-inserted entry on fitness ties.
            return false;
        }
        Entry entry{std::move(solution), fitness, next_seq_++};
        auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry.fitness,
                                    [](double f, const Entry& e) { return f > e.fitness; });
        entries_.insert(pos, std::move(entry));
        if (entries_.size() > capacity_) drop_worst();
        return true;
    }

    /// Merges a batch of candidates, keeping the capacity() best.
    void update(std::span<const std::pair<Solution, double>> candidates) {
        for (const auto& [solution, fitness] : candidates) insert(solution, fitness);
    }

private:
    void drop_worst() {
        // Entries are sorted (fitness desc, seq asc); the droppable entry is
        // the latest-inserted one within the leading equal-fitness group.
        std::size_t group_end = 1;
        while (group_end < entries_.size() && entries_[group_end].fitness == entries_[0].fitness)
            ++group_end;
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(group_end - 1));
    }

    std::size_t capacity_;
    std::uint64_t next_seq_ = 0;
    std::vector<Entry> entries_;
};

/// Value-semantics form of Archive::update.
template <typename Solution>
Archive<Solution> archive_update(Archive<Solution> archive,
                                 std::span<const std::pair<Solution, double>> candidates) {
    archive.update(candidates);
    return archive;
}

} // namespace bbolab

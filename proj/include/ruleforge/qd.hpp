#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ruleforge/policy.hpp"

namespace ruleforge {

/// Archive geometry: one row per rule count in [1, max_rules], B uniform
/// columns over mean |threshold| in [0, th_max].
struct GridSpec {
    std::size_t max_rules = 6;
    std::size_t threshold_bins = 16;
    double th_max = 1.0;

    std::size_t cell_count() const noexcept { return max_rules * threshold_bins; }
    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CellCoords {
    std::size_t rule_bin = 0;
    std::size_t th_bin = 0;

    friend auto operator<=>(const CellCoords&, const CellCoords&) = default;
};

struct ArchiveCell {
    Policy policy;
    double fitness = 0.0;
    double performance = 0.0;
    Descriptor descriptor;
    std::size_t inserted_at = 0;  // generation
    std::uint64_t sequence = 0;   // global insertion order, breaks same-generation ties

    friend bool operator==(const ArchiveCell&, const ArchiveCell&) = default;
};

/// rule_bin = k - 1, th_bin = min(B - 1, floor(th / th_max * B)).
/// Throws ValidationError when k is outside [1, max_rules].
CellCoords bin_descriptor(const Descriptor& d, const GridSpec& spec);

/// Ranking used for elites and for the best occupant: higher fitness, then
/// lower complexity, then earlier insertion.
bool ranks_before(const ArchiveCell& a, const ArchiveCell& b) noexcept;

/// MAP-Elites style grid holding the best policy offered to each cell.
class Archive {
public:
    explicit Archive(GridSpec spec);

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }
    const std::map<CellCoords, ArchiveCell>& cells() const noexcept { return cells_; }
    const ArchiveCell* find(CellCoords coords) const;

    /// Stores `policy` iff its cell is empty or `fitness` strictly beats the
    /// incumbent. Returns whether it was stored.
    bool insert(const Policy& policy, double fitness, std::size_t generation, double performance = 0.0);

    /// Highest-ranked occupant. Throws UsageError when empty.
    const ArchiveCell& best() const;

    /// All occupants in rank order.
    std::vector<const ArchiveCell*> ranked() const;

    nlohmann::json dump() const;
    /// Throws ParseError on a malformed document and ValidationError when a
    /// cell's policy does not bin to its own coordinates.
    static Archive load(const nlohmann::json& doc);

    /// rule_bin,th_bin,fitness,complexity rows in cell order, with header.
    std::string to_csv() const;

    friend bool operator==(const Archive&, const Archive&) = default;

private:
    GridSpec spec_;
    std::map<CellCoords, ArchiveCell> cells_;
    std::uint64_t next_sequence_ = 0;
};

}  // namespace ruleforge

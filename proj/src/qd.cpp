#include "ruleforge/qd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ruleforge/errors.hpp"

namespace ruleforge {

void GridSpec::validate() const {
    if (max_rules < 1) throw ConfigError("archive needs max_rules >= 1");
    if (threshold_bins < 1) throw ConfigError("archive needs at least one threshold bin");
    if (!(th_max > 0.0) || !std::isfinite(th_max)) throw ConfigError("archive th_max must be positive and finite");
}

CellCoords bin_descriptor(const Descriptor& d, const GridSpec& spec) {
    if (d.rule_count < 1 || d.rule_count > spec.max_rules) {
        throw ValidationError("rule count " + std::to_string(d.rule_count) + " outside archive range [1, " +
                              std::to_string(spec.max_rules) + "]");
    }
    const auto bins = static_cast<double>(spec.threshold_bins);
    const double scaled = std::floor(d.mean_abs_threshold / spec.th_max * bins);
    std::size_t th_bin = spec.threshold_bins - 1;
    if (scaled < bins) th_bin = static_cast<std::size_t>(std::max(scaled, 0.0));
    return {d.rule_count - 1, th_bin};
}

bool ranks_before(const ArchiveCell& a, const ArchiveCell& b) noexcept {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    const auto ca = complexity(a.policy);
    const auto cb = complexity(b.policy);
    if (ca != cb) return ca < cb;
    if (a.inserted_at != b.inserted_at) return a.inserted_at < b.inserted_at;
    return a.sequence < b.sequence;
}

Archive::Archive(GridSpec spec) : spec_(spec) { spec_.validate(); }

const ArchiveCell* Archive::find(CellCoords coords) const {
    const auto it = cells_.find(coords);
    return it == cells_.end() ? nullptr : &it->second;
}

bool Archive::insert(const Policy& policy, double fitness, std::size_t generation, double performance) {
    const auto d = descriptor(policy);
    const auto coords = bin_descriptor(d, spec_);
    const auto it = cells_.find(coords);
    if (it != cells_.end() && !(fitness > it->second.fitness)) return false;
    ArchiveCell cell{policy, fitness, performance, d, generation, next_sequence_++};
    if (it == cells_.end()) {
        cells_.emplace(coords, std::move(cell));
    } else {
        it->second = std::move(cell);
    }
    return true;
}

const ArchiveCell& Archive::best() const {
    if (cells_.empty()) throw UsageError("best() on an empty archive");
    const ArchiveCell* top = nullptr;
    for (const auto& [coords, cell] : cells_) {
        if (top == nullptr || ranks_before(cell, *top)) top = &cell;
    }
    return *top;
}

std::vector<const ArchiveCell*> Archive::ranked() const {
    std::vector<const ArchiveCell*> out;
    out.reserve(cells_.size());
    for (const auto& [coords, cell] : cells_) out.push_back(&cell);
    std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return ranks_before(*a, *b); });
    return out;
}

nlohmann::json Archive::dump() const {
    auto cells = nlohmann::json::array();
    for (const auto& [coords, cell] : cells_) {
        cells.push_back({
            {"coords", {coords.rule_bin, coords.th_bin}},
            {"fitness", cell.fitness},
            {"performance", cell.performance},
            {"generation", cell.inserted_at},
            {"sequence", cell.sequence},
            {"descriptor", {{"rule_count", cell.descriptor.rule_count},
                            {"mean_abs_threshold", cell.descriptor.mean_abs_threshold}}},
            {"policy", policy_to_json(cell.policy)},
        });
    }
    return {
        {"spec", {{"max_rules", spec_.max_rules}, {"threshold_bins", spec_.threshold_bins}, {"th_max", spec_.th_max}}},
        {"next_sequence", next_sequence_},
        {"cells", std::move(cells)},
    };
}

Archive Archive::load(const nlohmann::json& doc) {
    try {
        GridSpec spec;
        const auto& s = doc.at("spec");
        spec.max_rules = s.at("max_rules").get<std::size_t>();
        spec.threshold_bins = s.at("threshold_bins").get<std::size_t>();
        spec.th_max = s.at("th_max").get<double>();
        try {
            spec.validate();
        } catch (const ConfigError& e) {
            throw ParseError(std::string("archive spec: ") + e.what(), 0, 0);
        }
        Archive archive(spec);
        std::uint64_t max_seq = 0;
        for (const auto& c : doc.at("cells")) {
            const auto& xy = c.at("coords");
            if (!xy.is_array() || xy.size() != 2) throw ParseError("archive cell coords must be [rule_bin, th_bin]", 0, 0);
            const CellCoords coords{xy[0].get<std::size_t>(), xy[1].get<std::size_t>()};
            ArchiveCell cell;
            cell.policy = policy_from_json(c.at("policy"));
            cell.fitness = c.at("fitness").get<double>();
            cell.performance = c.value("performance", 0.0);
            cell.inserted_at = c.at("generation").get<std::size_t>();
            cell.sequence = c.value("sequence", std::uint64_t{0});
            cell.descriptor = descriptor(cell.policy);
            if (bin_descriptor(cell.descriptor, spec) != coords) {
                throw ValidationError("archive cell policy does not bin to its stored coordinates");
            }
            if (!archive.cells_.emplace(coords, std::move(cell)).second) {
                throw ParseError("duplicate archive cell", 0, 0);
            }
            max_seq = std::max(max_seq, archive.cells_.at(coords).sequence + 1);
        }
        archive.next_sequence_ = doc.value("next_sequence", max_seq);
        return archive;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed archive document: ") + e.what(), 0, 0);
    }
}

std::string Archive::to_csv() const {
    std::string out = "rule_bin,th_bin,fitness,complexity\n";
    char buf[128];
    for (const auto& [coords, cell] : cells_) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%zu\n", coords.rule_bin, coords.th_bin, cell.fitness,
                      complexity(cell.policy));
        out += buf;
    }
    return out;
}

}  // namespace ruleforge

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hfc {

// Two-level label hierarchy: T types, N items, each item assigned to exactly
// one type. The item→type map is the part that changes when items are
// re-clustered between training iterations.
struct LabelTaxonomy {
    std::vector<std::string> type_names;
    std::vector<std::string> item_names;
    std::vector<int> item_to_type;

    int type_count() const { return static_cast<int>(type_names.size()); }
    int item_count() const { return static_cast<int>(item_names.size()); }

    // Throws ValidationError on any structural violation.
    void validate() const;

    nlohmann::json to_json() const;
    static LabelTaxonomy from_json(const nlohmann::json& j);

    bool operator==(const LabelTaxonomy&) const = default;
};

// The built-in 4x8 desk-scale taxonomy; falls back to generic names for
// other type counts.
LabelTaxonomy default_taxonomy(int types, int items_per_type);

} // namespace hfc

#include "hfc/taxonomy.hpp"

#include <set>

#include "hfc/errors.hpp"

namespace hfc {

void LabelTaxonomy::validate() const {
    if (type_count() < 2) throw ValidationError("taxonomy needs at least 2 types");
    if (item_count() < type_count())
        throw ValidationError("taxonomy needs at least as many items as types");
    if (static_cast<int>(item_to_type.size()) != item_count())
        throw ValidationError("item_to_type must assign every item exactly once");
    std::vector<int> members(type_names.size(), 0);
    for (size_t i = 0; i < item_to_type.size(); ++i) {
        const int t = item_to_type[i];
        if (t < 0 || t >= type_count())
            throw ValidationError("item '" + item_names[i] + "' maps to unknown type index " +
                                  std::to_string(t));
        members[t] += 1;
    }
    for (size_t t = 0; t < members.size(); ++t)
        if (members[t] == 0)
            throw ValidationError("type '" + type_names[t] + "' has no items");
    std::set<std::string> unique_items(item_names.begin(), item_names.end());
    if (unique_items.size() != item_names.size())
        throw ValidationError("item names must be unique");
}

nlohmann::json LabelTaxonomy::to_json() const {
    return {{"type_names", type_names}, {"item_names", item_names}, {"item_to_type", item_to_type}};
}

LabelTaxonomy LabelTaxonomy::from_json(const nlohmann::json& j) {
    LabelTaxonomy t;
    t.type_names = j.at("type_names").get<std::vector<std::string>>();
    t.item_names = j.at("item_names").get<std::vector<std::string>>();
    t.item_to_type = j.at("item_to_type").get<std::vector<int>>();
    t.validate();
    return t;
}

LabelTaxonomy default_taxonomy(int types, int items_per_type) {
    static const char* kFourTypes[] = {"main_dish", "rice", "soup", "side_dish"};
    LabelTaxonomy tax;
    for (int t = 0; t < types; ++t) {
        std::string name = (types == 4) ? kFourTypes[t] : "type_" + std::to_string(t);
        tax.type_names.push_back(name);
        for (int k = 0; k < items_per_type; ++k) {
            tax.item_names.push_back(name + "_item_" + std::to_string(k));
            tax.item_to_type.push_back(t);
        }
    }
    tax.validate();
    return tax;
}

} // namespace hfc

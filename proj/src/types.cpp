#include "mta/types.hpp"

#include <map>

namespace mta {

CatalogValidation validate_catalog(const std::vector<LineItemMeta>& catalog) {
  CatalogValidation result;
  std::map<std::string, const LineItemMeta*> by_line_item;
  std::map<std::string, std::string> io_to_advertiser;

  for (const auto& meta : catalog) {
    auto [it, inserted] = by_line_item.emplace(meta.line_item_id, &meta);
    if (!inserted) {
      const LineItemMeta& prev = *it->second;
      result.violations.push_back(
          {CatalogViolation::Kind::duplicate_line_item, meta.line_item_id,
           "already mapped to io=" + prev.insertion_order_id +
               " advertiser=" + prev.advertiser_id});
      continue;
    }
    auto [io_it, io_inserted] =
        io_to_advertiser.emplace(meta.insertion_order_id, meta.advertiser_id);
    if (!io_inserted && io_it->second != meta.advertiser_id) {
      result.violations.push_back(
          {CatalogViolation::Kind::orphan_insertion_order,
           meta.insertion_order_id,
           "mapped to both advertiser=" + io_it->second +
               " and advertiser=" + meta.advertiser_id});
    }
  }
  return result;
}

}  // namespace mta

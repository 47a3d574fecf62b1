#include "herdscope/types.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "herdscope/error.hpp"

namespace herdscope {
namespace {

constexpr std::array<std::pair<Category, std::string_view>, 6> kCategoryNames{{
    {Category::auto_loan, "auto"},
    {Category::personal, "personal"},
    {Category::business, "business"},
    {Category::student, "student"},
    {Category::home_improvement, "home_improvement"},
    {Category::debt_consolidation, "debt_consolidation"},
}};

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [value, name] : kCategoryNames) {
    if (value == c) return name;
  }
  return "personal";
}

std::optional<Category> parse_category(std::string_view text) {
  for (const auto& [value, name] : kCategoryNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::string_view to_string(Outcome o) { return o == Outcome::repaid ? "repaid" : "defaulted"; }

std::optional<Outcome> parse_outcome(std::string_view text) {
  if (text == "repaid") return Outcome::repaid;
  if (text == "defaulted") return Outcome::defaulted;
  return std::nullopt;
}

void ListingTable::insert(Listing listing) {
  auto [it, inserted] = index_.emplace(listing.listing_id, rows_.size());
  if (!inserted) throw ValidationError("duplicate listing_id " + listing.listing_id.str());
  rows_.push_back(std::move(listing));
}

const Listing* ListingTable::find(const ListingId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

const Listing& ListingTable::at(const ListingId& id) const {
  const Listing* l = find(id);
  if (l == nullptr) throw ValidationError("unknown listing_id " + id.str());
  return *l;
}

std::vector<ListingId> ListingTable::sorted_ids() const {
  std::vector<ListingId> ids;
  ids.reserve(index_.size());
  for (const auto& [id, _] : index_) ids.push_back(id);
  return ids;
}

ContributionTable::ContributionTable(const ListingTable& listings) {
  for (const auto& l : listings.rows()) by_listing_[l.listing_id];
}

void ContributionTable::insert(Contribution c) {
  auto it = by_listing_.find(c.listing_id);
  if (it == by_listing_.end()) throw ValidationError("orphan listing_id " + c.listing_id.str());
  it->second.push_back(rows_.size());
  rows_.push_back(std::move(c));
}

std::size_t ContributionTable::count(const ListingId& id) const {
  auto it = by_listing_.find(id);
  return it == by_listing_.end() ? 0 : it->second.size();
}

std::vector<Contribution> ContributionTable::of_listing(const ListingId& id) const {
  auto it = by_listing_.find(id);
  if (it == by_listing_.end()) throw ValidationError("unknown listing_id " + id.str());
  std::vector<Contribution> out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(rows_[i]);
  return out;
}

bool contribution_order_less(const Contribution& a, const Contribution& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  if (a.input_index != b.input_index) return a.input_index < b.input_index;
  return a.lender_id < b.lender_id;
}

void sort_contributions(std::vector<Contribution>& contributions) {
  std::sort(contributions.begin(), contributions.end(), contribution_order_less);
}

std::vector<Contribution> order_contributions(const ListingId& listing_id, const ContributionTable& table) {
  auto out = table.of_listing(listing_id);
  sort_contributions(out);
  return out;
}

}  // namespace herdscope

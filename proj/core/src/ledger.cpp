#include "herdscope/ledger.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace herdscope {
namespace {

bool entry_less(const LedgerEntry& a, const LedgerEntry& b) {
  if (a.listing_created_at != b.listing_created_at) return a.listing_created_at < b.listing_created_at;
  return a.listing_id < b.listing_id;
}

}  // namespace

void LenderLedger::add(const LenderId& lender, LedgerEntry entry) {
  auto& list = entries_[lender];
  auto same = std::find_if(list.begin(), list.end(), [&](const LedgerEntry& e) { return e.listing_id == entry.listing_id; });
  if (same != list.end()) {
    same->first_contribution = std::min(same->first_contribution, entry.first_contribution);
    return;
  }
  list.insert(std::upper_bound(list.begin(), list.end(), entry, entry_less), std::move(entry));
}

LenderLedger LenderLedger::build(const ListingTable& listings, const ContributionTable& contributions) {
  // Earliest contribution per (lender, listing).
  std::map<std::pair<LenderId, ListingId>, Instant> first;
  for (const auto& c : contributions.rows()) {
    auto [it, inserted] = first.emplace(std::make_pair(c.lender_id, c.listing_id), c.timestamp);
    if (!inserted) it->second = std::min(it->second, c.timestamp);
  }
  LenderLedger ledger;
  for (const auto& [key, ts] : first) {
    const Listing& l = listings.at(key.second);
    ledger.entries_[key.first].push_back({l.listing_id, l.created_at, ts, l.outcome, l.outcome_resolved_at});
  }
  for (auto& [_, list] : ledger.entries_) std::sort(list.begin(), list.end(), entry_less);
  return ledger;
}

std::optional<double> LenderLedger::prior_success(const LenderId& lender, Instant at, PriorSuccessPolicy policy,
                                                  const ListingId* current) const {
  auto it = entries_.find(lender);
  if (it == entries_.end()) return std::nullopt;
  std::size_t repaid = 0;
  std::size_t total = 0;
  for (const auto& e : it->second) {
    if (e.listing_created_at >= at) break;
    if (current != nullptr && e.listing_id == *current) continue;
    if (policy == PriorSuccessPolicy::resolved_only && !(e.outcome_resolved_at && *e.outcome_resolved_at < at)) {
      continue;
    }
    ++total;
    if (e.outcome == Outcome::repaid) ++repaid;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(repaid) / static_cast<double>(total);
}

std::span<const LedgerEntry> LenderLedger::entries(const LenderId& lender) const {
  auto it = entries_.find(lender);
  if (it == entries_.end()) return {};
  return it->second;
}

}  // namespace herdscope

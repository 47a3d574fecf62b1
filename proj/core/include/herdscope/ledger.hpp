#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "herdscope/metrics_config.hpp"
#include "herdscope/types.hpp"

namespace herdscope {

struct LedgerEntry {
  ListingId listing_id;
  Instant listing_created_at{};
  Instant first_contribution{};
  Outcome outcome = Outcome::repaid;
  std::optional<Instant> outcome_resolved_at;
};

/// Per-lender track record: one entry per (lender, listing), ordered by
/// listing creation time (then listing id). Immutable once built.
class LenderLedger {
 public:
  static LenderLedger build(const ListingTable& listings, const ContributionTable& contributions);

  /// Fraction of the lender's earlier listings that were repaid, as seen
  /// at instant `at`. A listing counts when created before `at`; under
  /// resolved_only it must also have resolved before `at`. The listing
  /// the decision is being made on (`current`, when given) never counts.
  /// Undefined for unknown lenders and empty histories.
  std::optional<double> prior_success(const LenderId& lender, Instant at, PriorSuccessPolicy policy,
                                      const ListingId* current = nullptr) const;

  std::span<const LedgerEntry> entries(const LenderId& lender) const;
  std::size_t lender_count() const noexcept { return entries_.size(); }

  /// Adds one entry, keeping the lender's list ordered. Used by build()
  /// and by tests scripting a ledger by hand. A repeated (lender, listing)
  /// pair keeps the earliest contribution.
  void add(const LenderId& lender, LedgerEntry entry);

 private:
  std::unordered_map<LenderId, std::vector<LedgerEntry>> entries_;
};

}  // namespace herdscope

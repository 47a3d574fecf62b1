#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace herdscope {

/// Opaque string identifier, distinct per tag so listing and lender ids
/// cannot be mixed up.
template <class Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

 private:
  std::string value_;
};

using ListingId = Id<struct ListingTag>;
using LenderId = Id<struct LenderTag>;

using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

enum class Category { auto_loan, personal, business, student, home_improvement, debt_consolidation };
enum class Outcome { repaid, defaulted };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);
std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view text);

inline constexpr int kMinCreditGrade = 2;
inline constexpr int kMaxCreditGrade = 8;
inline constexpr int kMinProsperScore = 1;
inline constexpr int kMaxProsperScore = 11;

struct Listing {
  ListingId listing_id;
  Instant created_at{};
  std::int64_t amount_requested_cents = 0;
  Category category = Category::personal;
  int year = 0;
  double description_words = 0.0;
  bool homeowner = false;
  double debt_to_income = 0.0;
  int credit_grade = kMinCreditGrade;
  int prosper_score = kMinProsperScore;
  Outcome outcome = Outcome::repaid;
  std::optional<Instant> outcome_resolved_at;

  double description_length_hundreds() const noexcept { return description_words / 100.0; }
  bool repaid() const noexcept { return outcome == Outcome::repaid; }

  friend bool operator==(const Listing&, const Listing&) = default;
};

struct Contribution {
  ListingId listing_id;
  LenderId lender_id;
  Instant timestamp{};
  std::int64_t amount_cents = 0;
  std::size_t input_index = 0;

  friend bool operator==(const Contribution&, const Contribution&) = default;
};

class ListingTable {
 public:
  /// Throws ValidationError on a duplicate listing_id.
  void insert(Listing listing);

  const Listing* find(const ListingId& id) const;
  const Listing& at(const ListingId& id) const;
  bool contains(const ListingId& id) const { return index_.contains(id); }

  /// Listings in insertion order.
  std::span<const Listing> rows() const noexcept { return rows_; }
  /// Listing ids in ascending lexicographic order.
  std::vector<ListingId> sorted_ids() const;
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  friend bool operator==(const ListingTable& a, const ListingTable& b) { return a.rows_ == b.rows_; }

 private:
  std::vector<Listing> rows_;
  std::map<ListingId, std::size_t> index_;
};

class ContributionTable {
 public:
  ContributionTable() = default;
  /// Every listing in `listings` is registered, including listings that end
  /// up with no contributions.
  explicit ContributionTable(const ListingTable& listings);

  /// Throws ValidationError if the listing is unknown.
  void insert(Contribution c);

  std::span<const Contribution> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool has_listing(const ListingId& id) const { return by_listing_.contains(id); }
  std::size_t count(const ListingId& id) const;

  /// Contributions of one listing in storage order (not yet ordered).
  std::vector<Contribution> of_listing(const ListingId& id) const;

  friend bool operator==(const ContributionTable& a, const ContributionTable& b) { return a.rows_ == b.rows_; }

 private:
  std::vector<Contribution> rows_;
  std::map<ListingId, std::vector<std::size_t>> by_listing_;
};

/// Strict weak ordering used for "consecutive" contributions: timestamp,
/// then input_index, then lender_id.
bool contribution_order_less(const Contribution& a, const Contribution& b);

/// Sorts a listing's contributions into the canonical total order.
/// Throws ValidationError for a listing unknown to the table.
std::vector<Contribution> order_contributions(const ListingId& listing_id, const ContributionTable& table);

/// Sorts an arbitrary contribution sequence in place into canonical order.
void sort_contributions(std::vector<Contribution>& contributions);

}  // namespace herdscope

template <class Tag>
struct std::hash<herdscope::Id<Tag>> {
  std::size_t operator()(const herdscope::Id<Tag>& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};

#include "herdscope/ingest.hpp"

#include <array>
#include <variant>
#include <fstream>
#include <istream>
#include <ostream>

#include "csv.hpp"
#include "herdscope/error.hpp"
#include "herdscope/time.hpp"
#include "numfmt.hpp"

namespace herdscope {
namespace {

using detail::parse_int;
using detail::parse_real;
using detail::trim;

struct FieldError {
  std::string column;
  std::string reason;
};

constexpr std::array<std::string_view, 11> kListingRequired{
    "listing_id",     "created_at",   "amount_requested_cents", "category",      "year",   "description_words",
    "homeowner",      "debt_to_income", "credit_grade",         "prosper_score", "outcome"};
constexpr std::array<std::string_view, 4> kContributionRequired{"listing_id", "lender_id", "timestamp", "amount_cents"};

template <std::size_t N>
std::array<std::size_t, N> require_columns(const csv::Reader& reader, const std::array<std::string_view, N>& names) {
  std::array<std::size_t, N> idx{};
  for (std::size_t i = 0; i < N; ++i) {
    auto c = reader.column(names[i]);
    if (!c) throw ValidationError("missing required column " + std::string(names[i]));
    idx[i] = *c;
  }
  return idx;
}

std::optional<bool> parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  return std::nullopt;
}

std::string describe(std::size_t row, const FieldError& e) {
  return "row " + std::to_string(row) + ", column " + e.column + ": " + e.reason;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

// Returns the listing or the first field error of the row.
std::variant<Listing, FieldError> read_listing(const csv::Reader& r, const std::array<std::size_t, 11>& c,
                                                std::optional<std::size_t> resolved_col) {
  Listing l;
  const auto id = trim(r.get(c[0]));
  if (id.empty()) return FieldError{"listing_id", "empty listing_id"};
  l.listing_id = ListingId(std::string(id));

  auto created = parse_instant(trim(r.get(c[1])));
  if (!created) return FieldError{"created_at", "unparsable created_at"};
  l.created_at = *created;

  auto amount = parse_int<std::int64_t>(r.get(c[2]));
  if (!amount) return FieldError{"amount_requested_cents", "amount_requested_cents is not an integer"};
  if (*amount <= 0) return FieldError{"amount_requested_cents", "amount_requested_cents must be positive"};
  l.amount_requested_cents = *amount;

  auto category = parse_category(trim(r.get(c[3])));
  if (!category) return FieldError{"category", "unknown category"};
  l.category = *category;

  auto year = parse_int<int>(r.get(c[4]));
  if (!year) return FieldError{"year", "year is not an integer"};
  l.year = *year;

  auto words = parse_real(r.get(c[5]));
  if (!words || *words < 0) return FieldError{"description_words", "description_words must be a non-negative number"};
  l.description_words = *words;

  auto homeowner = parse_bool(r.get(c[6]));
  if (!homeowner) return FieldError{"homeowner", "homeowner must be one of 0,1,true,false"};
  l.homeowner = *homeowner;

  auto dti = parse_real(r.get(c[7]));
  if (!dti || *dti < 0) return FieldError{"debt_to_income", "debt_to_income must be a non-negative number"};
  l.debt_to_income = *dti;

  auto grade = parse_int<int>(r.get(c[8]));
  if (!grade) return FieldError{"credit_grade", "credit_grade is not an integer"};
  if (*grade < kMinCreditGrade || *grade > kMaxCreditGrade) return FieldError{"credit_grade", "credit_grade out of [2,8]"};
  l.credit_grade = *grade;

  auto score = parse_int<int>(r.get(c[9]));
  if (!score) return FieldError{"prosper_score", "prosper_score is not an integer"};
  if (*score < kMinProsperScore || *score > kMaxProsperScore) {
    return FieldError{"prosper_score", "prosper_score out of [1,11]"};
  }
  l.prosper_score = *score;

  auto outcome = parse_outcome(trim(r.get(c[10])));
  if (!outcome) return FieldError{"outcome", "outcome must be repaid or defaulted"};
  l.outcome = *outcome;

  if (resolved_col) {
    const auto text = trim(r.get(*resolved_col));
    if (!text.empty()) {
      auto resolved = parse_instant(text);
      if (!resolved) return FieldError{"outcome_resolved_at", "unparsable outcome_resolved_at"};
      l.outcome_resolved_at = *resolved;
    }
  }
  return l;
}

std::variant<Contribution, FieldError> read_contribution(const csv::Reader& r, const std::array<std::size_t, 4>& c,
                                                          const ListingTable& listings) {
  Contribution out;
  const auto listing_id = trim(r.get(c[0]));
  if (listing_id.empty()) return FieldError{"listing_id", "empty listing_id"};
  out.listing_id = ListingId(std::string(listing_id));
  const Listing* listing = listings.find(out.listing_id);
  if (listing == nullptr) return FieldError{"listing_id", "orphan listing_id"};

  const auto lender = trim(r.get(c[1]));
  if (lender.empty()) return FieldError{"lender_id", "empty lender_id"};
  out.lender_id = LenderId(std::string(lender));

  auto ts = parse_instant(trim(r.get(c[2])));
  if (!ts) return FieldError{"timestamp", "unparsable timestamp"};
  if (*ts < listing->created_at) return FieldError{"timestamp", "timestamp before listing created_at"};
  out.timestamp = *ts;

  auto amount = parse_int<std::int64_t>(r.get(c[3]));
  if (!amount) return FieldError{"amount_cents", "amount_cents must be an integer number of cents"};
  if (*amount < 1) return FieldError{"amount_cents", "amount_cents must be positive"};
  out.amount_cents = *amount;
  return out;
}

}  // namespace

Parsed<ListingTable> parse_listings(std::istream& in, Strictness strictness) {
  csv::Reader reader(in);
  if (!reader.read_header()) throw ValidationError("listings file has no header row");
  const auto cols = require_columns(reader, kListingRequired);
  const auto resolved_col = reader.column("outcome_resolved_at");

  Parsed<ListingTable> out;
  while (reader.next()) {
    auto parsed = read_listing(reader, cols, resolved_col);
    std::optional<FieldError> error;
    if (auto* e = std::get_if<FieldError>(&parsed)) {
      error = *e;
    } else if (out.table.contains(std::get<Listing>(parsed).listing_id)) {
      error = FieldError{"listing_id", "duplicate listing_id"};
    }
    if (error) {
      if (strictness == Strictness::strict) throw ValidationError(describe(reader.line(), *error));
      out.rejections.push_back({reader.line(), error->column, error->reason});
      continue;
    }
    out.table.insert(std::move(std::get<Listing>(parsed)));
  }
  return out;
}

Parsed<ListingTable> parse_listings(const std::filesystem::path& path, Strictness strictness) {
  auto in = open_input(path);
  return parse_listings(in, strictness);
}

Parsed<ContributionTable> parse_contributions(std::istream& in, const ListingTable& listings, Strictness strictness) {
  csv::Reader reader(in);
  if (!reader.read_header()) throw ValidationError("contributions file has no header row");
  const auto cols = require_columns(reader, kContributionRequired);

  Parsed<ContributionTable> out{ContributionTable(listings), {}};
  std::size_t data_row = 0;
  while (reader.next()) {
    const std::size_t input_index = data_row++;
    auto parsed = read_contribution(reader, cols, listings);
    if (auto* e = std::get_if<FieldError>(&parsed)) {
      if (strictness == Strictness::strict) throw ValidationError(describe(reader.line(), *e));
      out.rejections.push_back({reader.line(), e->column, e->reason});
      continue;
    }
    auto c = std::get<Contribution>(std::move(parsed));
    c.input_index = input_index;
    out.table.insert(std::move(c));
  }
  return out;
}

Parsed<ContributionTable> parse_contributions(const std::filesystem::path& path, const ListingTable& listings,
                                              Strictness strictness) {
  auto in = open_input(path);
  return parse_contributions(in, listings, strictness);
}

void write_listings_csv(std::ostream& out, const ListingTable& listings) {
  csv::write_row(out, {"listing_id", "created_at", "amount_requested_cents", "category", "year", "description_words",
                       "homeowner", "debt_to_income", "credit_grade", "prosper_score", "outcome",
                       "outcome_resolved_at"});
  for (const auto& l : listings.rows()) {
    csv::write_row(out, {l.listing_id.str(), format_instant(l.created_at), std::to_string(l.amount_requested_cents),
                         std::string(to_string(l.category)), std::to_string(l.year),
                         detail::format_real(l.description_words), l.homeowner ? "1" : "0",
                         detail::format_real(l.debt_to_income), std::to_string(l.credit_grade),
                         std::to_string(l.prosper_score), std::string(to_string(l.outcome)),
                         l.outcome_resolved_at ? format_instant(*l.outcome_resolved_at) : std::string()});
  }
}

void write_contributions_csv(std::ostream& out, const ContributionTable& contributions) {
  csv::write_row(out, {"listing_id", "lender_id", "timestamp", "amount_cents"});
  for (const auto& c : contributions.rows()) {
    csv::write_row(out, {c.listing_id.str(), c.lender_id.str(), format_instant(c.timestamp),
                         std::to_string(c.amount_cents)});
  }
}

void write_rejections_csv(std::ostream& out, const std::vector<Rejection>& rejections) {
  csv::write_row(out, {"row", "column", "reason"});
  for (const auto& r : rejections) csv::write_row(out, {std::to_string(r.row), r.column, r.reason});
}

}  // namespace herdscope

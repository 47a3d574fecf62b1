#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "herdscope/types.hpp"

namespace herdscope {

enum class Strictness { strict, skip_invalid };

/// One rejected input row. `row` is the 1-based line number in the file,
/// counting the header as line 1.
struct Rejection {
  std::size_t row = 0;
  std::string column;
  std::string reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

template <class Table>
struct Parsed {
  Table table;
  std::vector<Rejection> rejections;
};

/// Reads listings.csv. In strict mode the first invalid row throws a
/// ValidationError naming the row and field; in skip_invalid mode invalid
/// rows are collected as rejections. A missing required column or an
/// unreadable file always throws.
Parsed<ListingTable> parse_listings(std::istream& in, Strictness strictness = Strictness::strict);
Parsed<ListingTable> parse_listings(const std::filesystem::path& path, Strictness strictness = Strictness::strict);

/// Reads contributions.csv, checking every row against `listings`.
Parsed<ContributionTable> parse_contributions(std::istream& in, const ListingTable& listings,
                                              Strictness strictness = Strictness::strict);
Parsed<ContributionTable> parse_contributions(const std::filesystem::path& path, const ListingTable& listings,
                                              Strictness strictness = Strictness::strict);

/// Canonical writers; parse(write(t)) == t for valid tables.
void write_listings_csv(std::ostream& out, const ListingTable& listings);
void write_contributions_csv(std::ostream& out, const ContributionTable& contributions);
void write_rejections_csv(std::ostream& out, const std::vector<Rejection>& rejections);

}  // namespace herdscope

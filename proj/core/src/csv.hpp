#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace herdscope::csv {

/// Minimal RFC 4180 reader: comma separated, double-quote escaping,
/// CRLF tolerant. Quoted fields may not span lines.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Reads the header row; false on empty input.
  bool read_header();
  /// Reads the next record; false at end of input. Blank lines are skipped.
  bool next();

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::string>& fields() const noexcept { return fields_; }
  /// 1-based line number of the current record.
  std::size_t line() const noexcept { return line_; }

  std::optional<std::size_t> column(std::string_view name) const;
  /// Field by column index; empty when the record is short.
  std::string_view get(std::size_t column) const;

 private:
  bool read_line(std::string& line);

  std::istream& in_;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace herdscope::csv

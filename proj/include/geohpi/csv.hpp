// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geohpi::csv {

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line endings,
/// newlines inside quotes. A leading UTF-8 byte-order mark is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  /// Physical line on which the last record returned by next() started (1-based).
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool started_ = false;
};

/// Quotes a field when it contains a separator, quote or line break.
std::string escape(std::string_view field);

/// Shortest decimal string that round-trips `value`.
std::string format_double(double value);

}  // namespace geohpi::csv

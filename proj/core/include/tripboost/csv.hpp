#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tripboost {

/// Minimal RFC-4180 style CSV: comma separator, double-quote quoting with
/// `""` escapes, quoted fields may span lines. A trailing `\r` is stripped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// `line_number()` afterwards reports the line the record started on.
  bool next(std::vector<std::string>& fields);

  std::size_t line_number() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Quotes a field only when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Writes through a temporary sibling file and renames it into place, so a
/// failure part-way never leaves a partial `path`. The writer callback may
/// throw; the temporary is removed in that case.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace tripboost

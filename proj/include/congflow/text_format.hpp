#pragma once

#include <string>
#include <vector>

namespace congflow {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

// Rows joined with commas, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  const std::string& str() const { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

// Writes via a temporary file in the same directory and renames it into
// place, so a failed run never leaves a partial output file.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace congflow

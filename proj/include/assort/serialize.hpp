#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace assort::io {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);

void write_doubles(std::ostream& out, std::span<const double> values);

// Line-oriented reader for the text artifacts. Errors name the artifact
// and line.
class LineReader {
 public:
  LineReader(std::istream& in, std::string artifact) : in_(in), artifact_(std::move(artifact)) {}

  // Next non-empty line split on single spaces.
  std::vector<std::string> fields();
  // Next line; throws if it does not start with `keyword`.
  std::vector<std::string> expect(std::string_view keyword, std::size_t min_fields = 1);
  std::vector<double> doubles(const std::vector<std::string>& f, std::size_t from, std::size_t count);

  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::istream& in_;
  std::string artifact_;
  std::size_t line_ = 0;
};

}  // namespace assort::io

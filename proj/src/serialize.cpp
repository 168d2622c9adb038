#include "assort/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "assort/error.hpp"

namespace assort::io {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw DataError("not a number: '" + std::string(text) + "'");
  return value;
}

void write_doubles(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << format_double(values[i]);
  }
}

std::vector<std::string> LineReader::fields() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.empty()) continue;
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t space = line.find(' ', start);
      const std::size_t end = space == std::string::npos ? line.size() : space;
      if (end > start) out.push_back(line.substr(start, end - start));
      if (space == std::string::npos) break;
      start = space + 1;
    }
    if (!out.empty()) return out;
  }
  fail("unexpected end of file");
}

std::vector<std::string> LineReader::expect(std::string_view keyword, std::size_t min_fields) {
  auto f = fields();
  if (f[0] != keyword) fail("expected '" + std::string(keyword) + "', found '" + f[0] + "'");
  if (f.size() < min_fields) fail("too few fields after '" + std::string(keyword) + "'");
  return f;
}

std::vector<double> LineReader::doubles(const std::vector<std::string>& f, std::size_t from, std::size_t count) {
  if (f.size() != from + count)
    fail("expected " + std::to_string(count) + " values, found " + std::to_string(f.size() - from));
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = from; i < f.size(); ++i) {
    try {
      out.push_back(parse_double(f[i]));
    } catch (const DataError& e) {
      fail(e.what());
    }
    if (!std::isfinite(out.back())) fail("non-finite parameter");
  }
  return out;
}

void LineReader::fail(const std::string& what) const {
  throw DataError(artifact_ + " line " + std::to_string(line_) + ": " + what);
}

}  // namespace assort::io

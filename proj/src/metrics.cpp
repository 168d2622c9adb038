#include "assort/metrics.hpp"

#include <set>
#include <string>

#include "assort/error.hpp"

namespace assort {

Metrics Metrics::from_counts(const Counts& c) {
  Metrics m;
  m.counts = c;
  if (c.gold == 0 && c.predicted == 0) {
    m.precision = m.recall = m.f1 = 1.0;
    return m;
  }
  m.precision = c.predicted == 0 ? 0.0 : static_cast<double>(c.overlap) / static_cast<double>(c.predicted);
  m.recall = c.gold == 0 ? 0.0 : static_cast<double>(c.overlap) / static_cast<double>(c.gold);
  const double sum = m.precision + m.recall;
  m.f1 = sum > 0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

Counts count(std::span<const std::size_t> gold, std::span<const std::size_t> predicted) {
  const std::set<std::size_t> g(gold.begin(), gold.end());
  const std::set<std::size_t> m(predicted.begin(), predicted.end());
  Counts c;
  c.gold = g.size();
  c.predicted = m.size();
  for (std::size_t i : m) c.overlap += g.count(i);
  return c;
}

Metrics metrics(std::span<const std::size_t> gold, std::span<const std::size_t> predicted) {
  return Metrics::from_counts(count(gold, predicted));
}

std::string_view to_string(Averaging a) { return a == Averaging::kMicro ? "micro" : "macro"; }

Averaging parse_averaging(std::string_view s) {
  if (s == "micro") return Averaging::kMicro;
  if (s == "macro") return Averaging::kMacro;
  throw UsageError("unknown averaging '" + std::string(s) + "' (expected micro or macro)");
}

Metrics aggregate(std::span<const Counts> items, Averaging averaging) {
  Counts pooled;
  for (const Counts& c : items) pooled += c;
  if (averaging == Averaging::kMicro || items.empty()) return Metrics::from_counts(pooled);
  Metrics out;
  out.counts = pooled;
  for (const Counts& c : items) {
    const Metrics m = Metrics::from_counts(c);
    out.precision += m.precision;
    out.recall += m.recall;
    out.f1 += m.f1;
  }
  const double n = static_cast<double>(items.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

}  // namespace assort

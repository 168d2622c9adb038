#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace assort {

// Sentence-level tallies: |G|, |M|, |G ∩ M|.
struct Counts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t overlap = 0;

  Counts& operator+=(const Counts& other) {
    gold += other.gold;
    predicted += other.predicted;
    overlap += other.overlap;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Counts counts;

  // P = |G∩M|/|M|, R = |G∩M|/|G|, F1 = 2PR/(P+R). Empty M scores 0 unless
  // G is empty too, which scores 1 throughout; the same holds for R.
  static Metrics from_counts(const Counts& counts);
  bool operator==(const Metrics&) const = default;
};

// Both inputs are index lists; duplicates are ignored.
Counts count(std::span<const std::size_t> gold, std::span<const std::size_t> predicted);
Metrics metrics(std::span<const std::size_t> gold, std::span<const std::size_t> predicted);

enum class Averaging { kMicro, kMacro };

std::string_view to_string(Averaging a);
Averaging parse_averaging(std::string_view s);

// Micro pools the counts; macro takes the mean of per-item P, R and F1
// (counts are still the pooled totals).
Metrics aggregate(std::span<const Counts> items, Averaging averaging);

}  // namespace assort

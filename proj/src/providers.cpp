#include "assort/providers.hpp"

#include <cctype>
#include <cmath>

namespace assort {

bool NliDistribution::valid(double tolerance) const {
  for (double p : {entail, contradict, neutral})
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) return false;
  return std::abs(entail + contradict + neutral - 1.0) <= tolerance;
}

std::size_t EmbeddingProvider::warm(std::span<const std::string>) const { return 0; }

std::size_t count_tokens(std::string_view text) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::string truncate_tokens(std::string_view text, std::size_t budget) {
  std::size_t n = 0;
  std::size_t end = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
    if (!space && !in_token) {
      if (n == budget) return std::string(text.substr(0, end));
      ++n;
    }
    in_token = !space;
    if (!space) end = i + 1;
  }
  return std::string(text);
}

}  // namespace assort

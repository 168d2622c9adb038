#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "assort/types.hpp"

namespace assort {

// Reads a line-delimited corpus file:
//   {"kind":"q","id":..,"title":..,"tags":[..],"type":"howto|conceptual|bugfix"}
//   {"kind":"a","id":..,"qid":..,"html":..,"gold":[..]}
// Post HTML is parsed into sentences on load; posts without prose are
// skipped. Throws DataError naming the offending line.
LabeledCorpus load_corpus(const std::filesystem::path& path);
LabeledCorpus parse_corpus(std::istream& in);

// Inverse of parse_corpus for the fields the file format carries.
void write_corpus(std::ostream& out, const LabeledCorpus& corpus);

struct SplitRatios {
  unsigned train = 8;
  unsigned dev = 1;
  unsigned test = 1;
};

// Stratified per question type. Each type needs at least 10 posts.
DataSplit split_corpus(const LabeledCorpus& corpus, SplitRatios ratios, std::uint64_t seed);

// k stratified folds. Split i tests on fold i, tunes on fold i+1 (k >= 3),
// and trains on the rest.
std::vector<DataSplit> kfold(const LabeledCorpus& corpus, std::size_t k, std::uint64_t seed);

// Keeps ceil(fraction * N) posts, taken as a prefix of one seeded
// type-interleaved shuffle, so smaller fractions are subsets of larger
// ones and every type present in the corpus appears as early as possible.
LabeledCorpus subsample(const LabeledCorpus& corpus, double fraction, std::uint64_t seed);

// The post ids in subsample order; exposed for nesting audits.
std::vector<std::string> subsample_order(const LabeledCorpus& corpus, std::uint64_t seed);

// Restricts the corpus to the given posts (in the given order) and the
// questions they reference.
LabeledCorpus select_posts(const LabeledCorpus& corpus, const std::vector<std::string>& ids);

std::optional<QuestionType> post_type(const LabeledCorpus& corpus, const AnswerPost& post);

}  // namespace assort

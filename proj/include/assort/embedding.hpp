#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "assort/gateway.hpp"
#include "assort/providers.hpp"
#include "assort/types.hpp"

namespace assort {

inline constexpr std::size_t kDefaultEmbeddingDim = 768;

// Bag-of-tokens hash embedding. The vector is a pure function of
// (seed, token multiset, dim):
//   tokens  = word_tokens(text), sorted bytewise; {""} when empty
//   v[j]    = sum over tokens t of  2 * u(splitmix64(fnv1a64(t) ^ splitmix64(seed + j))) - 1
//   u(x)    = (x >> 11) * 2^-53
//   result  = v / ||v||  (accumulated left to right)
// The inference sidecar's stub mode reproduces this bit for bit.
class StubEmbedder final : public EmbeddingProvider {
 public:
  explicit StubEmbedder(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = 0);

  static EmbeddingVector vector_for(std::string_view text, std::uint64_t seed, std::size_t dim);

  std::size_t dimension() const override { return dim_; }
  std::string fingerprint() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

std::uint64_t fnv1a64(std::string_view data);

// Append-only on-disk store of (text digest, dim, vector) records behind a
// header that pins the dimension and backing identity:
//   assort-embedding-cache 1 dim=<D> backing=<identity>
//   <sha256 hex> <D> <v_0> ... <v_{D-1}>
// Values use shortest round-trip decimal, so reloads are bitwise equal.
// Thread-safe; writes are serialized.
class EmbeddingCache {
 public:
  // Opens or creates `path`. An existing file must match `dim`; when
  // `identity` is non-empty it must match too.
  EmbeddingCache(std::filesystem::path path, std::size_t dim, std::string identity);

  // Read-only view of an existing file (the precomputed-file backing).
  static std::unique_ptr<EmbeddingCache> open_existing(const std::filesystem::path& path);

  std::optional<EmbeddingVector> lookup(const std::string& digest) const;
  // Returns false if the digest was already present.
  bool insert(const std::string& digest, const EmbeddingVector& vector);

  std::size_t dim() const { return dim_; }
  const std::string& identity() const { return identity_; }
  // Sets the identity of a cache created without one and rewrites the header.
  void bind_identity(const std::string& identity);
  std::size_t size() const;

  static std::string digest(std::string_view text);

 private:
  EmbeddingCache() = default;
  void load();
  void write_header() const;

  std::filesystem::path path_;
  std::size_t dim_ = 0;
  std::string identity_;
  std::map<std::string, EmbeddingVector> entries_;
  mutable std::mutex mutex_;
  bool writable_ = true;
};

// Exact lookup by text digest in a precomputed cache-format file.
class FileEmbedder final : public EmbeddingProvider {
 public:
  explicit FileEmbedder(const std::filesystem::path& path);

  std::size_t dimension() const override { return cache_->dim(); }
  std::string fingerprint() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::size_t warm(std::span<const std::string> texts) const override;

 private:
  std::unique_ptr<EmbeddingCache> cache_;
};

// Embeddings from the inference sidecar, memoized in an on-disk cache.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::shared_ptr<const GatewayClient> client, std::size_t dim, std::filesystem::path cache_path);

  std::size_t dimension() const override { return dim_; }
  // "remote:<model>:dim=<D>"; queries the service once if the cache does
  // not already record the model identity.
  std::string fingerprint() const override;
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::size_t warm(std::span<const std::string> texts) const override;

 private:
  std::size_t fetch_missing(std::span<const std::string> texts) const;

  std::shared_ptr<const GatewayClient> client_;
  std::size_t dim_;
  mutable EmbeddingCache cache_;
};

struct EmbeddingProviderConfig {
  enum class Backing { kStub, kFile, kRemote };
  Backing backing = Backing::kStub;
  std::size_t dim = kDefaultEmbeddingDim;
  std::uint64_t seed = 0;
  std::filesystem::path file;
  std::filesystem::path cache = "assort-embeddings.cache";
};

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config,
                                                           std::shared_ptr<const GatewayClient> client = nullptr);

// Every sentence text in the corpus, in post order.
std::vector<std::string> corpus_sentences(const LabeledCorpus& corpus);

// Caches every corpus sentence; returns the number newly cached.
std::size_t warm_cache(const EmbeddingProvider& provider, const LabeledCorpus& corpus);

}  // namespace assort

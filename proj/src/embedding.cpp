#include "assort/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "assort/error.hpp"
#include "assort/random.hpp"
#include "assort/serialize.hpp"
#include "assort/text.hpp"

namespace assort {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

StubEmbedder::StubEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw UsageError("embedding dimension must be positive");
}

EmbeddingVector StubEmbedder::vector_for(std::string_view text, std::uint64_t seed, std::size_t dim) {
  std::vector<std::string> tokens = word_tokens(text);
  if (tokens.empty()) tokens.emplace_back();
  std::sort(tokens.begin(), tokens.end());

  std::vector<std::uint64_t> dim_keys(dim);
  for (std::size_t j = 0; j < dim; ++j) dim_keys[j] = splitmix64(seed + j);

  EmbeddingVector v(dim, 0.0);
  for (const std::string& t : tokens) {
    const std::uint64_t h = fnv1a64(t);
    for (std::size_t j = 0; j < dim; ++j) {
      const std::uint64_t x = splitmix64(h ^ dim_keys[j]);
      v[j] += 2.0 * (static_cast<double>(x >> 11) * 0x1.0p-53) - 1.0;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

std::string StubEmbedder::fingerprint() const {
  return "stub:v1:seed=" + std::to_string(seed_) + ":dim=" + std::to_string(dim_);
}

std::vector<EmbeddingVector> StubEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(vector_for(t, seed_, dim_));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kCacheMagic = "assort-embedding-cache";

struct CacheHeader {
  std::size_t dim = 0;
  std::string identity;
};

CacheHeader parse_header(const std::string& line, const std::filesystem::path& path) {
  std::istringstream in(line);
  std::string magic, version, dim_field, backing_field;
  in >> magic >> version >> dim_field;
  std::getline(in, backing_field);
  backing_field = std::string(trim(backing_field));
  if (magic != kCacheMagic || version != "1" || dim_field.rfind("dim=", 0) != 0 ||
      backing_field.rfind("backing=", 0) != 0)
    throw DataError("embedding cache " + path.string() + ": bad header");
  CacheHeader h;
  h.dim = std::stoul(dim_field.substr(4));
  h.identity = backing_field.substr(8);
  return h;
}

}  // namespace

std::string EmbeddingCache::digest(std::string_view text) { return sha256_hex(text); }

EmbeddingCache::EmbeddingCache(std::filesystem::path path, std::size_t dim, std::string identity)
    : path_(std::move(path)), dim_(dim), identity_(std::move(identity)) {
  if (std::filesystem::exists(path_)) {
    const std::size_t wanted_dim = dim_;
    const std::string wanted_identity = identity_;
    load();
    if (dim_ != wanted_dim)
      throw DataError("embedding cache " + path_.string() + " pins dim=" + std::to_string(dim_) + ", expected " +
                      std::to_string(wanted_dim));
    if (!wanted_identity.empty() && !identity_.empty() && identity_ != wanted_identity)
      throw DataError("embedding cache " + path_.string() + " belongs to backing '" + identity_ + "', not '" +
                      wanted_identity + "'");
    if (identity_.empty() && !wanted_identity.empty()) bind_identity(wanted_identity);
  } else {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    write_header();
  }
}

std::unique_ptr<EmbeddingCache> EmbeddingCache::open_existing(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("embedding file " + path.string() + " does not exist");
  std::unique_ptr<EmbeddingCache> cache(new EmbeddingCache());
  cache->path_ = path;
  cache->writable_ = false;
  cache->load();
  return cache;
}

void EmbeddingCache::load() {
  std::ifstream in(path_);
  if (!in) throw DataError("cannot open embedding cache " + path_.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding cache " + path_.string() + " is empty");
  const CacheHeader header = parse_header(line, path_);
  dim_ = header.dim;
  identity_ = header.identity;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string digest;
    std::size_t dim = 0;
    fields >> digest >> dim;
    if (digest.size() != 64 || dim != dim_)
      throw DataError("embedding cache " + path_.string() + " line " + std::to_string(lineno) + ": bad record");
    EmbeddingVector v;
    v.reserve(dim);
    std::string token;
    while (fields >> token) v.push_back(io::parse_double(token));
    if (v.size() != dim_)
      throw DataError("embedding cache " + path_.string() + " line " + std::to_string(lineno) + ": expected " +
                      std::to_string(dim_) + " values");
    entries_[digest] = std::move(v);
  }
}

void EmbeddingCache::write_header() const {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw DataError("cannot create embedding cache " + path_.string());
  out << kCacheMagic << " 1 dim=" << dim_ << " backing=" << identity_ << '\n';
  for (const auto& [digest, v] : entries_) {
    out << digest << ' ' << v.size() << ' ';
    io::write_doubles(out, v);
    out << '\n';
  }
}

void EmbeddingCache::bind_identity(const std::string& identity) {
  std::lock_guard lock(mutex_);
  if (identity_ == identity) return;
  if (!identity_.empty())
    throw ProviderError("embedding cache " + path_.string() + " belongs to backing '" + identity_ +
                        "', service reports '" + identity + "'");
  identity_ = identity;
  if (writable_) write_header();
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool EmbeddingCache::insert(const std::string& digest, const EmbeddingVector& vector) {
  if (vector.size() != dim_) throw ProviderError("embedding length " + std::to_string(vector.size()) +
                                                 " does not match cache dim " + std::to_string(dim_));
  std::lock_guard lock(mutex_);
  if (!entries_.emplace(digest, vector).second) return false;
  if (writable_) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw DataError("cannot append to embedding cache " + path_.string());
    out << digest << ' ' << vector.size() << ' ';
    io::write_doubles(out, vector);
    out << '\n';
  }
  return true;
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

FileEmbedder::FileEmbedder(const std::filesystem::path& path)
    : cache_(EmbeddingCache::open_existing(path)) {}

std::string FileEmbedder::fingerprint() const {
  return "file:" + cache_->identity() + ":dim=" + std::to_string(cache_->dim());
}

std::vector<EmbeddingVector> FileEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    const std::string digest = EmbeddingCache::digest(t);
    auto v = cache_->lookup(digest);
    if (!v) throw ProviderError("embedding file has no vector for digest " + digest);
    out.push_back(std::move(*v));
  }
  return out;
}

std::size_t FileEmbedder::warm(std::span<const std::string> texts) const {
  embed(texts);  // verifies every text is present
  return 0;
}

// ---------------------------------------------------------------------------

RemoteEmbedder::RemoteEmbedder(std::shared_ptr<const GatewayClient> client, std::size_t dim,
                               std::filesystem::path cache_path)
    : client_(std::move(client)), dim_(dim), cache_(std::move(cache_path), dim, "") {
  if (!client_) throw UsageError("remote embedding backing needs a gateway client");
}

std::size_t RemoteEmbedder::fetch_missing(std::span<const std::string> texts) const {
  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const std::string& t : texts) {
    const std::string digest = EmbeddingCache::digest(t);
    if (!cache_.lookup(digest) && seen.insert(digest).second) missing.push_back(t);
  }
  if (missing.empty()) return 0;
  EmbedResult result = client_->remote_embed(missing, dim_);
  if (!result.model.empty()) cache_.bind_identity(result.model);
  std::size_t added = 0;
  for (std::size_t i = 0; i < missing.size(); ++i)
    added += cache_.insert(EmbeddingCache::digest(missing[i]), result.vectors[i]) ? 1 : 0;
  return added;
}

std::string RemoteEmbedder::fingerprint() const {
  if (cache_.identity().empty()) {
    const std::string probe = "assort fingerprint probe";
    EmbedResult result = client_->remote_embed(std::span<const std::string>(&probe, 1), dim_);
    cache_.bind_identity(result.model.empty() ? "unnamed" : result.model);
  }
  return "remote:" + cache_.identity() + ":dim=" + std::to_string(dim_);
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  fetch_missing(texts);
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    auto v = cache_.lookup(EmbeddingCache::digest(t));
    if (!v) throw ProviderError("remote embedding missing after fetch");
    out.push_back(std::move(*v));
  }
  return out;
}

std::size_t RemoteEmbedder::warm(std::span<const std::string> texts) const { return fetch_missing(texts); }

// ---------------------------------------------------------------------------

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const EmbeddingProviderConfig& config,
                                                           std::shared_ptr<const GatewayClient> client) {
  switch (config.backing) {
    case EmbeddingProviderConfig::Backing::kStub:
      return std::make_unique<StubEmbedder>(config.dim, config.seed);
    case EmbeddingProviderConfig::Backing::kFile: {
      auto provider = std::make_unique<FileEmbedder>(config.file);
      if (provider->dimension() != config.dim)
        throw DataError("embedding file dim " + std::to_string(provider->dimension()) + " differs from configured " +
                        std::to_string(config.dim));
      return provider;
    }
    case EmbeddingProviderConfig::Backing::kRemote:
      return std::make_unique<RemoteEmbedder>(std::move(client), config.dim, config.cache);
  }
  throw UsageError("unknown embedding backing");
}

std::vector<std::string> corpus_sentences(const LabeledCorpus& corpus) {
  std::vector<std::string> out;
  for (const AnswerPost& p : corpus.posts)
    for (const Sentence& s : p.sentences) out.push_back(s.text);
  return out;
}

std::size_t warm_cache(const EmbeddingProvider& provider, const LabeledCorpus& corpus) {
  const auto texts = corpus_sentences(corpus);
  if (texts.empty()) return 0;
  return provider.warm(texts);
}

}  // namespace assort

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "autog/profile.hpp"
#include "autog/schema.hpp"
#include "autog/value.hpp"

namespace autog {

struct ColumnKey {
  std::string table;
  std::string column;

  friend bool operator==(const ColumnKey& a, const ColumnKey& b) {
    return a.table == b.table && a.column == b.column;
  }
  friend bool operator<(const ColumnKey& a, const ColumnKey& b) {
    return a.table != b.table ? a.table < b.table : a.column < b.column;
  }
};

enum class SimilarityMethod { kEmbedding, kOverlap };

struct SimilarityPair {
  ColumnKey a;  // canonical: a precedes b in schema order
  ColumnKey b;
  double score = 0.0;
  SimilarityMethod method = SimilarityMethod::kEmbedding;
};

/// Column-to-text serialization fed to the embedder. Deterministic template:
/// "Table.Column dtype values: v1, v2, ..." ("no samples" when empty).
std::string serialize_column_for_embedding(const ColumnKey& key, const ColumnProfile& profile);

/// Embedder port. Returns a unit-norm vector of fixed dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

/// Default self-contained embedder: hashed character-trigram frequencies,
/// L2-normalized, dimension 1024. A noisy lexical prior by construction.
class TrigramEmbedder : public Embedder {
 public:
  explicit TrigramEmbedder(std::size_t dimension = 1024) : dimension_(dimension) {}
  std::vector<double> embed(const std::string& text) override;

 private:
  std::size_t dimension_;
};

/// Embedder behind the NDJSON wire protocol: one {"id","text"} request line,
/// one {"id","vector":[...]} response line per call, over a subprocess.
class WireEmbedder : public Embedder {
 public:
  explicit WireEmbedder(std::vector<std::string> argv);
  ~WireEmbedder() override;
  std::vector<double> embed(const std::string& text) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Containment overlap: |distinct(a) ∩ distinct(b)| / min distinct count.
/// Null cells are ignored; an empty side scores 0.
double overlap_score(const Column& values_a, const Column& values_b);

struct RankedPairs {
  std::vector<SimilarityPair> pairs;  // descending score
  std::string report;                 // fixed "The pair with the ..." lines
};

/// Ranks all candidate column pairs. Candidates exclude embedding and
/// timestamp columns and same-table PK/FK pairs. The overlap method needs
/// payload data; the embedding method needs only profiles.
RankedPairs rank_pairs(const DatasetSchema& schema, const ProfileMap& profiles,
                       const std::map<std::string, TableData>* data, SimilarityMethod method,
                       std::size_t top_n, Embedder* embedder = nullptr);

/// Parses report lines back into (a, b, score); used by the round-trip tests.
std::vector<SimilarityPair> parse_similarity_report(const std::string& report);

}  // namespace autog

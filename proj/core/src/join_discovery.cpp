#include "autog/join_discovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "autog/subprocess.hpp"
#include "autog/util.hpp"

#include "json.hpp"

namespace autog {

std::string serialize_column_for_embedding(const ColumnKey& key, const ColumnProfile& profile) {
  std::string dtype_guess;
  {
    std::map<std::string, ColumnProfile> one{{key.column, profile}};
    dtype_guess = dtype_to_string(infer_types(one).at(key.column).dtype);
  }
  std::ostringstream out;
  out << key.table << "." << key.column << " " << dtype_guess;
  if (profile.samples.empty()) {
    out << " no samples";
    return out.str();
  }
  out << " values: ";
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    if (i) out << ", ";
    out << scalar_to_string(profile.samples[i]);
  }
  return out.str();
}

std::vector<double> TrigramEmbedder::embed(const std::string& text) {
  std::vector<double> vec(dimension_, 0.0);
  if (text.size() >= 3) {
    for (std::size_t i = 0; i + 3 <= text.size(); ++i) {
      const auto bucket = fnv1a64(text.data() + i, 3) % dimension_;
      vec[bucket] += 1.0;
    }
  } else if (!text.empty()) {
    vec[fnv1a64(text) % dimension_] += 1.0;
  }
  double norm = 0.0;
  for (double v : vec) norm += v * v;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& v : vec) v /= norm;
  }
  return vec;
}

struct WireEmbedder::Impl {
  Subprocess process;
  std::uint64_t next_id = 0;
  explicit Impl(std::vector<std::string> argv) : process(std::move(argv)) {}
};

WireEmbedder::WireEmbedder(std::vector<std::string> argv)
    : impl_(std::make_unique<Impl>(std::move(argv))) {}

WireEmbedder::~WireEmbedder() = default;

std::vector<double> WireEmbedder::embed(const std::string& text) {
  nlohmann::json request{{"id", impl_->next_id++}, {"text", text}};
  impl_->process.write_line(request.dump());
  std::string line;
  if (!impl_->process.read_line(&line)) {
    throw IoError("external embedder closed its output stream");
  }
  const auto response = nlohmann::json::parse(line);
  if (response.contains("error")) {
    throw IoError("external embedder error: " + response["error"].get<std::string>());
  }
  auto vec = response.at("vector").get<std::vector<double>>();
  double norm = 0.0;
  for (double v : vec) norm += v * v;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double& v : vec) v /= norm;
  }
  return vec;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

std::unordered_set<Scalar, ScalarHash, ScalarEq> distinct_values(const Column& column) {
  std::unordered_set<Scalar, ScalarHash, ScalarEq> out;
  for (const auto& cell : column.cells) {
    if (is_null(cell) || is_tensor(cell)) continue;
    if (is_list(cell)) {
      for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
        if (!is_null(item)) out.insert(item);
      }
    } else {
      out.insert(cell_to_scalar(cell));
    }
  }
  return out;
}

}  // namespace

double overlap_score(const Column& values_a, const Column& values_b) {
  const auto da = distinct_values(values_a);
  const auto db = distinct_values(values_b);
  if (da.empty() || db.empty()) return 0.0;
  const auto& small = da.size() <= db.size() ? da : db;
  const auto& large = da.size() <= db.size() ? db : da;
  std::size_t shared = 0;
  for (const auto& value : small) {
    if (large.count(value)) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(small.size());
}

RankedPairs rank_pairs(const DatasetSchema& schema, const ProfileMap& profiles,
                       const std::map<std::string, TableData>* data, SimilarityMethod method,
                       std::size_t top_n, Embedder* embedder) {
  TrigramEmbedder fallback;
  if (!embedder) embedder = &fallback;

  // Candidate columns in schema order; the canonical pair order follows it.
  struct Candidate {
    ColumnKey key;
    const ColumnProfile* profile;
    const ColumnDef* def;
  };
  std::vector<Candidate> candidates;
  for (const auto& table : schema.tables) {
    const auto pit = profiles.find(table.name);
    if (pit == profiles.end()) continue;
    for (const auto& column : table.columns) {
      if (column.dtype == DataType::kEmbedding || column.dtype == DataType::kTimestamp) continue;
      const auto cit = pit->second.find(column.name);
      if (cit == pit->second.end()) continue;
      candidates.push_back({{table.name, column.name}, &cit->second, &column});
    }
  }

  RankedPairs result;
  std::vector<std::vector<double>> vectors(candidates.size());
  if (method == SimilarityMethod::kEmbedding) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      vectors[i] =
          embedder->embed(serialize_column_for_embedding(candidates[i].key, *candidates[i].profile));
    }
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const auto& a = candidates[i];
      const auto& b = candidates[j];
      if (a.key.table == b.key.table) {
        // Same-table PK-to-own-FK pairs are structural, not discoveries.
        const bool keyish_a = a.def->dtype == DataType::kPrimaryKey ||
                              a.def->dtype == DataType::kForeignKey;
        const bool keyish_b = b.def->dtype == DataType::kPrimaryKey ||
                              b.def->dtype == DataType::kForeignKey;
        if (keyish_a && keyish_b &&
            (a.def->dtype == DataType::kPrimaryKey || b.def->dtype == DataType::kPrimaryKey)) {
          continue;
        }
      }
      SimilarityPair pair;
      pair.a = a.key;
      pair.b = b.key;
      pair.method = method;
      if (method == SimilarityMethod::kEmbedding) {
        // Raw cosine of nonnegative trigram counts is already in [0,1];
        // real embedders can go negative, so clamp.
        pair.score = std::max(0.0, cosine(vectors[i], vectors[j]));
      } else {
        if (!data) throw IoError("overlap ranking requires loaded table data");
        const auto& table_a = data->at(a.key.table);
        const auto& table_b = data->at(b.key.table);
        pair.score = overlap_score(table_a.column(a.key.column), table_b.column(b.key.column));
      }
      result.pairs.push_back(std::move(pair));
    }
  }

  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [](const SimilarityPair& x, const SimilarityPair& y) {
                     if (x.score != y.score) return x.score > y.score;
                     if (!(x.a == y.a)) return x.a < y.a;
                     return x.b < y.b;
                   });
  if (result.pairs.size() > top_n) result.pairs.resize(top_n);

  std::ostringstream report;
  for (std::size_t i = 0; i < result.pairs.size(); ++i) {
    const auto& pair = result.pairs[i];
    report << "The pair with the " << ordinal(i + 1) << " highest similarity is column \""
           << pair.a.column << "\" from Table \"" << pair.a.table << "\" and column \""
           << pair.b.column << "\" from Table \"" << pair.b.table << "\" with similarity "
           << format_double(pair.score, 3) << "\n";
  }
  result.report = report.str();
  return result;
}

std::vector<SimilarityPair> parse_similarity_report(const std::string& report) {
  std::vector<SimilarityPair> pairs;
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // The format is rigid; slice between the quote marks.
    std::vector<std::size_t> quotes;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quotes.push_back(i);
    }
    if (quotes.size() != 8) throw ParseError("malformed similarity line: " + line);
    auto slice = [&](int k) {
      return line.substr(quotes[2 * k] + 1, quotes[2 * k + 1] - quotes[2 * k] - 1);
    };
    SimilarityPair pair;
    pair.a.column = slice(0);
    pair.a.table = slice(1);
    pair.b.column = slice(2);
    pair.b.table = slice(3);
    const auto marker = line.rfind("with similarity ");
    if (marker == std::string::npos) throw ParseError("malformed similarity line: " + line);
    pair.score = std::stod(line.substr(marker + 16));
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace autog

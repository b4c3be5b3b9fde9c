#include "autog/profile.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include "autog/util.hpp"

namespace autog {

namespace {

bool looks_like_datetime(const std::string& text) {
  // Full dates at minimum (YYYY-MM-DD...); bare years stay categorical.
  if (text.size() < 10) return false;
  for (int i = 0; i < 4; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  if (text[4] != '-' && text[4] != '/') return false;
  return std::isdigit(static_cast<unsigned char>(text[5])) &&
         (text[7] == '-' || text[7] == '/');
}

struct ValueCounts {
  std::vector<Scalar> values;  // non-null, in encounter order
  std::size_t nan_count = 0;
  std::unordered_map<Scalar, std::size_t, ScalarHash, ScalarEq> counts;

  void add(const Scalar& value) {
    if (is_null(value)) {
      ++nan_count;
      return;
    }
    auto [it, inserted] = counts.emplace(value, 0);
    ++it->second;
    values.push_back(value);
  }
};

std::string render_sample(const Scalar& value) {
  if (std::holds_alternative<std::string>(value)) {
    return "'" + std::get<std::string>(value) + "'";
  }
  return scalar_to_string(value);
}

}  // namespace

ColumnProfile profile_column(const Column& values, std::size_t k, std::uint64_t seed) {
  ColumnProfile profile;
  profile.is_multidimensional = values.has_tensors();
  profile.has_lists = values.has_lists();
  if (profile.is_multidimensional) {
    profile.total = values.size();
    return profile;
  }

  ValueCounts counts;
  if (profile.has_lists) {
    // Multi-category statistics run over the flattened elements, matching the
    // "total values" vs row count gap in published stats blocks.
    for (const auto& cell : values.cells) {
      if (is_null(cell)) {
        ++counts.nan_count;
        continue;
      }
      for (const auto& item : std::get<std::vector<Scalar>>(cell)) counts.add(item);
    }
  } else {
    for (const auto& cell : values.cells) counts.add(cell_to_scalar(cell));
  }

  // Scalar columns count cells (nulls included); list columns count the
  // flattened elements, which is what published stats blocks report.
  profile.total =
      profile.has_lists ? counts.values.size() : counts.values.size() + counts.nan_count;
  profile.nan_count = counts.nan_count;
  profile.uniques = counts.counts.size();
  if (profile.has_lists) profile.expanded_uniques = profile.uniques;

  // Mode: highest count, first encounter breaks ties.
  std::size_t best = 0;
  std::unordered_map<Scalar, bool, ScalarHash, ScalarEq> seen;
  for (const auto& value : counts.values) {
    if (seen[value]) continue;
    seen[value] = true;
    const auto count = counts.counts.at(value);
    if (count > best) {
      best = count;
      profile.mode = value;
    }
  }

  // Min/max for orderable columns: numeric, or datetime-shaped strings.
  bool all_numeric = !counts.values.empty();
  bool all_datetime = !counts.values.empty();
  for (const auto& value : counts.values) {
    if (!scalar_as_number(value)) all_numeric = false;
    const auto* s = std::get_if<std::string>(&value);
    if (!s || !looks_like_datetime(*s)) all_datetime = false;
    if (!all_numeric && !all_datetime) break;
  }
  if (all_numeric || all_datetime) {
    auto min_it = counts.values.front();
    auto max_it = counts.values.front();
    for (const auto& value : counts.values) {
      if (scalar_less(value, min_it)) min_it = value;
      if (scalar_less(max_it, value)) max_it = value;
    }
    profile.min = min_it;
    profile.max = max_it;
  }

  std::mt19937_64 rng(seed);
  const auto picked = sample_without_replacement(counts.values.size(), k, rng);
  for (const auto index : picked) profile.samples.push_back(counts.values[index]);
  return profile;
}

ProfileMap profile_dataset(const DatasetSchema& schema,
                           const std::map<std::string, TableData>& data, std::size_t k,
                           std::uint64_t seed) {
  ProfileMap profiles;
  for (std::size_t t = 0; t < schema.tables.size(); ++t) {
    const auto& table = schema.tables[t];
    const auto it = data.find(table.name);
    if (it == data.end()) continue;
    auto& per_table = profiles[table.name];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& name = table.columns[c].name;
      if (!it->second.has_column(name)) continue;
      // Position-based seed: anonymizing names must not change samples.
      const auto column_seed =
          fnv1a64(std::to_string(seed) + "/" + std::to_string(t) + "/" + std::to_string(c));
      per_table.emplace(name, profile_column(it->second.column(name), k, column_seed));
    }
  }
  return profiles;
}

std::map<std::string, TypeGuess> infer_types(
    const std::map<std::string, ColumnProfile>& profiles) {
  std::map<std::string, TypeGuess> guesses;
  for (const auto& [name, profile] : profiles) {
    TypeGuess guess;
    if (profile.is_multidimensional) {
      guess.dtype = DataType::kEmbedding;
      guess.confidence = 0.95;
      guess.description = "Multi-dimensional numeric column, probably an embedding tensor.";
      guesses.emplace(name, std::move(guess));
      continue;
    }
    if (profile.has_lists) {
      guess.dtype = DataType::kMultiCategory;
      guess.confidence = 0.95;
      guess.description = "List-valued column with " +
                          std::to_string(profile.expanded_uniques.value_or(0)) +
                          " distinct elements after expansion.";
      guesses.emplace(name, std::move(guess));
      continue;
    }
    if (profile.total == 0) {
      guess.dtype = DataType::kCategory;
      guess.confidence = 0.1;
      guess.description = "Empty column, defaulting to category.";
      guesses.emplace(name, std::move(guess));
      continue;
    }

    bool all_int = true;
    bool any_real = false;
    bool all_string = true;
    bool all_datetime = true;
    std::size_t spacey = 0;
    std::size_t chars = 0;
    for (const auto& sample : profile.samples) {
      if (std::holds_alternative<std::int64_t>(sample)) {
        all_string = false;
        all_datetime = false;
      } else if (std::holds_alternative<double>(sample)) {
        all_int = false;
        all_string = false;
        all_datetime = false;
        any_real = true;
      } else if (const auto* s = std::get_if<std::string>(&sample)) {
        all_int = false;
        if (!looks_like_datetime(*s)) all_datetime = false;
        if (s->find(' ') != std::string::npos) ++spacey;
        chars += s->size();
      }
    }
    const double distinct_ratio =
        profile.total ? static_cast<double>(profile.uniques) / static_cast<double>(profile.total)
                      : 0.0;

    const auto min_n = profile.min ? scalar_as_number(*profile.min) : std::nullopt;
    const auto max_n = profile.max ? scalar_as_number(*profile.max) : std::nullopt;
    const bool dense_ints =
        all_int && min_n && max_n &&
        (*max_n - *min_n + 1.0) <= 2.0 * static_cast<double>(profile.total);

    if (all_int && profile.uniques == profile.total && profile.nan_count == 0 && dense_ints) {
      guess.dtype = DataType::kPrimaryKey;
      guess.confidence = 0.9;
      guess.description =
          "Unique dense integers from " + scalar_to_string(*profile.min) + " to " +
          scalar_to_string(*profile.max) + ", likely a primary key.";
    } else if (all_string && all_datetime && !profile.samples.empty()) {
      guess.dtype = DataType::kTimestamp;
      guess.confidence = 0.85;
      guess.description = "Full datetime values.";
    } else if (all_string && distinct_ratio >= 0.5 && !profile.samples.empty() &&
               (spacey * 2 >= profile.samples.size() || chars >= 20 * profile.samples.size())) {
      guess.dtype = DataType::kText;
      guess.confidence = 0.7;
      guess.description = "Mostly unique free-form strings, likely natural-language text.";
    } else if (any_real) {
      guess.dtype = DataType::kNumeric;
      guess.confidence = 0.8;
      guess.description = "Real-valued measurements.";
    } else if (all_int && distinct_ratio > 0.5) {
      guess.dtype = DataType::kNumeric;
      guess.confidence = 0.55;
      guess.description = "Mostly distinct integers without a dense key shape.";
    } else {
      guess.dtype = DataType::kCategory;
      guess.confidence = 0.6;
      guess.description = "Low-cardinality values (" + std::to_string(profile.uniques) +
                          " distinct), treated as categorical.";
    }
    guesses.emplace(name, std::move(guess));
  }
  return guesses;
}

std::map<std::string, std::map<std::string, TypeGuess>> infer_dataset_types(
    const ProfileMap& profiles) {
  std::map<std::string, std::map<std::string, TypeGuess>> out;
  for (const auto& [table, columns] : profiles) out.emplace(table, infer_types(columns));
  return out;
}

std::string render_stats_report(const DatasetSchema& schema, const ProfileMap& profiles) {
  std::ostringstream out;
  bool first_table = true;
  for (const auto& table : schema.tables) {
    const auto it = profiles.find(table.name);
    if (it == profiles.end()) continue;
    if (!first_table) out << "\n";
    first_table = false;
    out << "Analysis for Table " << table.name << ":\n";
    for (const auto& column : table.columns) {
      const auto pit = it->second.find(column.name);
      if (pit == it->second.end()) continue;
      const auto& profile = pit->second;
      out << "  Column: " << column.name << "\n";
      if (profile.is_multidimensional) {
        out << "Column is multi-dimensional. Probably an embedding type. "
               "Usually not of interest\n";
        continue;
      }
      if (profile.max) out << "    Max: " << scalar_to_string(*profile.max) << "\n";
      if (profile.min) out << "    Min: " << scalar_to_string(*profile.min) << "\n";
      out << "    Mode: " << scalar_to_string(profile.mode) << "\n";
      out << "    Sampled Values: [";
      for (std::size_t i = 0; i < profile.samples.size(); ++i) {
        if (i) out << " ";
        out << render_sample(profile.samples[i]);
      }
      out << "]\n";
      out << "    Number of Unique Values: " << profile.uniques << "\n";
      out << "    Number of nan values: " << profile.nan_count << "\n";
    }
  }
  return out.str();
}

}  // namespace autog

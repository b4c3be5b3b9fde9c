#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autog/schema.hpp"
#include "autog/value.hpp"

namespace autog {

/// Per-column statistics feeding type inference and planner context.
struct ColumnProfile {
  std::size_t total = 0;
  std::size_t uniques = 0;
  std::size_t nan_count = 0;
  Scalar mode;                       // most frequent value, first occurrence wins ties
  std::optional<Scalar> min;         // orderable (numeric/timestamp) columns only
  std::optional<Scalar> max;
  std::vector<Scalar> samples;       // min(k, total) seeded draws without replacement
  bool is_multidimensional = false;  // embedding-shaped column
  bool has_lists = false;
  std::optional<std::size_t> expanded_uniques;  // multi-category: distinct after flattening
};

/// Deterministic under a fixed seed; permutation-invariant except samples.
ColumnProfile profile_column(const Column& values, std::size_t k, std::uint64_t seed);

/// Profiles for every column of every table. Per-column sample seeds derive
/// from (seed, table index, column index) so renaming never changes reports.
using ProfileMap = std::map<std::string, std::map<std::string, ColumnProfile>>;
ProfileMap profile_dataset(const DatasetSchema& schema,
                           const std::map<std::string, TableData>& data, std::size_t k,
                           std::uint64_t seed);

struct TypeGuess {
  DataType dtype = DataType::kCategory;
  double confidence = 0.0;
  std::string description;
};

/// Deterministic rule-based inference floor; the LLM path may override it.
/// Never assigns foreign_key: FKs arise only from links and actions.
std::map<std::string, TypeGuess> infer_types(
    const std::map<std::string, ColumnProfile>& profiles);

/// Inference for every table: "table" -> "column" -> guess.
std::map<std::string, std::map<std::string, TypeGuess>> infer_dataset_types(
    const ProfileMap& profiles);

/// Stats text in the fixed "Analysis for Table X:" layout. Tables render in
/// schema order, columns in declared order.
std::string render_stats_report(const DatasetSchema& schema, const ProfileMap& profiles);

}  // namespace autog

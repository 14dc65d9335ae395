// Copyright 2026 The obfx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OBFX_DATA_HPP_
#define OBFX_DATA_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obfx/nn.hpp"

namespace obfx::data {

enum class ColumnKind { kContinuous, kCategory };

// Describes one encoded feature column.
struct ColumnInfo {
  std::string attribute;
  std::string category;  // empty for continuous columns
  ColumnKind kind = ColumnKind::kContinuous;
  // Min-max normalization range of the source attribute (continuous only).
  double min = 0.0;
  double max = 1.0;

  std::string Name() const;
  bool operator==(const ColumnInfo&) const = default;
};

// A preprocessed dataset. Records are stored one per column of `features`.
struct Dataset {
  nn::Matrix features;  // width x size
  std::vector<int> y_private;
  std::vector<int> y_nonprivate;
  std::vector<ColumnInfo> column_map;

  int size() const { return static_cast<int>(features.cols()); }
  int width() const { return static_cast<int>(features.rows()); }

  // Throws DataError on inconsistent sizes or non-binary labels.
  void Validate() const;
  Dataset Subset(std::span<const int> indices) const;
};

// ---------------------------------------------------------------------------
// UCI Adult ingestion.

inline constexpr int kAdultFields = 15;
inline constexpr std::array<const char*, kAdultFields> kAdultAttributes = {
    "age",          "workclass",      "fnlwgt",         "education",
    "education-num", "marital-status", "occupation",     "relationship",
    "race",         "sex",            "capital-gain",   "capital-loss",
    "hours-per-week", "native-country", "income"};
inline constexpr int kAdultSexField = 9;
inline constexpr int kAdultIncomeField = 14;

bool IsAdultContinuous(int field);

struct AdultRecord {
  std::array<std::string, kAdultFields> fields;
  std::string source;  // file name, for diagnostics
  int line = 0;
};

struct AdultParseStats {
  int rows_read = 0;
  int rows_missing = 0;  // dropped because a field was "?"
};

// Parses the published comma-separated layout (14 attributes + income).
// Lines starting with '|' and blank lines are skipped; the trailing '.' that
// the test file puts on income labels is removed. Rows containing the missing
// marker "?" are dropped. Throws DataError (with line number) on malformed
// rows.
std::vector<AdultRecord> ParseAdultCsv(std::istream& in, bool has_header,
                                       const std::string& source,
                                       AdultParseStats* stats = nullptr);

// Vocabularies and normalization ranges for the Adult encoding.
class AdultEncoding {
 public:
  // Category vocabularies come from `vocab_records`; min-max ranges from
  // `stats_records` (normally the training split).
  static AdultEncoding Fit(std::span<const AdultRecord> vocab_records,
                           std::span<const AdultRecord> stats_records);

  // Encodes records. Continuous values are clipped to [0,1]; an unseen
  // category throws DataError.
  Dataset Transform(std::span<const AdultRecord> records) const;

  // Maps an encoded row back to raw attribute strings (continuous values are
  // de-normalized and rounded to the nearest integer).
  std::array<std::string, kAdultFields> Decode(const Dataset& ds,
                                               int record) const;

  // Width including the sex and income one-hots.
  int encoded_width() const;
  // Width of the feature vector (sex and income removed).
  int feature_width() const;
  const std::vector<ColumnInfo>& columns() const { return columns_; }
  const std::vector<std::string>& vocabulary(int field) const {
    return vocab_[field];
  }

 private:
  std::array<std::vector<std::string>, kAdultFields> vocab_;
  std::array<double, kAdultFields> min_{};
  std::array<double, kAdultFields> max_{};
  std::vector<ColumnInfo> columns_;
};

// Fit + transform over the same records.
Dataset LoadAdult(std::span<const AdultRecord> records);

// ---------------------------------------------------------------------------
// Splits and batches.

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

// Seeded permutation of [0,n) cut at floor(fraction * n).
std::pair<std::vector<int>, std::vector<int>> SplitIndices(
    int n, const SplitConfig& config);

std::pair<Dataset, Dataset> Split(const Dataset& dataset,
                                  const SplitConfig& config);

// Seeded permutation chunked into batches of `batch_size` (last may be short).
std::vector<std::vector<int>> Minibatches(int n, int batch_size,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data.

struct SynthSpec {
  int n = 1000;
  // Sizes of the independent one-hot groups. Two extra binary groups are
  // always prepended: one tied to y_nonprivate, one tied to y_private.
  std::vector<int> group_sizes = {4, 4, 4};
  int num_continuous = 4;
  // The tied groups agree with their label with probability (1+c)/2.
  double correlation = 0.9;
  double private_rate = 0.5;     // P(y_private = 1)
  double nonprivate_rate = 0.5;  // P(y_nonprivate = 1)
  std::uint64_t seed = 0;
};

Dataset SynthGenerate(const SynthSpec& spec);

// ---------------------------------------------------------------------------
// CSV persistence: header of column names, then one row per record with the
// features followed by y_private and y_nonprivate.

void WriteDatasetCsv(const Dataset& ds, std::ostream& out);
void SaveDatasetCsv(const Dataset& ds, const std::string& path);
Dataset ReadDatasetCsv(std::istream& in, const std::string& source);
Dataset LoadDatasetCsv(const std::string& path);

// Fraction of the most common label value.
double MajorityRate(std::span<const int> labels);

}  // namespace obfx::data

#endif  // OBFX_DATA_HPP_

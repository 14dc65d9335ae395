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

#include "obfx/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "obfx/error.hpp"
#include "obfx/rng.hpp"
#include "text_util.hpp"

namespace obfx::data {

std::string ColumnInfo::Name() const {
  return kind == ColumnKind::kContinuous ? attribute
                                         : attribute + "=" + category;
}

void Dataset::Validate() const {
  const auto n = static_cast<size_t>(features.cols());
  if (y_private.size() != n || y_nonprivate.size() != n) {
    throw DataError(fmt::format(
        "dataset has {} records but {} private / {} non-private labels", n,
        y_private.size(), y_nonprivate.size()));
  }
  if (!column_map.empty() &&
      column_map.size() != static_cast<size_t>(features.rows())) {
    throw DataError(fmt::format("column map has {} entries for {} columns",
                                column_map.size(), features.rows()));
  }
  auto binary = [](int y) { return y == 0 || y == 1; };
  if (!std::all_of(y_private.begin(), y_private.end(), binary) ||
      !std::all_of(y_nonprivate.begin(), y_nonprivate.end(), binary)) {
    throw DataError("labels must be 0 or 1");
  }
  if (!features.allFinite()) throw DataError("features contain non-finite values");
}

Dataset Dataset::Subset(std::span<const int> indices) const {
  Dataset out;
  out.column_map = column_map;
  out.features.resize(features.rows(), static_cast<Eigen::Index>(indices.size()));
  out.y_private.reserve(indices.size());
  out.y_nonprivate.reserve(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    const int r = indices[i];
    if (r < 0 || r >= size()) throw UsageError("subset index out of range");
    out.features.col(static_cast<Eigen::Index>(i)) = features.col(r);
    out.y_private.push_back(y_private[r]);
    out.y_nonprivate.push_back(y_nonprivate[r]);
  }
  return out;
}

// ---------------------------------------------------------------------------

bool IsAdultContinuous(int field) {
  switch (field) {
    case 0:   // age
    case 2:   // fnlwgt
    case 4:   // education-num
    case 10:  // capital-gain
    case 11:  // capital-loss
    case 12:  // hours-per-week
      return true;
    default:
      return false;
  }
}

std::vector<AdultRecord> ParseAdultCsv(std::istream& in, bool has_header,
                                       const std::string& source,
                                       AdultParseStats* stats) {
  std::vector<AdultRecord> records;
  AdultParseStats local;
  std::string line;
  int line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty() || view.front() == '|') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string_view> parts = SplitFields(view, ',');
    if (parts.size() != kAdultFields) {
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", source,
                                  line_no, kAdultFields, parts.size()));
    }
    ++local.rows_read;
    AdultRecord rec;
    rec.source = source;
    rec.line = line_no;
    bool missing = false;
    for (int f = 0; f < kAdultFields; ++f) {
      std::string_view v = Trim(parts[f]);
      if (v == "?") missing = true;
      if (f == kAdultIncomeField && !v.empty() && v.back() == '.') {
        v.remove_suffix(1);
      }
      if (v.empty()) {
        throw DataError(fmt::format("{}:{}: empty field '{}'", source, line_no,
                                    kAdultAttributes[f]));
      }
      rec.fields[f] = std::string(v);
    }
    if (missing) {
      ++local.rows_missing;
      continue;
    }
    for (int f = 0; f < kAdultFields; ++f) {
      if (IsAdultContinuous(f) && !ParseDouble(rec.fields[f])) {
        throw DataError(fmt::format("{}:{}: '{}' is not numeric for {}",
                                    source, line_no, rec.fields[f],
                                    kAdultAttributes[f]));
      }
    }
    records.push_back(std::move(rec));
  }
  if (stats != nullptr) {
    stats->rows_read += local.rows_read;
    stats->rows_missing += local.rows_missing;
  }
  return records;
}

AdultEncoding AdultEncoding::Fit(std::span<const AdultRecord> vocab_records,
                                 std::span<const AdultRecord> stats_records) {
  if (vocab_records.empty() || stats_records.empty()) {
    throw DataError("cannot fit an encoding on zero records");
  }
  AdultEncoding enc;
  for (int f = 0; f < kAdultFields; ++f) {
    if (IsAdultContinuous(f)) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& r : stats_records) {
        const double v = *ParseDouble(r.fields[f]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      enc.min_[f] = lo;
      enc.max_[f] = hi;
    } else {
      std::set<std::string> cats;
      for (const auto& r : vocab_records) cats.insert(r.fields[f]);
      enc.vocab_[f].assign(cats.begin(), cats.end());
    }
  }
  for (int f = 0; f < kAdultFields; ++f) {
    if (f == kAdultSexField || f == kAdultIncomeField) continue;
    if (IsAdultContinuous(f)) {
      enc.columns_.push_back({kAdultAttributes[f], "", ColumnKind::kContinuous,
                              enc.min_[f], enc.max_[f]});
    } else {
      for (const auto& c : enc.vocab_[f]) {
        enc.columns_.push_back(
            {kAdultAttributes[f], c, ColumnKind::kCategory, 0.0, 1.0});
      }
    }
  }
  for (int f : {kAdultSexField, kAdultIncomeField}) {
    if (enc.vocab_[f].size() != 2) {
      throw DataError(fmt::format("'{}' must have exactly two values, found {}",
                                  kAdultAttributes[f], enc.vocab_[f].size()));
    }
  }
  return enc;
}

int AdultEncoding::encoded_width() const {
  return feature_width() + static_cast<int>(vocab_[kAdultSexField].size() +
                                            vocab_[kAdultIncomeField].size());
}

int AdultEncoding::feature_width() const {
  return static_cast<int>(columns_.size());
}

Dataset AdultEncoding::Transform(std::span<const AdultRecord> records) const {
  Dataset ds;
  ds.column_map = columns_;
  ds.features = nn::Matrix::Zero(feature_width(),
                                 static_cast<Eigen::Index>(records.size()));
  ds.y_private.reserve(records.size());
  ds.y_nonprivate.reserve(records.size());
  auto lookup = [&](const AdultRecord& r, int f) {
    const auto& vocab = vocab_[f];
    auto it = std::lower_bound(vocab.begin(), vocab.end(), r.fields[f]);
    if (it == vocab.end() || *it != r.fields[f]) {
      throw DataError(fmt::format("{}:{}: unknown {} category '{}'", r.source,
                                  r.line, kAdultAttributes[f], r.fields[f]));
    }
    return static_cast<int>(it - vocab.begin());
  };
  for (size_t i = 0; i < records.size(); ++i) {
    const AdultRecord& r = records[i];
    const auto col = static_cast<Eigen::Index>(i);
    Eigen::Index row = 0;
    for (int f = 0; f < kAdultFields; ++f) {
      if (f == kAdultSexField || f == kAdultIncomeField) continue;
      if (IsAdultContinuous(f)) {
        const double v = *ParseDouble(r.fields[f]);
        const double span = max_[f] - min_[f];
        const double scaled = span > 0.0 ? (v - min_[f]) / span : 0.0;
        ds.features(row++, col) = std::clamp(scaled, 0.0, 1.0);
      } else {
        ds.features(row + lookup(r, f), col) = 1.0;
        row += static_cast<Eigen::Index>(vocab_[f].size());
      }
    }
    ds.y_private.push_back(lookup(r, kAdultSexField));
    ds.y_nonprivate.push_back(lookup(r, kAdultIncomeField));
  }
  return ds;
}

std::array<std::string, kAdultFields> AdultEncoding::Decode(const Dataset& ds,
                                                            int record) const {
  std::array<std::string, kAdultFields> out;
  Eigen::Index row = 0;
  for (int f = 0; f < kAdultFields; ++f) {
    if (f == kAdultSexField || f == kAdultIncomeField) continue;
    if (IsAdultContinuous(f)) {
      const double v =
          min_[f] + ds.features(row++, record) * (max_[f] - min_[f]);
      out[f] = fmt::format("{}", static_cast<long long>(std::llround(v)));
    } else {
      const auto n = static_cast<Eigen::Index>(vocab_[f].size());
      Eigen::Index best = 0;
      ds.features.col(record).segment(row, n).maxCoeff(&best);
      out[f] = vocab_[f][best];
      row += n;
    }
  }
  out[kAdultSexField] = vocab_[kAdultSexField][ds.y_private[record]];
  out[kAdultIncomeField] = vocab_[kAdultIncomeField][ds.y_nonprivate[record]];
  return out;
}

Dataset LoadAdult(std::span<const AdultRecord> records) {
  return AdultEncoding::Fit(records, records).Transform(records);
}

// ---------------------------------------------------------------------------

std::pair<std::vector<int>, std::vector<int>> SplitIndices(
    int n, const SplitConfig& config) {
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw UsageError(fmt::format("train fraction {} not in (0,1)",
                                 config.train_fraction));
  }
  const int n_train =
      static_cast<int>(std::floor(config.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) {
    throw UsageError(fmt::format(
        "split of {} records at fraction {} leaves one side empty", n,
        config.train_fraction));
  }
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(config.seed, kStreamSplit));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> train(perm.begin(), perm.begin() + n_train);
  std::vector<int> test(perm.begin() + n_train, perm.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset,
                                  const SplitConfig& config) {
  auto [train, test] = SplitIndices(dataset.size(), config);
  return {dataset.Subset(train), dataset.Subset(test)};
}

std::vector<std::vector<int>> Minibatches(int n, int batch_size,
                                          std::uint64_t seed) {
  if (batch_size < 1) throw UsageError("batch size must be at least 1");
  std::vector<int> perm(static_cast<size_t>(std::max(n, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(DeriveSeed(seed, kStreamShuffle));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<int>> batches;
  for (size_t start = 0; start < perm.size(); start += batch_size) {
    const size_t end = std::min(perm.size(), start + batch_size);
    batches.emplace_back(perm.begin() + static_cast<long>(start),
                         perm.begin() + static_cast<long>(end));
  }
  return batches;
}

// ---------------------------------------------------------------------------

Dataset SynthGenerate(const SynthSpec& spec) {
  if (spec.n < 1) throw UsageError("synthetic dataset needs n >= 1");
  if (!(spec.correlation >= 0.0 && spec.correlation <= 1.0)) {
    throw UsageError("synthetic correlation must be in [0,1]");
  }
  if (spec.num_continuous < 0 ||
      std::any_of(spec.group_sizes.begin(), spec.group_sizes.end(),
                  [](int g) { return g < 1; })) {
    throw UsageError("synthetic group sizes must be positive");
  }
  std::vector<int> groups = {2, 2};
  groups.insert(groups.end(), spec.group_sizes.begin(), spec.group_sizes.end());
  const int width = std::accumulate(groups.begin(), groups.end(), 0) +
                    spec.num_continuous;

  Dataset ds;
  for (size_t g = 0; g < groups.size(); ++g) {
    const std::string attr = g == 0   ? "tied_nonprivate"
                             : g == 1 ? "tied_private"
                                      : fmt::format("group{}", g - 2);
    for (int c = 0; c < groups[g]; ++c) {
      ds.column_map.push_back(
          {attr, std::to_string(c), ColumnKind::kCategory, 0.0, 1.0});
    }
  }
  for (int c = 0; c < spec.num_continuous; ++c) {
    ds.column_map.push_back(
        {fmt::format("cont{}", c), "", ColumnKind::kContinuous, 0.0, 1.0});
  }

  ds.features = nn::Matrix::Zero(width, spec.n);
  ds.y_private.resize(spec.n);
  ds.y_nonprivate.resize(spec.n);
  Rng rng(DeriveSeed(spec.seed, kStreamSynth));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double agree = 0.5 * (1.0 + spec.correlation);
  for (int i = 0; i < spec.n; ++i) {
    const int y_np = uniform(rng) < spec.nonprivate_rate ? 1 : 0;
    const int y_p = uniform(rng) < spec.private_rate ? 1 : 0;
    ds.y_nonprivate[i] = y_np;
    ds.y_private[i] = y_p;
    int row = 0;
    for (size_t g = 0; g < groups.size(); ++g) {
      int active;
      if (g < 2) {
        const int label = g == 0 ? y_np : y_p;
        active = uniform(rng) < agree ? label : 1 - label;
      } else {
        std::uniform_int_distribution<int> pick(0, groups[g] - 1);
        active = pick(rng);
      }
      ds.features(row + active, i) = 1.0;
      row += groups[g];
    }
    for (int c = 0; c < spec.num_continuous; ++c) {
      ds.features(row++, i) = uniform(rng);
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------

void WriteDatasetCsv(const Dataset& ds, std::ostream& out) {
  ds.Validate();
  std::string header;
  for (int c = 0; c < ds.width(); ++c) {
    header += c < static_cast<int>(ds.column_map.size())
                  ? ds.column_map[c].Name()
                  : fmt::format("f{}", c);
    header += ',';
  }
  header += "y_private,y_nonprivate\n";
  out << header;
  std::string row;
  for (int r = 0; r < ds.size(); ++r) {
    row.clear();
    for (int c = 0; c < ds.width(); ++c) {
      row += FormatDouble(ds.features(c, r));
      row += ',';
    }
    row += fmt::format("{},{}\n", ds.y_private[r], ds.y_nonprivate[r]);
    out << row;
  }
}

void SaveDatasetCsv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  WriteDatasetCsv(ds, out);
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

Dataset ReadDatasetCsv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(fmt::format("{}: empty dataset file", source));
  }
  const auto header = SplitFields(Trim(line), ',');
  if (header.size() < 3 || header[header.size() - 2] != "y_private" ||
      header.back() != "y_nonprivate") {
    throw DataError(fmt::format(
        "{}:1: header must end with y_private,y_nonprivate", source));
  }
  const size_t width = header.size() - 2;
  Dataset ds;
  for (size_t c = 0; c < width; ++c) {
    const std::string_view name = header[c];
    const auto eq = name.find('=');
    if (eq == std::string_view::npos) {
      ds.column_map.push_back({std::string(name), "", ColumnKind::kContinuous});
    } else {
      ds.column_map.push_back({std::string(name.substr(0, eq)),
                               std::string(name.substr(eq + 1)),
                               ColumnKind::kCategory});
    }
  }
  std::vector<double> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = Trim(line);
    if (view.empty()) continue;
    const auto parts = SplitFields(view, ',');
    if (parts.size() != header.size()) {
      throw DataError(fmt::format("{}:{}: expected {} fields, found {}", source,
                                  line_no, header.size(), parts.size()));
    }
    for (size_t c = 0; c < width; ++c) {
      auto v = ParseDouble(parts[c]);
      if (!v) {
        throw DataError(fmt::format("{}:{}: bad number '{}'", source, line_no,
                                    parts[c]));
      }
      values.push_back(*v);
    }
    auto label = [&](std::string_view s) {
      if (s == "0") return 0;
      if (s == "1") return 1;
      throw DataError(fmt::format("{}:{}: label '{}' is not 0/1", source,
                                  line_no, s));
    };
    ds.y_private.push_back(label(parts[width]));
    ds.y_nonprivate.push_back(label(parts[width + 1]));
  }
  const auto n = static_cast<Eigen::Index>(ds.y_private.size());
  ds.features = Eigen::Map<const nn::Matrix>(values.data(),
                                             static_cast<Eigen::Index>(width), n);
  ds.Validate();
  return ds;
}

Dataset LoadDatasetCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return ReadDatasetCsv(in, path);
}

double MajorityRate(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  const auto n = static_cast<double>(labels.size());
  return std::max(static_cast<double>(ones), n - static_cast<double>(ones)) / n;
}

}  // namespace obfx::data

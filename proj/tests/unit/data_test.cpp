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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "obfx/data.hpp"
#include "obfx/error.hpp"

namespace obfx::data {
namespace {

constexpr const char* kRows =
    "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, "
    "Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K\n"
    "50, Self-emp-not-inc, 83311, Bachelors, 13, Married-civ-spouse, "
    "Exec-managerial, Husband, White, Male, 0, 0, 13, United-States, <=50K\n"
    "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, "
    "Not-in-family, White, Female, 0, 0, 40, ?, <=50K\n"
    "\n"
    "52, Self-emp-inc, 287927, HS-grad, 9, Married-civ-spouse, "
    "Exec-managerial, Wife, White, Female, 15024, 0, 40, Cuba, >50K.\n";

std::vector<AdultRecord> ParseText(const std::string& text, AdultParseStats* stats = nullptr) {
  std::istringstream in(text);
  return ParseAdultCsv(in, false, "inline", stats);
}

TEST(ParseAdultCsv, DropsMissingAndStripsLabelDot) {
  AdultParseStats stats;
  const auto recs = ParseText(std::string("|1x3 Cross validator\n") + kRows, &stats);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(stats.rows_read, 4);
  EXPECT_EQ(stats.rows_missing, 1);
  EXPECT_EQ(recs[2].fields[kAdultIncomeField], ">50K");
  EXPECT_EQ(recs[2].fields[kAdultSexField], "Female");
  EXPECT_EQ(recs[0].fields[1], "State-gov");
}

TEST(ParseAdultCsv, MalformedRowReportsLine) {
  try {
    ParseText("39, State-gov, 77516\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("inline:1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseText(std::string(kRows).replace(0, 2, "xx")), DataError);
}

TEST(AdultEncoding, RejectsUnknownCategory) {
  const auto recs = ParseText(kRows);
  // Row 1's workclass is absent from the vocabulary rows.
  const std::vector<AdultRecord> vocab = {recs[0], recs[2]};
  const auto enc = AdultEncoding::Fit(vocab, recs);
  EXPECT_NO_THROW(enc.Transform(vocab));
  EXPECT_THROW(enc.Transform(recs), DataError);
}

TEST(AdultEncoding, WidthsDifferByLabelOneHots) {
  const auto recs = ParseText(kRows);
  const auto enc = AdultEncoding::Fit(recs, recs);
  EXPECT_EQ(enc.encoded_width() - enc.feature_width(), 4);
  const Dataset ds = enc.Transform(recs);
  EXPECT_EQ(ds.width(), enc.feature_width());
  EXPECT_EQ(ds.y_private, (std::vector<int>{1, 1, 0}));
  EXPECT_EQ(ds.y_nonprivate, (std::vector<int>{0, 0, 1}));
}

// ---- real Adult files -------------------------------------------------------

class AdultFiles : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    for (const char* name : {"adult.data", "adult.test"}) {
      std::ifstream in(std::string(OBFX_ADULT_DIR) + "/" + name);
      ASSERT_TRUE(in) << name;
      AdultParseStats s;
      auto part = ParseAdultCsv(in, false, name, &s);
      raw_rows_ += s.rows_read;
      records_.insert(records_.end(), part.begin(), part.end());
    }
  }
  static inline std::vector<AdultRecord> records_;
  static inline int raw_rows_ = 0;
};

TEST_F(AdultFiles, CountsAndWidths) {
  EXPECT_EQ(raw_rows_, 48842);
  EXPECT_EQ(records_.size(), 45222u);
  const auto enc = AdultEncoding::Fit(records_, records_);
  EXPECT_EQ(enc.encoded_width(), 106);
  EXPECT_EQ(enc.feature_width(), 102);
}

TEST_F(AdultFiles, NormalizedOneHotAndInvertible) {
  const auto enc = AdultEncoding::Fit(records_, records_);
  const Dataset ds = enc.Transform(records_);
  ds.Validate();
  const auto& cols = enc.columns();
  ASSERT_EQ(static_cast<int>(cols.size()), ds.width());
  // age: min-max over the retained records.
  EXPECT_EQ(cols[0].attribute, "age");
  EXPECT_EQ(ds.features.row(0).minCoeff(), 0.0);
  EXPECT_EQ(ds.features.row(0).maxCoeff(), 1.0);
  EXPECT_TRUE((ds.features.array() >= 0.0).all() && (ds.features.array() <= 1.0).all());

  std::map<std::string, std::vector<int>> groups;
  for (int c = 0; c < ds.width(); ++c) {
    if (cols[c].kind == ColumnKind::kCategory) groups[cols[c].attribute].push_back(c);
  }
  EXPECT_EQ(groups.size(), 7u);  // sex and income are labels
  for (const auto& [attr, idx] : groups) {
    for (int r = 0; r < ds.size(); r += 97) {
      double sum = 0.0;
      for (int c : idx) sum += ds.features(c, r);
      ASSERT_EQ(sum, 1.0) << attr << " record " << r;
    }
  }
  for (int r = 0; r < ds.size(); r += 4111) {
    const auto decoded = enc.Decode(ds, r);
    for (int f = 0; f < kAdultFields; ++f) {
      EXPECT_EQ(decoded[f], records_[r].fields[f]) << kAdultAttributes[f] << " record " << r;
    }
  }
}

TEST_F(AdultFiles, TrainSplitSize) {
  const auto [train, test] = SplitIndices(static_cast<int>(records_.size()), {0.8, 0});
  EXPECT_EQ(train.size(), 36177u);
  EXPECT_EQ(test.size(), 9045u);
}

// ---- splits and batches -----------------------------------------------------

TEST(SplitIndices, FloorSizesAndDeterminism) {
  const auto [a, b] = SplitIndices(10, {0.8, 3});
  EXPECT_EQ(a.size(), 8u);
  EXPECT_EQ(b.size(), 2u);
  const auto [a2, b2] = SplitIndices(10, {0.8, 3});
  EXPECT_EQ(a, a2);
  EXPECT_EQ(b, b2);
  std::set<int> all(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  EXPECT_EQ(all.size(), 10u);
}

TEST(SplitIndices, DegenerateFractionThrows) {
  EXPECT_THROW(SplitIndices(10, {0.05, 0}), UsageError);
  EXPECT_THROW(SplitIndices(10, {1.0, 0}), UsageError);
  EXPECT_THROW(SplitIndices(1, {0.5, 0}), UsageError);
}

TEST(Minibatches, ChunkSizesAndCoverage) {
  const auto batches = Minibatches(130, 64, 5);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 64u);
  EXPECT_EQ(batches[1].size(), 64u);
  EXPECT_EQ(batches[2].size(), 2u);
  std::vector<int> all;
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 130; ++i) ASSERT_EQ(all[i], i);
  EXPECT_NE(Minibatches(130, 64, 6)[0], batches[0]);
  EXPECT_EQ(Minibatches(130, 64, 5)[0], batches[0]);
}

// ---- synthetic data ---------------------------------------------------------

double ChiSquare2x2(const Dataset& ds, int column, const std::vector<int>& labels) {
  double n[2][2] = {};
  for (int r = 0; r < ds.size(); ++r) n[ds.features(column, r) > 0.5][labels[r]] += 1;
  const double total = ds.size();
  double chi = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double e = (n[i][0] + n[i][1]) * (n[0][j] + n[1][j]) / total;
      chi += (n[i][j] - e) * (n[i][j] - e) / e;
    }
  }
  return chi;
}

TEST(SynthGenerate, Deterministic) {
  SynthSpec s;
  s.n = 300;
  s.seed = 4;
  const Dataset a = SynthGenerate(s);
  const Dataset b = SynthGenerate(s);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.y_private, b.y_private);
  EXPECT_EQ(a.width(), 20);
}

TEST(SynthGenerate, ZeroCorrelationIsIndependent) {
  SynthSpec s;
  s.n = 10000;
  s.correlation = 0.0;
  s.seed = 9;
  const Dataset ds = SynthGenerate(s);
  // 1 degree of freedom, p = 0.01.
  EXPECT_LT(ChiSquare2x2(ds, 1, ds.y_nonprivate), 6.635);
  EXPECT_LT(ChiSquare2x2(ds, 3, ds.y_private), 6.635);
}

TEST(SynthGenerate, FullCorrelationIsLinearlySeparable) {
  SynthSpec s;
  s.n = 2000;
  s.correlation = 1.0;
  const Dataset ds = SynthGenerate(s);
  int correct = 0;
  for (int r = 0; r < ds.size(); ++r) correct += (ds.features(1, r) > 0.5) == ds.y_nonprivate[r];
  EXPECT_EQ(correct, ds.size());
}

TEST(SynthGenerate, CorrelationSetsAgreementRate) {
  SynthSpec s;
  s.n = 20000;
  s.correlation = 0.9;
  const Dataset ds = SynthGenerate(s);
  int agree = 0;
  for (int r = 0; r < ds.size(); ++r) agree += (ds.features(1, r) > 0.5) == ds.y_nonprivate[r];
  const double rate = static_cast<double>(agree) / ds.size();
  EXPECT_NEAR(rate, 0.95, 3.0 * std::sqrt(0.95 * 0.05 / ds.size()));
}

// ---- CSV ------------------------------------------------------------------

TEST(DatasetCsv, RoundTripIsExact) {
  SynthSpec s;
  s.n = 50;
  const Dataset ds = SynthGenerate(s);
  std::ostringstream out;
  WriteDatasetCsv(ds, out);
  std::istringstream in(out.str());
  const Dataset back = ReadDatasetCsv(in, "mem");
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.y_private, ds.y_private);
  EXPECT_EQ(back.y_nonprivate, ds.y_nonprivate);
  ASSERT_EQ(back.column_map.size(), ds.column_map.size());
  EXPECT_EQ(back.column_map[1].Name(), "tied_nonprivate=1");
  std::ostringstream again;
  WriteDatasetCsv(back, again);
  EXPECT_EQ(again.str(), out.str());
}

TEST(DatasetCsv, BadCellReportsLine) {
  std::istringstream in("a,y_private,y_nonprivate\n0.5,0,1\nabc,1,0\n");
  try {
    ReadDatasetCsv(in, "mem");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:3"), std::string::npos) << e.what();
  }
}

TEST(MajorityRate, Basic) {
  const std::vector<int> y = {0, 1, 1, 1, 0};
  EXPECT_DOUBLE_EQ(MajorityRate(y), 0.6);
}

}  // namespace
}  // namespace obfx::data

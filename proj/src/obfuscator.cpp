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

#include "obfx/obfuscator.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "obfx/error.hpp"
#include "obfx/rng.hpp"
#include "text_util.hpp"

namespace obfx {

using nn::Activation;
using nn::Matrix;

void ObfuscatorArch::Validate() const {
  encoder.Validate();
  classifier.Validate();
  rest.Validate();
  decoder.Validate();
  if (classifier.input_dim() != bottleneck() || rest.input_dim() != bottleneck()) {
    throw UsageError("classifier and rest heads must read the encoder output");
  }
  if (classifier_dim() + rest_dim() != decoder.input_dim()) {
    throw UsageError(fmt::format(
        "decoder input {} != classifier {} + rest {}", decoder.input_dim(),
        classifier_dim(), rest_dim()));
  }
  if (decoder.output_dim() != input_dim()) {
    throw UsageError("decoder output width must equal encoder input width");
  }
  if (classifier.layers.back().activation != Activation::kLogSoftmax) {
    throw UsageError("classifier head must end in log_softmax");
  }
}

std::int64_t ObfuscatorArch::ParamCount() const {
  return nn::ParamCount(encoder) + nn::ParamCount(classifier) +
         nn::ParamCount(rest) + nn::ParamCount(decoder);
}

ObfuscatorArch CategoricalArch(int input_dim) {
  ObfuscatorArch arch;
  const std::array<int, 4> enc = {input_dim, 128, 128, 64};
  const std::array<int, 4> cls = {64, 32, 8, 2};
  const std::array<int, 3> rst = {64, 64, 62};
  const std::array<int, 4> dec = {64, 128, 128, input_dim};
  arch.encoder = nn::MakeChain(enc, Activation::kRelu, Activation::kRelu);
  arch.classifier =
      nn::MakeChain(cls, Activation::kRelu, Activation::kLogSoftmax);
  arch.rest = nn::MakeChain(rst, Activation::kRelu, Activation::kRelu);
  arch.decoder = nn::MakeChain(dec, Activation::kRelu, Activation::kSigmoid);
  arch.Validate();
  return arch;
}

void TrainHyper::Validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be > 0");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (patience < 1) throw UsageError("patience must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw UsageError("validation fraction must be in (0,1)");
  }
}

void ObfuscatorModel::Validate() const {
  arch.Validate();
  nn::CheckParams(arch.encoder, encoder);
  nn::CheckParams(arch.classifier, classifier);
  nn::CheckParams(arch.rest, rest);
  nn::CheckParams(arch.decoder, decoder);
}

ObfuscatorModel InitObfuscator(const ObfuscatorArch& arch, std::uint64_t seed) {
  arch.Validate();
  ObfuscatorModel m;
  m.arch = arch;
  m.encoder = nn::InitNetwork(arch.encoder, DeriveSeed(seed, kStreamInit, 0));
  m.classifier =
      nn::InitNetwork(arch.classifier, DeriveSeed(seed, kStreamInit, 1));
  m.rest = nn::InitNetwork(arch.rest, DeriveSeed(seed, kStreamInit, 2));
  m.decoder = nn::InitNetwork(arch.decoder, DeriveSeed(seed, kStreamInit, 3));
  m.meta.seed = seed;
  return m;
}

Matrix Encode(const ObfuscatorModel& model, const Matrix& x) {
  return nn::Forward(model.arch.encoder, model.encoder, x, nn::Mode::kEval,
                     nullptr, nullptr);
}

Matrix Classify(const ObfuscatorModel& model, const Matrix& v) {
  return nn::Forward(model.arch.classifier, model.classifier, v,
                     nn::Mode::kEval, nullptr, nullptr);
}

Matrix RestHead(const ObfuscatorModel& model, const Matrix& v) {
  return nn::Forward(model.arch.rest, model.rest, v, nn::Mode::kEval, nullptr,
                     nullptr);
}

Matrix Decode(const ObfuscatorModel& model, const Matrix& w_np,
              const Matrix& w_p) {
  if (w_np.cols() != w_p.cols()) {
    throw UsageError("classifier and rest outputs have different batch sizes");
  }
  Matrix joined(w_np.rows() + w_p.rows(), w_np.cols());
  joined << w_np, w_p;
  return nn::Forward(model.arch.decoder, model.decoder, joined,
                     nn::Mode::kEval, nullptr, nullptr);
}

Matrix Reconstruct(const ObfuscatorModel& model, const Matrix& x) {
  const Matrix v = Encode(model, x);
  return Decode(model, Classify(model, v), RestHead(model, v));
}

ObfuscatorGradients ComputeGradients(const ObfuscatorModel& model,
                                     const Matrix& x,
                                     std::span<const int> y_nonprivate,
                                     LossTerm term, nn::Mode mode, Rng* rng) {
  const ObfuscatorArch& arch = model.arch;
  nn::ForwardCache enc_cache, cls_cache, rest_cache, dec_cache;
  const Matrix v = nn::Forward(arch.encoder, model.encoder, x, mode, rng,
                               &enc_cache);
  const Matrix w_np = nn::Forward(arch.classifier, model.classifier, v, mode,
                                  rng, &cls_cache);
  const Matrix w_p =
      nn::Forward(arch.rest, model.rest, v, mode, rng, &rest_cache);
  Matrix joined(w_np.rows() + w_p.rows(), x.cols());
  joined << w_np, w_p;
  const Matrix x_rec = nn::Forward(arch.decoder, model.decoder, joined, mode,
                                   rng, &dec_cache);

  nn::Loss ae = nn::MseLoss(x, x_rec);
  nn::Loss c = nn::NllLoss(w_np, y_nonprivate);

  const bool use_ae = term != LossTerm::kClassifier;
  const bool use_c = term != LossTerm::kAutoencoder;

  ObfuscatorGradients out;
  out.loss_ae = ae.value;
  out.loss_c = c.value;

  Matrix d_joined;
  const Matrix d_xrec =
      use_ae ? ae.grad : Matrix::Zero(x_rec.rows(), x_rec.cols());
  out.decoder = nn::Backward(arch.decoder, model.decoder, dec_cache, d_xrec,
                             &d_joined);
  Matrix d_wnp = d_joined.topRows(w_np.rows());
  const Matrix d_wp = d_joined.bottomRows(w_p.rows());
  if (use_c) d_wnp += c.grad;

  Matrix d_v_cls, d_v_rest;
  out.classifier = nn::Backward(arch.classifier, model.classifier, cls_cache,
                                d_wnp, &d_v_cls);
  out.rest = nn::Backward(arch.rest, model.rest, rest_cache, d_wp, &d_v_rest);
  out.encoder = nn::Backward(arch.encoder, model.encoder, enc_cache,
                             d_v_cls + d_v_rest);
  return out;
}

namespace {

constexpr Eigen::Index kScoreChunk = 2048;

double ArgmaxAccuracy(const Matrix& log_probs, std::span<const int> labels) {
  int correct = 0;
  for (Eigen::Index c = 0; c < log_probs.cols(); ++c) {
    Eigen::Index best = 0;
    log_probs.col(c).maxCoeff(&best);
    if (best == labels[c]) ++correct;
  }
  return log_probs.cols() > 0 ? static_cast<double>(correct) /
                                    static_cast<double>(log_probs.cols())
                              : 0.0;
}

}  // namespace

ObfuscatorScores Score(const ObfuscatorModel& model, const data::Dataset& ds) {
  if (ds.size() == 0) throw UsageError("cannot score an empty dataset");
  double ae = 0.0, c = 0.0, acc = 0.0;
  for (Eigen::Index start = 0; start < ds.size(); start += kScoreChunk) {
    const Eigen::Index n = std::min<Eigen::Index>(kScoreChunk, ds.size() - start);
    const Matrix x = ds.features.middleCols(start, n);
    const std::span<const int> y(ds.y_nonprivate.data() + start,
                                 static_cast<size_t>(n));
    const Matrix v = Encode(model, x);
    const Matrix w_np = Classify(model, v);
    const Matrix x_rec = Decode(model, w_np, RestHead(model, v));
    const double w = static_cast<double>(n);
    ae += nn::MseLoss(x, x_rec).value * w;
    c += nn::NllLoss(w_np, y).value * w;
    acc += ArgmaxAccuracy(w_np, y) * w;
  }
  const double n = static_cast<double>(ds.size());
  return {ae / n, c / n, acc / n};
}

TrainResult TrainObfuscator(const ObfuscatorArch& arch,
                            const data::Dataset& train,
                            const data::Dataset& val, const TrainHyper& hyper) {
  hyper.Validate();
  arch.Validate();
  if (val.size() == 0) throw UsageError("validation set is empty");
  if (train.size() == 0) throw UsageError("training set is empty");
  if (train.width() != arch.input_dim() || val.width() != arch.input_dim()) {
    throw UsageError(fmt::format("dataset width {} != model input {}",
                                 train.width(), arch.input_dim()));
  }

  ObfuscatorModel model = InitObfuscator(arch, hyper.seed);
  std::array<nn::AdamState, 4> adam = {
      nn::AdamState::ZerosLike(model.encoder, hyper.adam),
      nn::AdamState::ZerosLike(model.classifier, hyper.adam),
      nn::AdamState::ZerosLike(model.rest, hyper.adam),
      nn::AdamState::ZerosLike(model.decoder, hyper.adam)};
  Rng dropout_rng(DeriveSeed(hyper.seed, kStreamDropout));

  TrainResult result;
  const ObfuscatorScores init = Score(model, val);
  result.history.initial_val_ae = init.loss_ae;
  result.history.initial_val_accuracy = init.accuracy;

  ObfuscatorModel best = model;
  double best_val = init.loss_ae;
  best.meta.best_val_ae = init.loss_ae;
  best.meta.val_accuracy = init.accuracy;
  int since_best = 0;

  std::vector<int> labels;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    const auto batches = data::Minibatches(
        train.size(), hyper.batch_size,
        DeriveSeed(hyper.seed, kStreamShuffle, static_cast<std::uint64_t>(epoch)));
    double sum_ae = 0.0, sum_c = 0.0;
    for (size_t b = 0; b < batches.size(); ++b) {
      const auto& idx = batches[b];
      Matrix x(train.width(), static_cast<Eigen::Index>(idx.size()));
      labels.resize(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) {
        x.col(static_cast<Eigen::Index>(i)) = train.features.col(idx[i]);
        labels[i] = train.y_nonprivate[idx[i]];
      }
      ObfuscatorGradients g = ComputeGradients(
          model, x, labels, LossTerm::kJoint, nn::Mode::kTrain, &dropout_rng);
      if (!std::isfinite(g.loss_ae) || !std::isfinite(g.loss_c)) {
        throw NumericError(fmt::format(
            "non-finite loss at epoch {} batch {} (L_ae={}, L_C={})", epoch, b,
            g.loss_ae, g.loss_c));
      }
      nn::AdamStep(model.encoder, g.encoder, adam[0], hyper.learning_rate);
      nn::AdamStep(model.classifier, g.classifier, adam[1], hyper.learning_rate);
      nn::AdamStep(model.rest, g.rest, adam[2], hyper.learning_rate);
      nn::AdamStep(model.decoder, g.decoder, adam[3], hyper.learning_rate);
      sum_ae += g.loss_ae * static_cast<double>(idx.size());
      sum_c += g.loss_c * static_cast<double>(idx.size());
    }
    const ObfuscatorScores s = Score(model, val);
    if (!std::isfinite(s.loss_ae)) {
      throw NumericError(fmt::format("non-finite validation loss at epoch {}",
                                     epoch));
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_ae = sum_ae / train.size();
    stats.train_c = sum_c / train.size();
    stats.val_ae = s.loss_ae;
    stats.val_c = s.loss_c;
    stats.val_accuracy = s.accuracy;
    result.history.epochs.push_back(stats);
    model.meta.epochs_run = epoch;

    if (s.loss_ae < best_val) {
      best_val = s.loss_ae;
      best = model;
      best.meta.best_epoch = epoch;
      best.meta.best_val_ae = s.loss_ae;
      best.meta.val_accuracy = s.accuracy;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      result.history.early_stopped = true;
      break;
    }
  }
  best.meta.seed = hyper.seed;
  best.meta.epochs_run = static_cast<int>(result.history.epochs.size());
  result.model = std::move(best);
  return result;
}

void WriteHistoryCsv(const TrainHistory& history, std::ostream& out) {
  out << "epoch,train_ae,train_c,val_ae,val_c,val_accuracy,best\n";
  out << fmt::format("0,,,{},,{},{}\n", FormatDouble(history.initial_val_ae),
                     FormatDouble(history.initial_val_accuracy),
                     history.best_epoch == 0 ? 1 : 0);
  for (const auto& e : history.epochs) {
    out << fmt::format("{},{},{},{},{},{},{}\n", e.epoch,
                       FormatDouble(e.train_ae), FormatDouble(e.train_c),
                       FormatDouble(e.val_ae), FormatDouble(e.val_c),
                       FormatDouble(e.val_accuracy),
                       e.epoch == history.best_epoch ? 1 : 0);
  }
}

// ---------------------------------------------------------------------------
// Model file.

namespace {

constexpr const char* kMagic = "OBFNET v1";
constexpr std::array<const char*, 4> kBlockNames = {"encoder", "classifier",
                                                    "rest", "decoder"};

void WriteNetwork(std::ostream& out, const char* name,
                  const nn::NetworkSpec& spec, const nn::NetworkParams& p) {
  out << "network " << name << '\n';
  out << "leaky_slope " << FormatDouble(spec.leaky_slope) << '\n';
  out << "layers " << spec.layers.size() << '\n';
  for (const auto& l : spec.layers) {
    out << fmt::format("layer {} {} {} {}\n", l.in_dim, l.out_dim,
                       nn::ActivationName(l.activation),
                       FormatDouble(l.dropout_p));
  }
  std::string line;
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    out << "weights " << i << '\n';
    for (Eigen::Index r = 0; r < p.layers[i].weight.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < p.layers[i].weight.cols(); ++c) {
        if (c > 0) line += ' ';
        line += FormatDouble(p.layers[i].weight(r, c));
      }
      out << line << '\n';
    }
    out << "biases " << i << '\n';
    line.clear();
    for (Eigen::Index r = 0; r < p.layers[i].bias.size(); ++r) {
      if (r > 0) line += ' ';
      line += FormatDouble(p.layers[i].bias(r));
    }
    out << line << '\n';
  }
  out << "end\n";
}

class TokenReader {
 public:
  TokenReader(std::istream& in, const std::string& source)
      : in_(in), source_(source) {}

  std::string Next() {
    std::string tok;
    if (!(in_ >> tok)) throw DataError(source_ + ": unexpected end of model file");
    return tok;
  }
  void Expect(std::string_view want) {
    const std::string got = Next();
    if (got != want) {
      throw DataError(fmt::format("{}: expected '{}', found '{}'", source_,
                                  want, got));
    }
  }
  double Double() {
    const std::string tok = Next();
    auto v = ParseDouble(tok);
    if (!v) throw DataError(fmt::format("{}: bad number '{}'", source_, tok));
    return *v;
  }
  long long Integer() {
    const std::string tok = Next();
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw DataError(fmt::format("{}: bad integer '{}'", source_, tok));
    }
    return v;
  }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  const std::string& source_;
};

void ReadNetwork(TokenReader& rd, const char* name, nn::NetworkSpec& spec,
                 nn::NetworkParams& p) {
  rd.Expect("network");
  rd.Expect(name);
  rd.Expect("leaky_slope");
  spec.leaky_slope = rd.Double();
  rd.Expect("layers");
  const long long n = rd.Integer();
  if (n < 1 || n > 1000) throw DataError(rd.source() + ": bad layer count");
  spec.layers.clear();
  for (long long i = 0; i < n; ++i) {
    rd.Expect("layer");
    nn::LayerSpec l;
    l.in_dim = static_cast<int>(rd.Integer());
    l.out_dim = static_cast<int>(rd.Integer());
    const std::string act = rd.Next();
    auto parsed = nn::ParseActivation(act);
    if (!parsed) {
      throw DataError(fmt::format("{}: unknown activation '{}'", rd.source(), act));
    }
    l.activation = *parsed;
    l.dropout_p = rd.Double();
    spec.layers.push_back(l);
  }
  try {
    spec.Validate();
  } catch (const UsageError& e) {
    throw DataError(fmt::format("{}: {}: {}", rd.source(), name, e.what()));
  }
  p.layers.clear();
  for (long long i = 0; i < n; ++i) {
    const auto& l = spec.layers[static_cast<size_t>(i)];
    nn::LayerParams lp;
    lp.weight.resize(l.out_dim, l.in_dim);
    lp.bias.resize(l.out_dim);
    rd.Expect("weights");
    if (rd.Integer() != i) throw DataError(rd.source() + ": layer index mismatch");
    for (int r = 0; r < l.out_dim; ++r) {
      for (int c = 0; c < l.in_dim; ++c) lp.weight(r, c) = rd.Double();
    }
    rd.Expect("biases");
    if (rd.Integer() != i) throw DataError(rd.source() + ": layer index mismatch");
    for (int r = 0; r < l.out_dim; ++r) lp.bias(r) = rd.Double();
    p.layers.push_back(std::move(lp));
  }
  rd.Expect("end");
}

}  // namespace

void WriteModel(const ObfuscatorModel& model, std::ostream& out) {
  model.Validate();
  out << kMagic << '\n';
  WriteNetwork(out, kBlockNames[0], model.arch.encoder, model.encoder);
  WriteNetwork(out, kBlockNames[1], model.arch.classifier, model.classifier);
  WriteNetwork(out, kBlockNames[2], model.arch.rest, model.rest);
  WriteNetwork(out, kBlockNames[3], model.arch.decoder, model.decoder);
  out << "meta seed " << model.meta.seed << '\n';
  out << "meta epochs_run " << model.meta.epochs_run << '\n';
  out << "meta best_epoch " << model.meta.best_epoch << '\n';
  out << "meta best_val_ae " << FormatDouble(model.meta.best_val_ae) << '\n';
  out << "meta val_accuracy " << FormatDouble(model.meta.val_accuracy) << '\n';
}

ObfuscatorModel ReadModel(std::istream& in, const std::string& source) {
  std::string magic;
  if (!std::getline(in, magic) || Trim(magic) != kMagic) {
    throw DataError(fmt::format("{}: missing '{}' header", source, kMagic));
  }
  TokenReader rd(in, source);
  ObfuscatorModel m;
  ReadNetwork(rd, kBlockNames[0], m.arch.encoder, m.encoder);
  ReadNetwork(rd, kBlockNames[1], m.arch.classifier, m.classifier);
  ReadNetwork(rd, kBlockNames[2], m.arch.rest, m.rest);
  ReadNetwork(rd, kBlockNames[3], m.arch.decoder, m.decoder);
  std::string tok;
  while (in >> tok) {
    if (tok != "meta") throw DataError(fmt::format("{}: unexpected '{}'", source, tok));
    const std::string key = rd.Next();
    if (key == "seed") {
      m.meta.seed = static_cast<std::uint64_t>(std::stoull(rd.Next()));
    } else if (key == "epochs_run") {
      m.meta.epochs_run = static_cast<int>(rd.Integer());
    } else if (key == "best_epoch") {
      m.meta.best_epoch = static_cast<int>(rd.Integer());
    } else if (key == "best_val_ae") {
      m.meta.best_val_ae = rd.Double();
    } else if (key == "val_accuracy") {
      m.meta.val_accuracy = rd.Double();
    } else {
      rd.Next();  // unknown metadata is ignored
    }
  }
  try {
    m.Validate();
  } catch (const UsageError& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
  return m;
}

void SaveModel(const ObfuscatorModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  WriteModel(model, out);
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

ObfuscatorModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return ReadModel(in, path);
}

}  // namespace obfx

// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/lipgen/student.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "pvse/common/error.h"
#include "pvse/common/parallel.h"
#include "pvse/common/random.h"
#include "pvse/nn/adam.h"
#include "pvse/nn/ops.h"
#include "pvse/nn/serialize.h"

namespace pvse::lipgen {

using nn::LayerSpec;
using nn::Tensor;

namespace {

constexpr int kChunkSize = signal::MelChunk::kFrames * signal::MelChunk::kBands;
constexpr int kEncoderBlocks = 5;
constexpr int kDecoderBlocks = 5;
constexpr char kKind[] = "student";

}  // namespace

void StudentConfig::Validate() const {
  PVSE_CHECK(base_channels > 0 && embed_dim > 0, kInvalidConfig,
             "student widths must be positive (base ", base_channels, ", embed ", embed_dim,
             ")");
}

nlohmann::ordered_json StudentConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = kKind;
  j["base_channels"] = base_channels;
  j["embed_dim"] = embed_dim;
  return j;
}

StudentConfig StudentConfig::FromJson(const nlohmann::json &j) {
  PVSE_CHECK(j.value("kind", "") == kKind, kInvalidConfig, "checkpoint is not a student");
  StudentConfig c;
  c.base_channels = j.at("base_channels").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.Validate();
  return c;
}

template <typename T>
StudentNet<T>::StudentNet(const StudentConfig &config) : config_(config) {
  config_.Validate();
  const int b = config_.base_channels;
  int ch = 1;
  for (int i = 0; i < kEncoderBlocks; ++i) {
    const int out = b << i;
    layers_.emplace_back(LayerSpec::Conv2d(ch, out, 3, 3, 2, 2, 1, 1));
    ch = out;
  }
  layers_.emplace_back(LayerSpec::Conv2d(ch, config_.embed_dim, 1, 3, 1, 1, 0, 0));
  layers_.emplace_back(LayerSpec::TConv2d(config_.embed_dim, ch, 2, 4, 1, 1, 0, 0));
  for (int i = 1; i < kDecoderBlocks; ++i) {
    layers_.emplace_back(LayerSpec::TConv2d(ch, ch / 2, 4, 4, 2, 2, 1, 1));
    ch /= 2;
  }
  layers_.emplace_back(LayerSpec::Conv2d(ch, 1, 1, 1, 1, 1, 0, 0));
  prior_ = Tensor<T>::Zeros({1, 1, kFrameHeight, kFrameWidth}, true);
}

template <typename T>
void StudentNet<T>::Init(uint64_t seed) {
  Rng rng(seed);
  for (auto &layer : layers_) layer.Init(rng);
  for (T &v : layers_.back().params()[0].data()) v = T(0);
  for (T &v : prior_.data()) v = T(0);
}

template <typename T>
void StudentNet<T>::SetPrior(const std::vector<float> &mean_frame) {
  PVSE_CHECK(mean_frame.size() == static_cast<size_t>(kFramePixels), kShapeMismatch,
             "prior needs ", kFramePixels, " pixels, got ", mean_frame.size());
  constexpr double kEps = 1e-3;
  auto p = prior_.data();
  for (size_t i = 0; i < p.size(); ++i) {
    const double v = std::clamp(static_cast<double>(mean_frame[i]), kEps, 1.0 - kEps);
    p[i] = static_cast<T>(std::log(v / (1.0 - v)));
  }
}

template <typename T>
Tensor<T> StudentNet<T>::Forward(const Tensor<T> &mel) const {
  PVSE_CHECK(mel.rank() == 4 && mel.dim(1) == 1 && mel.dim(2) == signal::MelChunk::kFrames &&
                 mel.dim(3) == signal::MelChunk::kBands,
             kShapeMismatch, "student expects [N,1,16,80], got ", nn::DimsToString(mel.dims()));
  // Fixed affine map of the log-mel floor..floor+8 range onto [-0.5, 0.5].
  const T floor = static_cast<T>(std::log(1e-5));
  Tensor<T> h = nn::Add(nn::Scale(mel, T(1) / static_cast<T>(kEnergyRange)),
                        Tensor<T>::Full(mel.dims(), -floor / static_cast<T>(kEnergyRange) - T(0.5)));
  for (size_t i = 0; i + 1 < layers_.size(); ++i) h = nn::Relu(layers_[i].Forward(h));
  return nn::Sigmoid(nn::AddBatchBias(layers_.back().Forward(h), prior_));
}

template <typename T>
std::vector<Tensor<T>> StudentNet<T>::Parameters() const {
  std::vector<Tensor<T>> out;
  for (const auto &layer : layers_) {
    for (const auto &p : layer.params()) out.push_back(p);
  }
  out.push_back(prior_);
  return out;
}

template <typename T>
nn::ParamList<T> StudentNet<T>::NamedParams() const {
  nn::ParamList<T> out;
  for (size_t i = 0; i < layers_.size(); ++i) {
    std::string prefix;
    if (i < kEncoderBlocks) {
      prefix = "enc" + std::to_string(i);
    } else if (i == kEncoderBlocks) {
      prefix = "embed";
    } else if (i + 1 < layers_.size()) {
      prefix = "dec" + std::to_string(i - kEncoderBlocks - 1);
    } else {
      prefix = "head";
    }
    layers_[i].CollectParams(prefix, &out);
  }
  out.emplace_back("prior", prior_);
  return out;
}

template class StudentNet<float>;
template class StudentNet<double>;

void StudentModel::Save(const std::string &dir, int64_t step) const {
  nn::SaveCheckpoint(dir, net.config().ToJson(), step, net.NamedParams());
}

StudentModel LoadStudent(const std::string &dir) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(dir);
  StudentModel model{StudentNet<float>(StudentConfig::FromJson(ckpt.architecture))};
  auto named = model.net.NamedParams();
  nn::CopyParams(ckpt.params, &named);
  return model;
}

namespace {

Tensor<float> StackChunks(const std::vector<const float *> &chunks) {
  std::vector<float> data(chunks.size() * kChunkSize);
  for (size_t i = 0; i < chunks.size(); ++i) {
    std::copy(chunks[i], chunks[i] + kChunkSize, data.begin() + i * kChunkSize);
  }
  return Tensor<float>::FromData(
      {static_cast<int>(chunks.size()), 1, signal::MelChunk::kFrames, signal::MelChunk::kBands},
      std::move(data));
}

// Noisy mel chunks paired with teacher targets, flattened.
struct DistillSet {
  std::vector<float> mel;     // n x 1280
  std::vector<float> target;  // n x 2048
  size_t size() const { return target.size() / kFramePixels; }
};

DistillSet BuildDistillSet(const std::vector<data::MixManifestEntry> &entries,
                           const TeacherConfig &teacher) {
  std::vector<DistillSet> parts(entries.size());
  ParallelFor(entries.size(), [&](size_t e) {
    const data::MixResult mix = data::RealizeEntry(entries[e]);
    const auto noisy_mel = signal::ComputeMel(mix.mixture);
    const auto clean_mel = signal::ComputeMel(mix.clean);
    const int n = NumLipFrames(mix.mixture.size(), mix.mixture.sample_rate);
    const std::string frame_dir =
        teacher.kind == TeacherKind::kFileAdapter
            ? (std::filesystem::path(teacher.dir) /
               std::filesystem::path(entries[e].clean_path).stem())
                  .string()
            : std::string();
    DistillSet &part = parts[e];
    for (int i = 0; i < n; ++i) {
      const auto chunk = signal::ChunkMel(noisy_mel, i);
      part.mel.insert(part.mel.end(), chunk.values.begin(), chunk.values.end());
      const LipFrame target = teacher.kind == TeacherKind::kSynthetic
                                  ? TeacherGenerate(signal::ChunkMel(clean_mel, i))
                                  : TeacherFromFiles(frame_dir, i);
      part.target.insert(part.target.end(), target.pixels.begin(), target.pixels.end());
    }
  });
  DistillSet all;
  for (const auto &p : parts) {
    all.mel.insert(all.mel.end(), p.mel.begin(), p.mel.end());
    all.target.insert(all.target.end(), p.target.begin(), p.target.end());
  }
  return all;
}

double DistillL1(const DistillSet &set, const StudentModel &model) {
  constexpr size_t kBatch = 64;
  nn::NoGradGuard no_grad;
  double total = 0.0;
  for (size_t start = 0; start < set.size(); start += kBatch) {
    const size_t end = std::min(set.size(), start + kBatch);
    std::vector<const float *> ptrs;
    for (size_t i = start; i < end; ++i) ptrs.push_back(set.mel.data() + i * kChunkSize);
    const Tensor<float> out = model.net.Forward(StackChunks(ptrs));
    const float *target = set.target.data() + start * kFramePixels;
    for (size_t k = 0; k < out.size(); ++k) {
      total += std::abs(static_cast<double>(out.data()[k]) - target[k]);
    }
  }
  return total / static_cast<double>(set.target.size());
}

}  // namespace

std::vector<LipFrame> StudentForwardBatch(const std::vector<signal::MelChunk> &chunks,
                                          const StudentModel &model) {
  constexpr size_t kBatch = 64;
  nn::NoGradGuard no_grad;
  std::vector<LipFrame> frames;
  frames.reserve(chunks.size());
  for (size_t start = 0; start < chunks.size(); start += kBatch) {
    const size_t end = std::min(chunks.size(), start + kBatch);
    std::vector<const float *> ptrs;
    for (size_t i = start; i < end; ++i) {
      PVSE_CHECK(chunks[i].values.size() == static_cast<size_t>(kChunkSize), kShapeMismatch,
                 "mel chunk must be 16x80, got ", chunks[i].values.size(), " values");
      ptrs.push_back(chunks[i].values.data());
    }
    const Tensor<float> out = model.net.Forward(StackChunks(ptrs));
    for (size_t i = 0; i < ptrs.size(); ++i) {
      LipFrame f;
      std::copy(out.data().begin() + i * kFramePixels,
                out.data().begin() + (i + 1) * kFramePixels, f.pixels.begin());
      frames.push_back(std::move(f));
    }
  }
  return frames;
}

LipFrame StudentForward(const signal::MelChunk &noisy_chunk, const StudentModel &model) {
  return StudentForwardBatch({noisy_chunk}, model).front();
}

StudentModel TrainStudent(const std::vector<data::MixManifestEntry> &manifest,
                          const TeacherConfig &teacher, const StudentTrainConfig &config,
                          nn::TrainLog *log) {
  const auto train = data::FilterSplit(manifest, data::Split::kTrain);
  PVSE_CHECK(!train.empty(), kEmptyManifest, "no training entries in manifest");
  PVSE_CHECK(config.batch > 0 && config.steps >= 0 && config.log_every > 0 && config.lr > 0,
             kInvalidConfig, "invalid student training config");

  const DistillSet set = BuildDistillSet(train, teacher);
  PVSE_CHECK(set.size() > 0, kEmptyManifest, "training entries are shorter than one lip frame");

  StudentModel model{StudentNet<float>(config.net)};
  model.net.Init(MixSeed(config.seed, 1));
  std::vector<double> acc(kFramePixels, 0.0);
  for (size_t i = 0; i < set.target.size(); ++i) acc[i % kFramePixels] += set.target[i];
  std::vector<float> mean_frame(kFramePixels);
  for (int i = 0; i < kFramePixels; ++i) {
    mean_frame[i] = static_cast<float>(acc[i] / static_cast<double>(set.size()));
  }
  model.net.SetPrior(mean_frame);
  auto params = model.net.Parameters();
  nn::AdamState<float> adam;
  adam.config.lr = config.lr;
  Rng rng(MixSeed(config.seed, 2));

  nn::TrainLog local;
  nn::TrainLog &out = log ? *log : local;
  nn::LossWindow window(config.log_every);
  int64_t step = 0;
  std::vector<float> target(static_cast<size_t>(config.batch) * kFramePixels);
  while (step < config.steps) {
    std::vector<const float *> ptrs;
    for (int b = 0; b < config.batch; ++b) {
      const size_t idx = rng.Index(set.size());
      ptrs.push_back(set.mel.data() + idx * kChunkSize);
      std::copy_n(set.target.data() + idx * kFramePixels, kFramePixels,
                  target.begin() + static_cast<size_t>(b) * kFramePixels);
    }
    nn::ZeroGrads(params);
    const Tensor<float> pred = model.net.Forward(StackChunks(ptrs));
    Tensor<float> loss =
        nn::L1Loss(pred, Tensor<float>::FromData(pred.dims(), target));
    loss.Backward();
    nn::AdamStep(params, &adam);
    ++step;
    if (window.Add(step, loss.item(), &out) && config.target_loss > 0 &&
        window.last() < config.target_loss) {
      break;
    }
  }
  out.steps_run = step;
  out.final_loss = DistillL1(set, model);
  return model;
}

double StudentL1(const std::vector<data::MixManifestEntry> &entries,
                 const TeacherConfig &teacher, const StudentModel &model) {
  PVSE_CHECK(!entries.empty(), kEmptyManifest, "no entries to evaluate");
  return DistillL1(BuildDistillSet(entries, teacher), model);
}

}  // namespace pvse::lipgen

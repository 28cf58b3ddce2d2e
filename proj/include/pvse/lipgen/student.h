// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_LIPGEN_STUDENT_H_
#define PVSE_LIPGEN_STUDENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvse/data/manifest.h"
#include "pvse/lipgen/lip_frame.h"
#include "pvse/lipgen/teacher.h"
#include "pvse/nn/layers.h"
#include "pvse/nn/train_log.h"
#include "pvse/signal/mel.h"

namespace pvse::lipgen {

struct StudentConfig {
  int base_channels = 16;  // encoder widths base x {1, 2, 4, 8, 16}
  int embed_dim = 512;

  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  static StudentConfig FromJson(const nlohmann::json &j);
};

// Mel chunk [N, 1, 16, 80] -> frames [N, 1, 32, 64] in (0, 1).
//   input:   (mel - log 1e-5) / 8 - 0.5, a fixed map matching the teacher range
//   encoder: 5 x (conv 3x3 stride 2 + ReLU), 16x80 -> 1x3,
//            then a 1x3 conv to the embedding (1x1 spatial) + ReLU
//   decoder: tconv 2x4 -> 2x4, 4 x (tconv 4x4 stride 2) -> 32x64, ReLU each
//   head:    1x1 conv, plus a learned per-pixel logit prior, + sigmoid
template <typename T>
class StudentNet {
 public:
  explicit StudentNet(const StudentConfig &config = {});

  const StudentConfig &config() const { return config_; }
  void Init(uint64_t seed);
  nn::Tensor<T> Forward(const nn::Tensor<T> &mel) const;

  std::vector<nn::Tensor<T>> Parameters() const;
  nn::ParamList<T> NamedParams() const;
  std::vector<nn::Layer<T>> &layers() { return layers_; }

  // Sets the prior to logit(clamp(frame, 1e-3, 1 - 1e-3)).
  void SetPrior(const std::vector<float> &mean_frame);

 private:
  StudentConfig config_;
  std::vector<nn::Layer<T>> layers_;  // conv/tconv layers, ReLU applied inline
  nn::Tensor<T> prior_;               // [1, 1, 32, 64]
};

extern template class StudentNet<float>;
extern template class StudentNet<double>;

struct StudentModel {
  StudentNet<float> net;

  void Save(const std::string &dir, int64_t step) const;
};

// Throws NoCheckpoint, or InvalidConfig when the checkpoint is not a student.
StudentModel LoadStudent(const std::string &dir);

// Shape-checked single-frame inference.
LipFrame StudentForward(const signal::MelChunk &noisy_chunk, const StudentModel &model);

// Batched inference over chunks, no gradient recording.
std::vector<LipFrame> StudentForwardBatch(const std::vector<signal::MelChunk> &chunks,
                                          const StudentModel &model);

struct StudentTrainConfig {
  StudentConfig net;
  int64_t steps = 5000;
  int batch = 8;
  double lr = 1e-4;
  uint64_t seed = 0;
  int log_every = 50;
  // Stop early once a logged window mean falls below this (0 disables).
  double target_loss = 0.0;
};

// Distills the teacher (fed the clean component) into the student (fed the
// mixture) over the train split. Throws EmptyManifest.
StudentModel TrainStudent(const std::vector<data::MixManifestEntry> &manifest,
                          const TeacherConfig &teacher, const StudentTrainConfig &config,
                          nn::TrainLog *log);

// Mean L1 between student(noisy) and teacher(clean) over every lip frame of
// the given entries.
double StudentL1(const std::vector<data::MixManifestEntry> &entries,
                 const TeacherConfig &teacher, const StudentModel &model);

}  // namespace pvse::lipgen

#endif  // PVSE_LIPGEN_STUDENT_H_

// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_ENHANCER_ENHANCER_H_
#define PVSE_ENHANCER_ENHANCER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvse/data/manifest.h"
#include "pvse/lipgen/student.h"
#include "pvse/nn/layers.h"
#include "pvse/nn/train_log.h"
#include "pvse/signal/spectrogram.h"

namespace pvse::enhancer {

struct EnhancerConfig {
  int speech_blocks = 7;
  int visual_layers = 12;  // residual 2D blocks, split evenly over the stages
  int visual_stages = 4;   // widths visual_embed / 2^(stages-1) ... visual_embed
  int decoder_layers = 14;
  int speech_ch = 256;
  int visual_embed = 128;
  int upsample_factor = 4;
  int kernel = 5;
  bool use_visual = true;
  bool use_predicted_phase = true;

  // Input geometry; the defaults are the 1 s chunk at 16 kHz.
  int spec_channels = 514;
  int frames = 100;
  int visual_frames = 25;
  int frame_h = 32;
  int frame_w = 64;

  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  static EnhancerConfig FromJson(const nlohmann::json &j);
};

// Tensors are [batch, channels, time]. Visual frames enter as
// [batch * visual_frames, 1, frame_h, frame_w].
template <typename T>
class EnhancerNet {
 public:
  explicit EnhancerNet(const EnhancerConfig &config = {});

  const EnhancerConfig &config() const { return config_; }
  // He-uniform init; residual branches and the mask head start at zero.
  void Init(uint64_t seed, bool zero_head = true);

  // [B, spec_channels, frames] -> [B, speech_ch, frames]
  nn::Tensor<T> SpeechEncode(const nn::Tensor<T> &spec) const;
  // [B * visual_frames, 1, H, W] -> [B, visual_embed, visual_frames]
  nn::Tensor<T> VisualEncode(const nn::Tensor<T> &frames) const;
  // Upsamples the visual features and appends them after the audio
  // channels. An undefined `visual` tensor stands for the zero block.
  nn::Tensor<T> Fuse(const nn::Tensor<T> &audio, const nn::Tensor<T> &visual) const;
  // [B, speech_ch + visual_embed, frames] -> mask logits [B, spec_channels, frames]
  nn::Tensor<T> DecodeMask(const nn::Tensor<T> &fused) const;
  // sigmoid(noisy + decoder mask). `frames` is ignored when use_visual is off.
  nn::Tensor<T> Forward(const nn::Tensor<T> &noisy, const nn::Tensor<T> &frames) const;

  std::vector<nn::Tensor<T>> Parameters() const;
  nn::ParamList<T> NamedParams() const;
  std::vector<const nn::Layer<T> *> AllLayers() const;

 private:
  EnhancerConfig config_;
  nn::Layer<T> speech_in_;
  std::vector<nn::Layer<T>> speech_blocks_;
  nn::Layer<T> visual_stem_;
  std::vector<nn::Layer<T>> visual_transitions_;  // one per stage after the first
  std::vector<nn::Layer<T>> visual_blocks_;
  nn::Layer<T> decoder_in_;
  std::vector<nn::Layer<T>> decoder_blocks_;
  nn::Layer<T> head_;
};

extern template class EnhancerNet<float>;
extern template class EnhancerNet<double>;

template <typename T>
nn::Tensor<T> ApplyMask(const nn::Tensor<T> &noisy, const nn::Tensor<T> &mask);

// Frame-major NormSpectrogram values -> [1, width, frames] tensor, and back.
nn::Tensor<float> SpectrogramToTensor(const signal::NormSpectrogram &spec);
void TensorToSpectrogram(const nn::Tensor<float> &tensor, size_t batch_index,
                         signal::NormSpectrogram *spec);

struct EnhancerModel {
  EnhancerNet<float> net;

  void Save(const std::string &dir, int64_t step) const;
};

// Throws NoCheckpoint, or InvalidConfig when the checkpoint is not an enhancer.
EnhancerModel LoadEnhancer(const std::string &dir);

struct EnhancerTrainConfig {
  EnhancerConfig net;
  int64_t steps = 8000;
  int batch = 8;
  double lr = 1e-4;
  uint64_t seed = 0;
  int log_every = 50;
  double target_loss = 0.0;  // early stop on a logged window mean (0 disables)
  int max_segments = 0;      // cap on cached 1 s segments (0 = all)
};

// One cached 1 s training example.
struct Segment {
  std::vector<float> noisy;   // spec_channels x frames, channel-major
  std::vector<float> clean;   // same layout
  std::vector<float> lips;    // visual_frames x frame_h x frame_w
  signal::Waveform noisy_wave;
  signal::Waveform clean_wave;
};

// Cuts each train-split entry into non-overlapping 1 s segments. Lip frames
// come from the frozen student and are left empty when `student` is null.
std::vector<Segment> BuildSegments(const std::vector<data::MixManifestEntry> &entries,
                                   const lipgen::StudentModel *student, int max_segments);

// The student is only read. Throws EmptyManifest, and NoCheckpoint when the
// config uses the visual path without a student.
EnhancerModel TrainEnhancer(const std::vector<data::MixManifestEntry> &manifest,
                            const lipgen::StudentModel *student,
                            const EnhancerTrainConfig &config, nn::TrainLog *log);

// Mean L1 between enhanced and clean normalized spectrograms.
double SegmentL1(const std::vector<Segment> &segments, const EnhancerModel &model);

// Enhances one cached segment and returns the waveform.
signal::Waveform EnhanceSegment(const Segment &segment, const EnhancerModel &model);

// Zero-pads to whole seconds, enhances each 1 s chunk independently and trims
// back to the input length. Throws NoCheckpoint when the visual path needs a
// student that was not given.
signal::Waveform EnhanceUtterance(const signal::Waveform &noisy,
                                  const lipgen::StudentModel *student,
                                  const EnhancerModel &model);

}  // namespace pvse::enhancer

#endif  // PVSE_ENHANCER_ENHANCER_H_

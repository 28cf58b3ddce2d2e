// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/enhancer/enhancer.h"

#include <algorithm>
#include <cmath>

#include "pvse/common/error.h"
#include "pvse/common/parallel.h"
#include "pvse/common/random.h"
#include "pvse/lipgen/stream.h"
#include "pvse/nn/adam.h"
#include "pvse/nn/ops.h"
#include "pvse/nn/serialize.h"
#include "pvse/signal/stft.h"

namespace pvse::enhancer {

using nn::LayerSpec;
using nn::Tensor;

namespace {
constexpr char kKind[] = "enhancer";
}  // namespace

void EnhancerConfig::Validate() const {
  PVSE_CHECK(speech_blocks >= 0 && decoder_layers >= 0 && visual_layers >= 0, kInvalidConfig,
             "block counts must be non-negative");
  PVSE_CHECK(speech_ch > 0 && visual_embed > 0 && spec_channels > 0, kInvalidConfig,
             "channel widths must be positive");
  PVSE_CHECK(kernel > 0 && kernel % 2 == 1, kInvalidConfig, "kernel must be odd, got ", kernel);
  PVSE_CHECK(visual_stages > 0 && visual_layers % visual_stages == 0, kInvalidConfig,
             "visual_layers (", visual_layers, ") must split evenly over ", visual_stages,
             " stages");
  PVSE_CHECK((visual_embed >> (visual_stages - 1)) > 0 &&
                 ((visual_embed >> (visual_stages - 1)) << (visual_stages - 1)) == visual_embed,
             kInvalidConfig, "visual_embed ", visual_embed, " must be divisible by 2^",
             visual_stages - 1);
  PVSE_CHECK(upsample_factor > 0 && visual_frames * upsample_factor == frames, kInvalidConfig,
             "visual_frames x upsample_factor must equal frames (", visual_frames, " x ",
             upsample_factor, " != ", frames, ")");
  PVSE_CHECK(frame_h > 0 && frame_w > 0, kInvalidConfig, "frame size must be positive");
}

nlohmann::ordered_json EnhancerConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = kKind;
  j["speech_blocks"] = speech_blocks;
  j["visual_layers"] = visual_layers;
  j["visual_stages"] = visual_stages;
  j["decoder_layers"] = decoder_layers;
  j["speech_ch"] = speech_ch;
  j["visual_embed"] = visual_embed;
  j["upsample_factor"] = upsample_factor;
  j["kernel"] = kernel;
  j["use_visual"] = use_visual;
  j["use_predicted_phase"] = use_predicted_phase;
  j["spec_channels"] = spec_channels;
  j["frames"] = frames;
  j["visual_frames"] = visual_frames;
  j["frame_h"] = frame_h;
  j["frame_w"] = frame_w;
  return j;
}

EnhancerConfig EnhancerConfig::FromJson(const nlohmann::json &j) {
  PVSE_CHECK(j.value("kind", "") == kKind, kInvalidConfig, "checkpoint is not an enhancer");
  EnhancerConfig c;
  c.speech_blocks = j.at("speech_blocks").get<int>();
  c.visual_layers = j.at("visual_layers").get<int>();
  c.visual_stages = j.at("visual_stages").get<int>();
  c.decoder_layers = j.at("decoder_layers").get<int>();
  c.speech_ch = j.at("speech_ch").get<int>();
  c.visual_embed = j.at("visual_embed").get<int>();
  c.upsample_factor = j.at("upsample_factor").get<int>();
  c.kernel = j.at("kernel").get<int>();
  c.use_visual = j.at("use_visual").get<bool>();
  c.use_predicted_phase = j.at("use_predicted_phase").get<bool>();
  c.spec_channels = j.at("spec_channels").get<int>();
  c.frames = j.at("frames").get<int>();
  c.visual_frames = j.at("visual_frames").get<int>();
  c.frame_h = j.at("frame_h").get<int>();
  c.frame_w = j.at("frame_w").get<int>();
  c.Validate();
  return c;
}

template <typename T>
EnhancerNet<T>::EnhancerNet(const EnhancerConfig &config) : config_(config) {
  config_.Validate();
  const int c = config_.speech_ch, k = config_.kernel;
  speech_in_ = nn::Layer<T>(LayerSpec::Conv1d(config_.spec_channels, c, k));
  for (int i = 0; i < config_.speech_blocks; ++i) {
    speech_blocks_.emplace_back(LayerSpec::ResidualBlock1d(c, k));
  }
  int width = config_.visual_embed >> (config_.visual_stages - 1);
  visual_stem_ = nn::Layer<T>(LayerSpec::Conv2d(1, width, 3, 3, 2, 2, 1, 1));
  const int per_stage = config_.visual_layers / config_.visual_stages;
  for (int s = 0; s < config_.visual_stages; ++s) {
    if (s > 0) {
      visual_transitions_.emplace_back(LayerSpec::Conv2d(width, 2 * width, 3, 3, 2, 2, 1, 1));
      width *= 2;
    }
    for (int i = 0; i < per_stage; ++i) {
      visual_blocks_.emplace_back(LayerSpec::ResidualBlock2d(width, 3));
    }
  }
  decoder_in_ = nn::Layer<T>(LayerSpec::Conv1d(c + config_.visual_embed, c, 1));
  for (int i = 0; i < config_.decoder_layers; ++i) {
    decoder_blocks_.emplace_back(LayerSpec::ResidualBlock1d(c, k));
  }
  head_ = nn::Layer<T>(LayerSpec::Conv1d(c, config_.spec_channels, 1));
}

template <typename T>
std::vector<const nn::Layer<T> *> EnhancerNet<T>::AllLayers() const {
  std::vector<const nn::Layer<T> *> out{&speech_in_};
  for (const auto &l : speech_blocks_) out.push_back(&l);
  out.push_back(&visual_stem_);
  for (const auto &l : visual_transitions_) out.push_back(&l);
  for (const auto &l : visual_blocks_) out.push_back(&l);
  out.push_back(&decoder_in_);
  for (const auto &l : decoder_blocks_) out.push_back(&l);
  out.push_back(&head_);
  return out;
}

template <typename T>
void EnhancerNet<T>::Init(uint64_t seed, bool zero_head) {
  Rng rng(seed);
  for (const nn::Layer<T> *layer : AllLayers()) const_cast<nn::Layer<T> *>(layer)->Init(rng);
  if (zero_head) {
    for (auto &p : head_.params()) std::fill(p.data().begin(), p.data().end(), T(0));
  }
}

template <typename T>
Tensor<T> EnhancerNet<T>::SpeechEncode(const Tensor<T> &spec) const {
  PVSE_CHECK(spec.rank() == 3 && spec.dim(1) == config_.spec_channels &&
                 spec.dim(2) == config_.frames,
             kShapeMismatch, "speech encoder expects [B,", config_.spec_channels, ",",
             config_.frames, "], got ", nn::DimsToString(spec.dims()));
  Tensor<T> h = nn::Relu(speech_in_.Forward(spec));
  for (const auto &block : speech_blocks_) h = block.Forward(h);
  return h;
}

template <typename T>
Tensor<T> EnhancerNet<T>::VisualEncode(const Tensor<T> &frames) const {
  PVSE_CHECK(frames.rank() == 4 && frames.dim(1) == 1 && frames.dim(2) == config_.frame_h &&
                 frames.dim(3) == config_.frame_w &&
                 frames.dim(0) % config_.visual_frames == 0,
             kShapeMismatch, "visual encoder expects [B*", config_.visual_frames, ",1,",
             config_.frame_h, ",", config_.frame_w, "], got ",
             nn::DimsToString(frames.dims()));
  const int batch = frames.dim(0) / config_.visual_frames;
  const int per_stage = config_.visual_layers / config_.visual_stages;
  Tensor<T> h = nn::Relu(visual_stem_.Forward(frames));
  size_t block = 0;
  for (int s = 0; s < config_.visual_stages; ++s) {
    if (s > 0) h = nn::Relu(visual_transitions_[s - 1].Forward(h));
    for (int i = 0; i < per_stage; ++i) h = visual_blocks_[block++].Forward(h);
  }
  const Tensor<T> pooled = nn::GlobalAvgPool2d(h);  // [B*F, E]
  return nn::SwapLastAxes(
      nn::Reshape(pooled, {batch, config_.visual_frames, config_.visual_embed}));
}

template <typename T>
Tensor<T> EnhancerNet<T>::Fuse(const Tensor<T> &audio, const Tensor<T> &visual) const {
  PVSE_CHECK(audio.rank() == 3 && audio.dim(1) == config_.speech_ch &&
                 audio.dim(2) == config_.frames,
             kShapeMismatch, "fuse expects audio [B,", config_.speech_ch, ",", config_.frames,
             "], got ", nn::DimsToString(audio.dims()));
  const int batch = audio.dim(0);
  if (!visual.defined()) {
    return nn::ConcatChannels(
        audio, Tensor<T>::Zeros({batch, config_.visual_embed, config_.frames}));
  }
  PVSE_CHECK(visual.rank() == 3 && visual.dim(0) == batch &&
                 visual.dim(1) == config_.visual_embed &&
                 visual.dim(2) * config_.upsample_factor == config_.frames,
             kShapeMismatch, "fuse expects visual [", batch, ",", config_.visual_embed, ",",
             config_.visual_frames, "], got ", nn::DimsToString(visual.dims()));
  return nn::ConcatChannels(audio, nn::UpsampleNearestT(visual, config_.upsample_factor));
}

template <typename T>
Tensor<T> EnhancerNet<T>::DecodeMask(const Tensor<T> &fused) const {
  PVSE_CHECK(fused.rank() == 3 && fused.dim(1) == config_.speech_ch + config_.visual_embed &&
                 fused.dim(2) == config_.frames,
             kShapeMismatch, "decoder expects [B,", config_.speech_ch + config_.visual_embed,
             ",", config_.frames, "], got ", nn::DimsToString(fused.dims()));
  Tensor<T> h = nn::Relu(decoder_in_.Forward(fused));
  for (const auto &block : decoder_blocks_) h = block.Forward(h);
  return head_.Forward(h);
}

template <typename T>
Tensor<T> EnhancerNet<T>::Forward(const Tensor<T> &noisy, const Tensor<T> &frames) const {
  const Tensor<T> audio = SpeechEncode(noisy);
  const Tensor<T> visual = config_.use_visual ? VisualEncode(frames) : Tensor<T>();
  PVSE_CHECK(!visual.defined() || visual.dim(0) == noisy.dim(0), kShapeMismatch,
             "frame batch does not match spectrogram batch");
  return ApplyMask(noisy, DecodeMask(Fuse(audio, visual)));
}

template <typename T>
std::vector<Tensor<T>> EnhancerNet<T>::Parameters() const {
  std::vector<Tensor<T>> out;
  for (const nn::Layer<T> *layer : AllLayers()) {
    for (const auto &p : layer->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
nn::ParamList<T> EnhancerNet<T>::NamedParams() const {
  nn::ParamList<T> out;
  speech_in_.CollectParams("speech.in", &out);
  for (size_t i = 0; i < speech_blocks_.size(); ++i) {
    speech_blocks_[i].CollectParams("speech.block" + std::to_string(i), &out);
  }
  visual_stem_.CollectParams("visual.stem", &out);
  for (size_t i = 0; i < visual_transitions_.size(); ++i) {
    visual_transitions_[i].CollectParams("visual.down" + std::to_string(i), &out);
  }
  for (size_t i = 0; i < visual_blocks_.size(); ++i) {
    visual_blocks_[i].CollectParams("visual.block" + std::to_string(i), &out);
  }
  decoder_in_.CollectParams("decoder.in", &out);
  for (size_t i = 0; i < decoder_blocks_.size(); ++i) {
    decoder_blocks_[i].CollectParams("decoder.block" + std::to_string(i), &out);
  }
  head_.CollectParams("decoder.head", &out);
  return out;
}

template class EnhancerNet<float>;
template class EnhancerNet<double>;

template <typename T>
Tensor<T> ApplyMask(const Tensor<T> &noisy, const Tensor<T> &mask) {
  PVSE_CHECK(noisy.dims() == mask.dims(), kShapeMismatch, "mask ",
             nn::DimsToString(mask.dims()), " does not match spectrogram ",
             nn::DimsToString(noisy.dims()));
  return nn::Sigmoid(nn::Add(noisy, mask));
}

template Tensor<float> ApplyMask(const Tensor<float> &, const Tensor<float> &);
template Tensor<double> ApplyMask(const Tensor<double> &, const Tensor<double> &);

Tensor<float> SpectrogramToTensor(const signal::NormSpectrogram &spec) {
  const int width = spec.width(), frames = spec.num_frames;
  std::vector<float> data(static_cast<size_t>(width) * frames);
  for (int t = 0; t < frames; ++t) {
    for (int c = 0; c < width; ++c) {
      data[static_cast<size_t>(c) * frames + t] = static_cast<float>(spec.at(t, c));
    }
  }
  return Tensor<float>::FromData({1, width, frames}, std::move(data));
}

void TensorToSpectrogram(const Tensor<float> &tensor, size_t batch_index,
                         signal::NormSpectrogram *spec) {
  const int width = spec->width(), frames = spec->num_frames;
  PVSE_CHECK(tensor.rank() == 3 && tensor.dim(1) == width && tensor.dim(2) == frames &&
                 batch_index < static_cast<size_t>(tensor.dim(0)),
             kShapeMismatch, "tensor ", nn::DimsToString(tensor.dims()),
             " does not fit a ", frames, "x", width, " spectrogram");
  const float *base = tensor.data().data() + batch_index * width * frames;
  for (int t = 0; t < frames; ++t) {
    for (int c = 0; c < width; ++c) spec->at(t, c) = base[static_cast<size_t>(c) * frames + t];
  }
}

void EnhancerModel::Save(const std::string &dir, int64_t step) const {
  nn::SaveCheckpoint(dir, net.config().ToJson(), step, net.NamedParams());
}

EnhancerModel LoadEnhancer(const std::string &dir) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(dir);
  EnhancerModel model{EnhancerNet<float>(EnhancerConfig::FromJson(ckpt.architecture))};
  auto named = model.net.NamedParams();
  nn::CopyParams(ckpt.params, &named);
  return model;
}

namespace {

struct ChunkInput {
  signal::ComplexSpectrogram stft;
  signal::NormSpectrogram norm;
  std::vector<float> lips;
};

ChunkInput PrepareChunk(const signal::Waveform &chunk, const lipgen::StudentModel *student) {
  ChunkInput in;
  in.stft = signal::Stft(chunk);
  in.norm = signal::EncodeSpectrogram(in.stft);
  if (student) {
    for (const auto &f : lipgen::LipStream(chunk, *student).frames) {
      in.lips.insert(in.lips.end(), f.pixels.begin(), f.pixels.end());
    }
  }
  return in;
}

void CheckGeometry(const EnhancerConfig &config, const signal::NormSpectrogram &norm) {
  PVSE_CHECK(norm.width() == config.spec_channels && norm.num_frames == config.frames,
             kShapeMismatch, "chunk spectrogram ", norm.num_frames, "x", norm.width(),
             " does not match the model (", config.frames, "x", config.spec_channels, ")");
}

Tensor<float> FramesTensor(const std::vector<const std::vector<float> *> &lips,
                           const EnhancerConfig &config) {
  std::vector<float> data;
  for (const auto *l : lips) data.insert(data.end(), l->begin(), l->end());
  return Tensor<float>::FromData({static_cast<int>(lips.size()) * config.visual_frames, 1,
                                  config.frame_h, config.frame_w},
                                 std::move(data));
}

signal::Waveform EnhanceChunk(const ChunkInput &in, const EnhancerModel &model) {
  const EnhancerConfig &config = model.net.config();
  CheckGeometry(config, in.norm);
  nn::NoGradGuard no_grad;
  const Tensor<float> frames =
      config.use_visual ? FramesTensor({&in.lips}, config) : Tensor<float>();
  const Tensor<float> out = model.net.Forward(SpectrogramToTensor(in.norm), frames);
  signal::NormSpectrogram enhanced = in.norm;
  TensorToSpectrogram(out, 0, &enhanced);
  const signal::ComplexSpectrogram spec = config.use_predicted_phase
                                              ? signal::DecodeSpectrogram(enhanced)
                                              : signal::DecodeWithPhase(enhanced, in.stft);
  return signal::Istft(spec);
}

Tensor<float> StackChannelMajor(const std::vector<const std::vector<float> *> &rows,
                                const EnhancerConfig &config) {
  std::vector<float> data;
  for (const auto *r : rows) data.insert(data.end(), r->begin(), r->end());
  return Tensor<float>::FromData(
      {static_cast<int>(rows.size()), config.spec_channels, config.frames}, std::move(data));
}

}  // namespace

std::vector<Segment> BuildSegments(const std::vector<data::MixManifestEntry> &entries,
                                   const lipgen::StudentModel *student, int max_segments) {
  std::vector<std::vector<Segment>> parts(entries.size());
  ParallelFor(entries.size(), [&](size_t e) {
    const data::MixResult mix = data::RealizeEntry(entries[e]);
    const int sr = mix.mixture.sample_rate;
    const size_t count = mix.mixture.size() / sr;
    for (size_t s = 0; s < count; ++s) {
      Segment seg;
      seg.noisy_wave.sample_rate = seg.clean_wave.sample_rate = sr;
      seg.noisy_wave.samples.assign(mix.mixture.samples.begin() + s * sr,
                                    mix.mixture.samples.begin() + (s + 1) * sr);
      seg.clean_wave.samples.assign(mix.clean.samples.begin() + s * sr,
                                    mix.clean.samples.begin() + (s + 1) * sr);
      ChunkInput in = PrepareChunk(seg.noisy_wave, student);
      const Tensor<float> noisy = SpectrogramToTensor(in.norm);
      const Tensor<float> clean =
          SpectrogramToTensor(signal::EncodeSpectrogram(signal::Stft(seg.clean_wave)));
      seg.noisy = noisy.values();
      seg.clean = clean.values();
      seg.lips = std::move(in.lips);
      parts[e].push_back(std::move(seg));
    }
  });
  std::vector<Segment> all;
  for (auto &p : parts) {
    for (auto &s : p) {
      if (max_segments > 0 && static_cast<int>(all.size()) >= max_segments) break;
      all.push_back(std::move(s));
    }
  }
  return all;
}

EnhancerModel TrainEnhancer(const std::vector<data::MixManifestEntry> &manifest,
                            const lipgen::StudentModel *student,
                            const EnhancerTrainConfig &config, nn::TrainLog *log) {
  const auto train = data::FilterSplit(manifest, data::Split::kTrain);
  PVSE_CHECK(!train.empty(), kEmptyManifest, "no training entries in manifest");
  PVSE_CHECK(!config.net.use_visual || student != nullptr, kNoCheckpoint,
             "the visual path needs a student checkpoint");
  PVSE_CHECK(config.batch > 0 && config.steps >= 0 && config.log_every > 0 && config.lr > 0,
             kInvalidConfig, "invalid enhancer training config");

  const std::vector<Segment> segments =
      BuildSegments(train, config.net.use_visual ? student : nullptr, config.max_segments);
  PVSE_CHECK(!segments.empty(), kEmptyManifest, "training entries are shorter than 1 s");

  EnhancerModel model{EnhancerNet<float>(config.net)};
  CheckGeometry(config.net, signal::EncodeSpectrogram(signal::Stft(segments[0].noisy_wave)));
  model.net.Init(MixSeed(config.seed, 1));
  auto params = model.net.Parameters();
  nn::AdamState<float> adam;
  adam.config.lr = config.lr;
  Rng rng(MixSeed(config.seed, 2));

  nn::TrainLog local;
  nn::TrainLog &out = log ? *log : local;
  nn::LossWindow window(config.log_every);
  int64_t step = 0;
  while (step < config.steps) {
    std::vector<const std::vector<float> *> noisy, clean, lips;
    for (int b = 0; b < config.batch; ++b) {
      const Segment &seg = segments[rng.Index(segments.size())];
      noisy.push_back(&seg.noisy);
      clean.push_back(&seg.clean);
      lips.push_back(&seg.lips);
    }
    nn::ZeroGrads(params);
    const Tensor<float> frames =
        config.net.use_visual ? FramesTensor(lips, config.net) : Tensor<float>();
    const Tensor<float> pred = model.net.Forward(StackChannelMajor(noisy, config.net), frames);
    Tensor<float> loss = nn::L1Loss(pred, StackChannelMajor(clean, config.net));
    loss.Backward();
    nn::AdamStep(params, &adam);
    ++step;
    if (window.Add(step, loss.item(), &out) && config.target_loss > 0 &&
        window.last() < config.target_loss) {
      break;
    }
  }
  out.steps_run = step;
  out.final_loss = SegmentL1(segments, model);
  return model;
}

double SegmentL1(const std::vector<Segment> &segments, const EnhancerModel &model) {
  PVSE_CHECK(!segments.empty(), kEmptyManifest, "no segments to evaluate");
  const EnhancerConfig &config = model.net.config();
  std::vector<double> per(segments.size());
  ParallelFor(segments.size(), [&](size_t i) {
    nn::NoGradGuard no_grad;
    const Segment &seg = segments[i];
    const Tensor<float> frames =
        config.use_visual ? FramesTensor({&seg.lips}, config) : Tensor<float>();
    const Tensor<float> pred = model.net.Forward(StackChannelMajor({&seg.noisy}, config), frames);
    double acc = 0.0;
    for (size_t k = 0; k < pred.size(); ++k) {
      acc += std::abs(static_cast<double>(pred.data()[k]) - seg.clean[k]);
    }
    per[i] = acc / static_cast<double>(pred.size());
  });
  double total = 0.0;
  for (double v : per) total += v;
  return total / static_cast<double>(per.size());
}

signal::Waveform EnhanceSegment(const Segment &segment, const EnhancerModel &model) {
  ChunkInput in;
  in.stft = signal::Stft(segment.noisy_wave);
  in.norm = signal::EncodeSpectrogram(in.stft);
  in.lips = segment.lips;
  return EnhanceChunk(in, model);
}

signal::Waveform EnhanceUtterance(const signal::Waveform &noisy,
                                  const lipgen::StudentModel *student,
                                  const EnhancerModel &model) {
  signal::ValidateWaveform(noisy);
  const EnhancerConfig &config = model.net.config();
  PVSE_CHECK(!config.use_visual || student != nullptr, kNoCheckpoint,
             "the visual path needs a student checkpoint");
  const size_t sr = static_cast<size_t>(noisy.sample_rate);
  const size_t chunks = (noisy.size() + sr - 1) / sr;
  std::vector<signal::Waveform> outputs(chunks);
  ParallelFor(chunks, [&](size_t i) {
    signal::Waveform chunk;
    chunk.sample_rate = noisy.sample_rate;
    chunk.samples.assign(sr, 0.0f);
    const size_t end = std::min(noisy.size(), (i + 1) * sr);
    std::copy(noisy.samples.begin() + i * sr, noisy.samples.begin() + end,
              chunk.samples.begin());
    outputs[i] = EnhanceChunk(PrepareChunk(chunk, config.use_visual ? student : nullptr), model);
  });
  signal::Waveform out;
  out.sample_rate = noisy.sample_rate;
  out.samples.reserve(chunks * sr);
  for (const auto &w : outputs) out.samples.insert(out.samples.end(), w.samples.begin(), w.samples.end());
  out.samples.resize(noisy.size());
  return out;
}

}  // namespace pvse::enhancer

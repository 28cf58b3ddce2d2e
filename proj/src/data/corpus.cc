// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/data/corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "pvse/common/error.h"
#include "pvse/common/random.h"

namespace pvse::data {
namespace {

namespace fs = std::filesystem;
using signal::Waveform;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Magnitude response of a two-pole resonator normalized to unit gain at its
// center frequency.
double ResonatorGain(double f, double center, double bandwidth, int fs) {
  const double r = std::exp(-std::numbers::pi * bandwidth / fs);
  const double theta = kTwoPi * center / fs;
  auto response = [&](double freq) {
    const std::complex<double> z = std::polar(1.0, -kTwoPi * freq / fs);
    const std::complex<double> den =
        (1.0 - r * std::polar(1.0, theta) * z) * (1.0 - r * std::polar(1.0, -theta) * z);
    return 1.0 / std::abs(den);
  };
  return response(f) / response(center);
}

void NormalizePeak(Waveform *wave, double peak) {
  double m = 0.0;
  for (float s : wave->samples) m = std::max(m, static_cast<double>(std::abs(s)));
  if (m <= 0.0) return;
  const double g = peak / m;
  for (float &s : wave->samples) s = static_cast<float>(s * g);
}

void NormalizeRms(Waveform *wave, double rms) {
  double acc = 0.0;
  for (float s : wave->samples) acc += static_cast<double>(s) * s;
  if (acc <= 0.0) return;
  const double g = rms / std::sqrt(acc / wave->size());
  for (float &s : wave->samples) s = static_cast<float>(s * g);
}

struct Syllable {
  size_t start = 0;
  size_t length = 0;
  double amplitude = 1.0;
  double f0_start = 120.0, f0_end = 120.0;
  double f1_start = 500.0, f1_end = 500.0;
  double f2_start = 1500.0, f2_end = 1500.0;
};

}  // namespace

std::string NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kChirp: return "chirp";
    case NoiseKind::kAmTone: return "am-tone";
    case NoiseKind::kBabbleProxy: return "babble-proxy";
  }
  return "unknown";
}

NoiseKind ParseNoiseKind(const std::string &name) {
  for (NoiseKind kind : AllNoiseKinds()) {
    if (NoiseKindName(kind) == name) return kind;
  }
  PVSE_THROW(kInvalidArgument, "unknown noise kind '", name, "'");
}

std::vector<NoiseKind> AllNoiseKinds() {
  return {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kChirp,
          NoiseKind::kAmTone, NoiseKind::kBabbleProxy};
}

void CorpusConfig::Validate() const {
  PVSE_CHECK(n_utterances >= 1, kInvalidArgument, "n_utterances must be >= 1");
  PVSE_CHECK(utt_seconds >= 1.0, kInvalidArgument, "utt_seconds must be >= 1.0");
  PVSE_CHECK(sample_rate > 0, kInvalidArgument, "sample_rate must be positive");
  PVSE_CHECK(!noise_kinds.empty(), kInvalidArgument, "no noise kinds requested");
  PVSE_CHECK(noise_files_per_kind >= 1, kInvalidArgument,
             "noise_files_per_kind must be >= 1");
}

Waveform SynthesizeSpeech(double seconds, int sample_rate, uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<size_t>(std::llround(seconds * sample_rate));
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.assign(n, 0.0f);

  const double base_f0 = rng.Uniform(90.0, 220.0);
  std::vector<Syllable> syllables;
  size_t pos = static_cast<size_t>(rng.Uniform(0.05, 0.25) * sample_rate);
  while (true) {
    Syllable syl;
    syl.start = pos;
    syl.length = static_cast<size_t>(rng.Uniform(0.15, 0.40) * sample_rate);
    if (syl.start + syl.length > n) break;
    syl.amplitude = rng.Uniform(0.35, 1.0);
    syl.f0_start = base_f0 * rng.Uniform(0.9, 1.15);
    syl.f0_end = base_f0 * rng.Uniform(0.85, 1.1);
    syl.f1_start = rng.Uniform(300.0, 900.0);
    syl.f1_end = rng.Uniform(300.0, 900.0);
    syl.f2_start = rng.Uniform(900.0, 2500.0);
    syl.f2_end = rng.Uniform(900.0, 2500.0);
    syllables.push_back(syl);
    pos = syl.start + syl.length +
          static_cast<size_t>(rng.Uniform(0.05, 0.30) * sample_rate);
  }

  const double nyquist_guard = 0.47 * sample_rate;
  const auto ramp = static_cast<size_t>(0.02 * sample_rate);
  // Formant shaping changes slowly; gains are refreshed every few samples.
  constexpr size_t kGainUpdate = 16;
  std::vector<double> harmonic_phase;
  std::vector<double> gains;
  for (const Syllable &syl : syllables) {
    harmonic_phase.assign(static_cast<size_t>(nyquist_guard / 60.0) + 1, 0.0);
    gains.assign(harmonic_phase.size(), 0.0);
    for (double &p : harmonic_phase) p = rng.Uniform(0.0, kTwoPi);
    for (size_t i = 0; i < syl.length; ++i) {
      const double u = static_cast<double>(i) / syl.length;
      const double f0 = syl.f0_start + (syl.f0_end - syl.f0_start) * u;
      const double f1 = syl.f1_start + (syl.f1_end - syl.f1_start) * u;
      const double f2 = syl.f2_start + (syl.f2_end - syl.f2_start) * u;
      double env = syl.amplitude;
      if (i < ramp) {
        env *= 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
      } else if (syl.length - i <= ramp) {
        env *= 0.5 - 0.5 * std::cos(std::numbers::pi * (syl.length - i) / ramp);
      }
      if (i % kGainUpdate == 0) {
        for (size_t h = 1; h < gains.size(); ++h) {
          const double f = f0 * h;
          gains[h] = (ResonatorGain(f, f1, 90.0, sample_rate) +
                      0.7 * ResonatorGain(f, f2, 140.0, sample_rate)) /
                     std::sqrt(static_cast<double>(h));
        }
      }
      double acc = 0.0;
      for (size_t h = 1; h < harmonic_phase.size(); ++h) {
        const double f = f0 * h;
        if (f >= nyquist_guard) break;
        harmonic_phase[h] += kTwoPi * f / sample_rate;
        acc += gains[h] * std::sin(harmonic_phase[h]);
      }
      wave.samples[syl.start + i] = static_cast<float>(env * acc);
    }
  }
  NormalizePeak(&wave, 0.5);
  return wave;
}

Waveform SynthesizeNoise(NoiseKind kind, double seconds, int sample_rate,
                         uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<size_t>(std::llround(seconds * sample_rate));
  Waveform wave;
  wave.sample_rate = sample_rate;
  wave.samples.assign(n, 0.0f);
  switch (kind) {
    case NoiseKind::kWhite: {
      for (auto &s : wave.samples) s = static_cast<float>(rng.Normal());
      break;
    }
    case NoiseKind::kPink: {
      // Paul Kellet's refined pink filter.
      double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
      for (auto &s : wave.samples) {
        const double w = rng.Normal();
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        s = static_cast<float>(b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362);
        b6 = w * 0.115926;
      }
      break;
    }
    case NoiseKind::kChirp: {
      const double period = rng.Uniform(0.6, 1.4);
      const double f_lo = rng.Uniform(100.0, 300.0);
      const double f_hi = rng.Uniform(3000.0, 7000.0);
      double phase = rng.Uniform(0.0, kTwoPi);
      for (size_t i = 0; i < n; ++i) {
        const double u = std::fmod(static_cast<double>(i) / sample_rate, period) / period;
        const double f = f_lo * std::pow(f_hi / f_lo, u);
        phase += kTwoPi * f / sample_rate;
        wave.samples[i] = static_cast<float>(std::sin(phase));
      }
      break;
    }
    case NoiseKind::kAmTone: {
      const double carrier = rng.Uniform(300.0, 3000.0);
      const double rate = rng.Uniform(2.0, 8.0);
      const double phase0 = rng.Uniform(0.0, kTwoPi);
      for (size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double am = 0.6 + 0.4 * std::sin(kTwoPi * rate * t + phase0);
        wave.samples[i] = static_cast<float>(am * std::sin(kTwoPi * carrier * t));
      }
      break;
    }
    case NoiseKind::kBabbleProxy: {
      constexpr int kTalkers = 5;
      for (int k = 0; k < kTalkers; ++k) {
        const Waveform talker = SynthesizeSpeech(seconds, sample_rate, rng.NextU64());
        for (size_t i = 0; i < n; ++i) wave.samples[i] += talker.samples[i];
      }
      break;
    }
  }
  NormalizeRms(&wave, 0.1);
  return wave;
}

CorpusSummary GenerateSyntheticCorpus(const CorpusConfig &config,
                                      const std::string &root) {
  config.Validate();
  const fs::path clean_dir = fs::path(root) / "clean";
  const fs::path noise_dir = fs::path(root) / "noise";
  std::error_code ec;
  fs::create_directories(clean_dir, ec);
  PVSE_CHECK(!ec, kIoFailure, "cannot create ", clean_dir.string(), ": ", ec.message());
  fs::create_directories(noise_dir, ec);
  PVSE_CHECK(!ec, kIoFailure, "cannot create ", noise_dir.string(), ": ", ec.message());

  CorpusSummary summary;
  char name[64];
  for (int i = 0; i < config.n_utterances; ++i) {
    const Waveform speech = SynthesizeSpeech(config.utt_seconds, config.sample_rate,
                                             MixSeed(config.seed, 2 * i));
    std::snprintf(name, sizeof(name), "utt_%04d.wav", i);
    signal::WriteWav((clean_dir / name).string(), speech);
    ++summary.clean_files;
    summary.seconds += speech.Seconds();
  }
  int tag = 0;
  for (NoiseKind kind : config.noise_kinds) {
    for (int j = 0; j < config.noise_files_per_kind; ++j, ++tag) {
      const Waveform noise = SynthesizeNoise(kind, config.utt_seconds, config.sample_rate,
                                             MixSeed(config.seed, 2 * tag + 1));
      std::snprintf(name, sizeof(name), "%s_%02d.wav", NoiseKindName(kind).c_str(), j);
      signal::WriteWav((noise_dir / name).string(), noise);
      ++summary.noise_files;
    }
  }
  return summary;
}

}  // namespace pvse::data

// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.
// Exit status is 0 only when every selected criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acceptance_config.h"
#include "pvse/common/random.h"
#include "pvse/data/corpus.h"
#include "pvse/data/manifest.h"
#include "pvse/data/mixer.h"
#include "pvse/enhancer/enhancer.h"
#include "pvse/enhancer/grad_suite.h"
#include "pvse/lipgen/stream.h"
#include "pvse/lipgen/student.h"
#include "pvse/lipgen/teacher.h"
#include "pvse/metrics/metrics.h"
#include "pvse/signal/spectrogram.h"
#include "pvse/signal/stft.h"
#include "pvse/signal/waveform.h"

namespace fs = std::filesystem;
using namespace pvse;
using namespace pvse::acceptance;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Mean(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

signal::Waveform WhiteNoise(size_t n, uint64_t seed) {
  Rng rng(seed);
  signal::Waveform w;
  w.samples.resize(n);
  for (auto &s : w.samples) s = static_cast<float>(0.3 * rng.Normal());
  return w;
}

// ---------------------------------------------------------------- 1 to 5

Outcome GradientSuite() {
  Timer t;
  const auto entries = enhancer::RunGradientSuite(0);
  const double secs = t.Seconds();
  double worst = 0.0;
  std::string worst_name;
  for (const auto &e : entries) {
    if (e.result.max_rel_error >= worst) {
      worst = e.result.max_rel_error;
      worst_name = e.name;
    }
  }
  return {worst < kGradTol && secs < kGradMaxSeconds,
          Fmt("%zu checks, worst %.2e (%s) vs < %.0e; %.1f s vs < %.0f s", entries.size(),
              worst, worst_name.c_str(), kGradTol, secs, kGradMaxSeconds)};
}

Outcome StftRoundTrip() {
  double worst = 0.0;
  bool shapes = true;
  for (int i = 0; i < kStftSignals; ++i) {
    const signal::Waveform x = WhiteNoise(signal::kDefaultSampleRate, MixSeed(2, i));
    const auto spec = signal::Stft(x);
    const auto norm = signal::EncodeSpectrogram(spec);
    shapes = shapes && spec.num_frames == 100 && spec.num_bins == 257 &&
             norm.num_frames == 100 && norm.width() == 514;
    const signal::Waveform y = signal::Istft(spec);
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
      const double d = static_cast<double>(y.samples[k]) - x.samples[k];
      num += d * d;
      den += static_cast<double>(x.samples[k]) * x.samples[k];
    }
    shapes = shapes && y.size() == x.size();
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {shapes && worst < kStftTol,
          Fmt("%d signals, worst relative L2 %.2e vs < %.0e; shapes 100x257 / 100x514 %s",
              kStftSignals, worst, kStftTol, shapes ? "hold" : "BROKEN")};
}

Outcome CodecInverse() {
  signal::ComplexSpectrogram spec;
  spec.num_frames = 100;
  spec.num_bins = 257;
  spec.data.resize(static_cast<size_t>(spec.num_frames) * spec.num_bins);
  Rng rng(3);
  const double lo = std::log(1e-4), hi = std::log(10.0);
  for (auto &z : spec.data) {
    const double mag = std::exp(rng.Uniform(lo, hi));
    z = std::polar(mag, rng.Uniform(-std::numbers::pi, std::numbers::pi));
  }
  const auto back = signal::DecodeSpectrogram(signal::EncodeSpectrogram(spec));
  double worst = 0.0;
  for (size_t i = 0; i < spec.data.size(); ++i) {
    worst = std::max(worst, std::abs(back.data[i] - spec.data[i]) / std::abs(spec.data[i]));
  }
  return {worst < kCodecTol, Fmt("%zu bins with |z| in [1e-4, 10], worst relative error "
                                 "%.2e vs < %.0e",
                                 spec.data.size(), worst, kCodecTol)};
}

Outcome MixerAccuracy() {
  double worst = 0.0;
  int mixes = 0;
  const auto kinds = data::AllNoiseKinds();
  for (int p = 0; p < kMixerPairs; ++p) {
    const auto clean = data::SynthesizeSpeech(2.0, signal::kDefaultSampleRate, MixSeed(4, p));
    const auto noise = data::SynthesizeNoise(kinds[p % kinds.size()], 3.0,
                                             signal::kDefaultSampleRate, MixSeed(5, p));
    for (double snr : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
      const auto mix = data::MixAtSnr(clean, noise, snr, MixSeed(6, p));
      worst = std::max(worst, std::abs(data::MeasureSnrDb(mix.mixture, mix.noise) - snr));
      ++mixes;
    }
  }
  return {worst < kMixerTolDb, Fmt("%d mixes over %d pairs, worst |measured - target| "
                                   "%.2e dB vs < %.1f dB",
                                   mixes, kMixerPairs, worst, kMixerTolDb)};
}

Outcome MetricOracles() {
  std::vector<std::string> failures;
  // stoi(x, x)
  const auto x = data::SynthesizeSpeech(2.0, signal::kDefaultSampleRate, 7);
  const double self = metrics::Stoi(x, x);
  if (std::abs(self - 1.0) > kStoiIdentityTol) failures.push_back("stoi(x,x)");

  // Monotonicity in mixing SNR.
  const std::vector<double> snrs = {20.0, 10.0, 0.0, -5.0};
  std::vector<double> stoi(snrs.size()), sisdr(snrs.size());
  for (size_t s = 0; s < snrs.size(); ++s) {
    std::vector<double> a, b;
    for (int u = 0; u < kMonotoneUtterances; ++u) {
      const auto clean =
          data::SynthesizeSpeech(2.0, signal::kDefaultSampleRate, MixSeed(8, u));
      const auto noise = data::SynthesizeNoise(data::NoiseKind::kPink, 2.0,
                                               signal::kDefaultSampleRate, MixSeed(9, u));
      const auto mix = data::MixAtSnr(clean, noise, snrs[s], MixSeed(10, u));
      a.push_back(metrics::Stoi(mix.clean, mix.mixture));
      b.push_back(metrics::SiSdr(mix.clean, mix.mixture));
    }
    stoi[s] = Mean(a);
    sisdr[s] = Mean(b);
  }
  for (size_t s = 1; s < snrs.size(); ++s) {
    if (!(stoi[s] < stoi[s - 1])) failures.push_back("stoi monotone");
    if (!(sisdr[s] < sisdr[s - 1])) failures.push_back("si-sdr monotone");
  }

  // Two 512-sample frames with SNRs of 10 and 20 dB.
  signal::Waveform c, p;
  c.samples.assign(768, 1.0f);
  p = c;
  for (int i = 0; i < 256; ++i) p.samples[i] -= static_cast<float>(std::sqrt(0.2));
  for (int i = 512; i < 768; ++i) p.samples[i] -= static_cast<float>(std::sqrt(0.02));
  const double seg = metrics::SegSnr(c, p);
  if (std::abs(seg - 15.0) > kSegSnrTolDb) failures.push_back("seg_snr");

  // llr >= 0 over a spread of degradations.
  double llr_min = 1e9;
  for (int u = 0; u < 5; ++u) {
    const auto clean = data::SynthesizeSpeech(1.0, signal::kDefaultSampleRate, MixSeed(11, u));
    const auto noise = data::SynthesizeNoise(data::NoiseKind::kWhite, 1.0,
                                             signal::kDefaultSampleRate, MixSeed(12, u));
    for (double snr : {-5.0, 5.0, 20.0}) {
      const auto mix = data::MixAtSnr(clean, noise, snr, u);
      llr_min = std::min(llr_min, metrics::Llr(mix.clean, mix.mixture));
    }
    llr_min = std::min(llr_min, metrics::Llr(clean, clean));
  }
  if (llr_min < 0.0) failures.push_back("llr");

  // wss(x, g x) = 0
  double wss_max = 0.0;
  for (float g : {0.25f, 0.5f, 2.0f}) {
    signal::Waveform y = x;
    for (auto &s : y.samples) s *= g;
    wss_max = std::max(wss_max, std::abs(metrics::Wss(x, y)));
  }
  if (wss_max > kWssTol) failures.push_back("wss");

  std::string bad;
  for (const auto &f : failures) bad += (bad.empty() ? "" : ",") + f;
  return {failures.empty(),
          Fmt("stoi(x,x)=%.9f; stoi %.3f>%.3f>%.3f>%.3f; si-sdr %.2f>%.2f>%.2f>%.2f dB; "
              "seg_snr=%.6f dB; min llr %.3g; max wss(x,gx) %.1e%s%s",
              self, stoi[0], stoi[1], stoi[2], stoi[3], sisdr[0], sisdr[1], sisdr[2], sisdr[3],
              seg, llr_min, wss_max, bad.empty() ? "" : "; failed: ", bad.c_str())};
}

// ---------------------------------------------------------------- datasets

struct Dataset {
  std::vector<data::MixManifestEntry> entries;
  std::string manifest;
};

Dataset MakeDataset(const fs::path &dir, int n_train, int n_test, double seconds,
                    uint64_t seed) {
  data::CorpusConfig cfg;
  cfg.n_utterances = n_train + n_test;
  cfg.utt_seconds = seconds;
  cfg.seed = seed;
  fs::remove_all(dir);
  data::GenerateSyntheticCorpus(cfg, dir.string());
  Dataset d;
  d.manifest = (dir / "manifest.jsonl").string();
  d.entries = data::SynthesizeDataset(
      (dir / "clean").string(), (dir / "noise").string(), {0.0, 5.0, 10.0},
      {static_cast<double>(n_train), 0.0, static_cast<double>(n_test)}, seed, d.manifest);
  return d;
}

// Same weights, ISTFT with the noisy phase. Reported next to the default
// (predicted phase) results; never used for pass/fail.
enhancer::EnhancerModel WithNoisyPhase(const enhancer::EnhancerModel &model) {
  enhancer::EnhancerConfig c = model.net.config();
  c.use_predicted_phase = false;
  enhancer::EnhancerModel out{enhancer::EnhancerNet<float>(c)};
  auto dst = out.net.NamedParams();
  nn::CopyParams(model.net.NamedParams(), &dst);
  return out;
}

enhancer::EnhancerConfig DeskEnhancer(bool use_visual) {
  enhancer::EnhancerConfig c;
  c.speech_ch = kSpeechCh;
  c.visual_embed = kVisualEmbed;
  c.use_visual = use_visual;
  return c;
}

// ---------------------------------------------------------------- 6 and 8

struct Overfit {
  Dataset data;
  lipgen::StudentModel student;
  nn::TrainLog log;
  double seconds = 0.0;
};

Overfit &OverfitRun(const fs::path &work) {
  static Overfit *run = nullptr;
  if (run) return *run;
  run = new Overfit;
  run->data = MakeDataset(work / "overfit", kOverfitUtterances, 0, kOverfitSeconds, 61);
  lipgen::StudentTrainConfig tc;
  tc.steps = kStudentSteps;
  tc.seed = 6;
  tc.log_every = 50;
  tc.target_loss = kEarlyStopFraction * kStudentL1;
  Timer t;
  run->student = lipgen::TrainStudent(run->data.entries, {}, tc, &run->log);
  run->seconds = t.Seconds();
  run->log.WriteCsv((work / "overfit" / "student_loss.csv").string());
  return *run;
}

Outcome StudentOverfit(const fs::path &work) {
  const Overfit &run = OverfitRun(work);
  const bool pass = run.log.final_loss < kStudentL1 && run.log.steps_run <= kStudentSteps &&
                    run.seconds < kStudentMaxSeconds;
  return {pass, Fmt("%zu entries; training-set L1 %.4f after %lld steps vs < %.2f within %d; "
                    "%.0f s vs < %.0f s",
                    run.data.entries.size(), run.log.final_loss,
                    static_cast<long long>(run.log.steps_run), kStudentL1, kStudentSteps,
                    run.seconds, kStudentMaxSeconds)};
}

Outcome EnhancerOverfit(const fs::path &work) {
  const Overfit &run = OverfitRun(work);
  enhancer::EnhancerTrainConfig ec;
  ec.net = DeskEnhancer(true);
  ec.steps = kEnhancerOverfitSteps;
  ec.max_segments = kEnhancerOverfitSegments;
  ec.lr = kEnhancerLr;
  ec.seed = 8;
  ec.log_every = 50;
  ec.target_loss = kEarlyStopFraction * kEnhancerL1;
  nn::TrainLog log;
  Timer t;
  const auto model = enhancer::TrainEnhancer(run.data.entries, &run.student, ec, &log);
  const double secs = t.Seconds();
  log.WriteCsv((work / "overfit" / "enhancer_loss.csv").string());
  const auto segments = enhancer::BuildSegments(
      data::FilterSplit(run.data.entries, data::Split::kTrain), &run.student,
      kEnhancerOverfitSegments);
  const auto noisy_phase = WithNoisyPhase(model);
  std::vector<double> noisy, enhanced, diag;
  for (const auto &s : segments) {
    noisy.push_back(metrics::SiSdr(s.clean_wave, s.noisy_wave));
    enhanced.push_back(metrics::SiSdr(s.clean_wave, enhancer::EnhanceSegment(s, model)));
    diag.push_back(metrics::SiSdr(s.clean_wave, enhancer::EnhanceSegment(s, noisy_phase)));
  }
  const double gain = Mean(enhanced) - Mean(noisy);
  const bool pass = log.final_loss < kEnhancerL1 && log.steps_run <= kEnhancerOverfitSteps &&
                    gain >= kEnhancerOverfitGainDb;
  return {pass, Fmt("%zu segments; L1 %.4f after %lld steps vs < %.2f within %d; SI-SDR "
                    "%.2f -> %.2f dB, gain %.2f vs >= %.1f dB (noisy phase: %.2f dB); %.0f s",
                    segments.size(), log.final_loss, static_cast<long long>(log.steps_run),
                    kEnhancerL1, kEnhancerOverfitSteps, Mean(noisy), Mean(enhanced), gain,
                    kEnhancerOverfitGainDb, Mean(diag), secs)};
}

// ---------------------------------------------------------------- 7, 9, 10

struct ArmScores {
  double si_sdr = 0.0;  // mean over the 0 dB test mixtures
  double stoi = 0.0;
};

// Index 0 is the model as configured (predicted phase); index 1 is the same
// weights with the noisy phase, kept as a diagnostic.
constexpr int kPhaseModes = 2;

struct SeedRun {
  double filter_student = 0.0;  // mean corr(student(noisy), teacher(clean))
  double filter_teacher = 0.0;  // mean corr(teacher(noisy), teacher(clean))
  ArmScores full[kPhaseModes], ao[kPhaseModes];
  // Seed 0 only: mean STOI at 0, 5 and 10 dB for the full model and the input.
  std::vector<double> stoi_enhanced[kPhaseModes], stoi_noisy;
};

struct Experiment {
  std::vector<SeedRun> seeds;
  double seconds = 0.0;
  size_t test_utterances = 0;
};

std::vector<double> Apertures(const lipgen::LipFrameSequence &seq) {
  return lipgen::ApertureTrajectory(seq).values;
}

Experiment &ExperimentRun(const fs::path &work) {
  static Experiment *exp = nullptr;
  if (exp) return *exp;
  exp = new Experiment;
  Timer t;
  const Dataset d = MakeDataset(work / "experiment", kTrainUtterances, kTestUtterances,
                                kUtteranceSeconds, 90);
  const auto test = data::FilterSplit(d.entries, data::Split::kTest);
  std::set<std::string> test_clean;
  for (const auto &e : test) test_clean.insert(e.clean_path);
  exp->test_utterances = test_clean.size();

  std::vector<data::MixResult> mixes;
  std::vector<double> noisy_stoi;
  for (const auto &e : test) {
    mixes.push_back(data::RealizeEntry(e));
    noisy_stoi.push_back(metrics::Stoi(mixes.back().clean, mixes.back().mixture));
  }
  auto bucket = [&](size_t i) { return static_cast<int>(std::lround(test[i].snr_db / 5.0)); };

  for (int seed = 0; seed < kSeeds; ++seed) {
    SeedRun run;
    const fs::path dir = work / "experiment" / ("seed" + std::to_string(seed));
    fs::create_directories(dir);

    lipgen::StudentTrainConfig st;
    st.steps = kExperimentStudentSteps;
    st.seed = 100 + seed;
    nn::TrainLog slog;
    const auto student = lipgen::TrainStudent(d.entries, {}, st, &slog);
    slog.WriteCsv((dir / "student_loss.csv").string());

    // Visual-noise-filter property on the first held-out utterances at 0 dB.
    std::vector<double> cs, ct;
    for (size_t i = 0; i < test.size() && cs.size() < kFilterUtterances; ++i) {
      if (test[i].snr_db != 0.0) continue;
      const auto ref = Apertures(lipgen::TeacherStream(mixes[i].clean));
      cs.push_back(lipgen::SyncProxy(Apertures(lipgen::LipStream(mixes[i].mixture, student)), ref));
      ct.push_back(lipgen::SyncProxy(Apertures(lipgen::TeacherStream(mixes[i].mixture)), ref));
    }
    run.filter_student = Mean(cs);
    run.filter_teacher = Mean(ct);

    for (bool visual : {true, false}) {
      enhancer::EnhancerTrainConfig ec;
      ec.net = DeskEnhancer(visual);
      ec.steps = kExperimentEnhancerSteps;
      ec.lr = kEnhancerLr;
      ec.seed = 200 + seed;
      nn::TrainLog elog;
      const auto model =
          enhancer::TrainEnhancer(d.entries, visual ? &student : nullptr, ec, &elog);
      elog.WriteCsv((dir / (visual ? "full_loss.csv" : "ao_loss.csv")).string());
      const enhancer::EnhancerModel *models[kPhaseModes] = {&model, nullptr};
      const auto noisy_phase = WithNoisyPhase(model);
      models[1] = &noisy_phase;

      for (int m = 0; m < kPhaseModes; ++m) {
        std::vector<double> sisdr, stoi;
        std::vector<std::vector<double>> by_snr(3);
        for (size_t i = 0; i < test.size(); ++i) {
          const auto out = enhancer::EnhanceUtterance(mixes[i].mixture,
                                                      visual ? &student : nullptr, *models[m]);
          const double s = metrics::Stoi(mixes[i].clean, out);
          by_snr[bucket(i)].push_back(s);
          if (test[i].snr_db == 0.0) {
            sisdr.push_back(metrics::SiSdr(mixes[i].clean, out));
            stoi.push_back(s);
          }
        }
        ArmScores &arm = visual ? run.full[m] : run.ao[m];
        arm.si_sdr = Mean(sisdr);
        arm.stoi = Mean(stoi);
        if (visual && seed == 0) {
          for (const auto &v : by_snr) run.stoi_enhanced[m].push_back(Mean(v));
        }
      }
    }
    if (seed == 0) {
      std::vector<std::vector<double>> by_snr(3);
      for (size_t i = 0; i < test.size(); ++i) by_snr[bucket(i)].push_back(noisy_stoi[i]);
      for (const auto &v : by_snr) run.stoi_noisy.push_back(Mean(v));
    }
    std::printf("  seed %d: filter corr student %.3f teacher(noisy) %.3f | 0 dB SI-SDR/STOI "
                "full %.2f/%.3f AO %.2f/%.3f | noisy phase: full %.2f/%.3f AO %.2f/%.3f\n",
                seed, run.filter_student, run.filter_teacher, run.full[0].si_sdr,
                run.full[0].stoi, run.ao[0].si_sdr, run.ao[0].stoi, run.full[1].si_sdr,
                run.full[1].stoi, run.ao[1].si_sdr, run.ao[1].stoi);
    std::fflush(stdout);
    exp->seeds.push_back(run);
  }
  exp->seconds = t.Seconds();
  return *exp;
}

Outcome VisualNoiseFilter(const fs::path &work) {
  const Experiment &exp = ExperimentRun(work);
  int wins = 0;
  std::string per_seed;
  for (const auto &r : exp.seeds) {
    const bool win = r.filter_student > r.filter_teacher;
    wins += win;
    per_seed += Fmt(" %.3f%s%.3f", r.filter_student, win ? ">" : "<=", r.filter_teacher);
  }
  return {wins >= kSeedWins,
          Fmt("%d held-out utterances at 0 dB; corr student(noisy) vs teacher(noisy):%s; "
              "%d of %d seeds vs >= %d",
              kFilterUtterances, per_seed.c_str(), wins, kSeeds, kSeedWins)};
}

Outcome PseudoVisualBenefit(const fs::path &work) {
  const Experiment &exp = ExperimentRun(work);
  int wins[kPhaseModes] = {0, 0};
  double margin[kPhaseModes] = {0.0, 0.0};
  std::string per_seed;
  for (const auto &r : exp.seeds) {
    for (int m = 0; m < kPhaseModes; ++m) {
      wins[m] += r.full[m].si_sdr >= r.ao[m].si_sdr && r.full[m].stoi >= r.ao[m].stoi;
      margin[m] += (r.full[m].si_sdr - r.ao[m].si_sdr) / static_cast<double>(exp.seeds.size());
    }
    per_seed += Fmt(" [%+.2f dB, %+.3f STOI]", r.full[0].si_sdr - r.ao[0].si_sdr,
                    r.full[0].stoi - r.ao[0].stoi);
  }
  const bool pass = exp.test_utterances >= 40 && wins[0] >= kSeedWins &&
                    margin[0] >= kBenefitMarginDb && exp.seconds <= kBenefitMaxSeconds;
  return {pass, Fmt("%zu test utterances at 0 dB; full - AO per seed:%s; %d of %d seeds vs "
                    ">= %d; mean SI-SDR margin %.2f vs >= %.1f dB (noisy phase: %d seeds, "
                    "%.2f dB); %.0f s vs <= %.0f s",
                    exp.test_utterances, per_seed.c_str(), wins[0], kSeeds, kSeedWins,
                    margin[0], kBenefitMarginDb, wins[1], margin[1], exp.seconds,
                    kBenefitMaxSeconds)};
}

Outcome SnrGeneralization(const fs::path &work) {
  const Experiment &exp = ExperimentRun(work);
  const SeedRun &r = exp.seeds.front();
  const auto &n = r.stoi_noisy;
  auto holds = [&](const std::vector<double> &e) {
    return e[2] > e[1] && e[1] > e[0] && e[0] > n[0] && e[1] > n[1] && e[2] > n[2];
  };
  const auto &e = r.stoi_enhanced[0], &q = r.stoi_enhanced[1];
  return {holds(e), Fmt("full model, seed 0: STOI 0/5/10 dB enhanced %.3f/%.3f/%.3f, noisy "
                        "%.3f/%.3f/%.3f (noisy phase: %.3f/%.3f/%.3f, %s)",
                        e[0], e[1], e[2], n[0], n[1], n[2], q[0], q[1], q[2],
                        holds(q) ? "holds" : "fails")};
}

// ---------------------------------------------------------------- 11

int RunCli(const std::string &args, const fs::path &log) {
  const std::string cmd =
      std::string(PVSE_CLI_PATH) + " " + args + " >>" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Bytes(const fs::path &p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome Determinism(const fs::path &work) {
  const fs::path root = work / "determinism";
  const fs::path run = root / "run";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream os(root / "small.cfg");
    os << "student_base_channels = 4\nstudent_embed_dim = 32\nspeech_ch = 16\n"
          "visual_embed = 8\nspeech_blocks = 2\nvisual_layers = 4\ndecoder_layers = 2\n"
          "batch = 4\nlog_every = 10\nsplit_train = 0.5\nsplit_val = 0\nsplit_test = 0.5\n";
  }
  const std::string cfg = " --config " + (root / "small.cfg").string();
  const std::string r = run.string();
  const fs::path log = root / "cli.log";
  const std::vector<std::string> steps = {
      "gen-corpus --out " + r + "/corpus --n 4 --seconds 2 --seed 3",
      "synth --clean-dir " + r + "/corpus/clean --noise-dir " + r + "/corpus/noise --out " + r +
          "/m.jsonl --snr 0,10 --seed 4" + cfg,
      "train-student --manifest " + r + "/m.jsonl --out " + r + "/student --steps 30 --seed 5" +
          cfg,
      "train-enhancer --manifest " + r + "/m.jsonl --student " + r + "/student --out " + r +
          "/enhancer --steps 20 --seed 6" + cfg,
      "train-enhancer --manifest " + r + "/m.jsonl --ao --out " + r + "/ao --steps 20 --seed 6" +
          cfg,
      "enhance --in " + r + "/corpus/clean/utt_0000.wav --student " + r + "/student --enhancer " +
          r + "/enhancer --out " + r + "/enhanced.wav",
      "eval --manifest " + r + "/m.jsonl --arms noisy,ao,ours --student " + r + "/student --ao " +
          r + "/ao --ours " + r + "/enhancer --out " + r + "/report.json",
  };
  std::vector<std::map<std::string, std::string>> snapshots;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(run);
    for (const auto &s : steps) {
      if (RunCli(s, log) != 0) return {false, "CLI step failed: " + s};
    }
    std::map<std::string, std::string> files;
    for (const auto &entry : fs::recursive_directory_iterator(run)) {
      if (entry.is_regular_file()) {
        files[fs::relative(entry.path(), run).string()] = Bytes(entry.path());
      }
    }
    snapshots.push_back(std::move(files));
  }
  const auto &a = snapshots[0], &b = snapshots[1];
  int checkpoints = 0, wavs = 0, reports = 0;
  std::vector<std::string> differ;
  for (const auto &[name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) differ.push_back(name);
    if (name.ends_with(".pvt")) ++checkpoints;
    if (name == "enhanced.wav") ++wavs;
    if (name == "report.json") ++reports;
  }
  if (a.size() != b.size()) differ.push_back("<file set>");
  const bool pass = differ.empty() && checkpoints > 0 && wavs == 1 && reports == 1;
  std::string bad;
  for (const auto &d : differ) bad += " " + d;
  return {pass, Fmt("two CLI runs, %zu files (%d tensor files, enhanced wav, report) %s%s",
                    a.size(), checkpoints, differ.empty() ? "byte-identical" : "DIFFER:",
                    bad.c_str())};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"pvse acceptance criteria"};
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "run a subset of criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const fs::path dir = fs::absolute(work);
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient suite", GradientSuite},
      {"stft round trip", StftRoundTrip},
      {"spectrogram codec inverse", CodecInverse},
      {"mixer accuracy", MixerAccuracy},
      {"metric oracles", MetricOracles},
      {"student overfit", [&] { return StudentOverfit(dir); }},
      {"visual noise filter", [&] { return VisualNoiseFilter(dir); }},
      {"enhancer overfit", [&] { return EnhancerOverfit(dir); }},
      {"pseudo-visual benefit", [&] { return PseudoVisualBenefit(dir); }},
      {"snr generalization", [&] { return SnrGeneralization(dir); }},
      {"determinism", [&] { return Determinism(dir); }},
  };
  int run = 0, passed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++run;
    passed += o.pass;
    std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d of %d criteria passed\n", passed, run);
  return passed == run ? 0 : 1;
}

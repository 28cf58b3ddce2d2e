// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line driver: corpus generation, dataset synthesis, training,
// enhancement, evaluation and the gradient suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pvse/common/error.h"
#include "pvse/config/run_config.h"
#include "pvse/data/corpus.h"
#include "pvse/data/manifest.h"
#include "pvse/enhancer/enhancer.h"
#include "pvse/enhancer/grad_suite.h"
#include "pvse/lipgen/student.h"
#include "pvse/metrics/evaluate.h"
#include "pvse/signal/waveform.h"

namespace fs = std::filesystem;
using namespace pvse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitGradFail = 3;

// Loads --config (if given) and applies flag overrides on top.
struct ConfigFlags {
  std::string path;
  std::vector<std::string> sets;

  void Attach(CLI::App *cmd) {
    cmd->add_option("--config", path, "flat key = value config file");
    cmd->add_option("--set", sets, "override one config key (key=value), repeatable");
  }

  config::RunConfig Load() const {
    config::RunConfig cfg = path.empty() ? config::RunConfig() : config::RunConfig::FromFile(path);
    for (const auto &kv : sets) {
      const auto eq = kv.find('=');
      PVSE_CHECK(eq != std::string::npos, kInvalidConfig, "--set expects key=value, got '", kv,
                 "'");
      cfg.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

void Override(config::RunConfig &cfg, const CLI::Option *opt, const std::string &key,
              const std::string &value) {
  if (opt->count() > 0) cfg.Set(key, value);
}

std::string ConfigHelp() {
  std::ostringstream os;
  os << "Config keys (defaults):\n";
  for (const auto &k : config::ConfigKeys()) {
    os << "  " << k.key << " = " << k.default_value << "    " << k.help << "\n";
  }
  return os.str();
}

void EnsureDir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  PVSE_CHECK(!ec, kIoFailure, "cannot create ", dir, ": ", ec.message());
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"pseudo-visual speech enhancement toolkit"};
  app.require_subcommand(1);
  app.footer(ConfigHelp());

  // gen-corpus
  auto *gen = app.add_subcommand("gen-corpus", "write a synthetic speech and noise corpus");
  std::string gen_out;
  data::CorpusConfig corpus;
  std::vector<std::string> noise_kinds;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--n", corpus.n_utterances, "number of clean utterances")->capture_default_str();
  gen->add_option("--seconds", corpus.utt_seconds, "seconds per utterance")->capture_default_str();
  gen->add_option("--seed", corpus.seed, "corpus seed")->capture_default_str();
  gen->add_option("--sample-rate", corpus.sample_rate, "sample rate in Hz")->capture_default_str();
  gen->add_option("--noise-per-kind", corpus.noise_files_per_kind, "noise files per kind")
      ->capture_default_str();
  gen->add_option("--noise-kinds", noise_kinds,
                  "noise kinds (white, pink, chirp, am_tone, babble); default all")
      ->delimiter(',');

  // synth
  auto *synth = app.add_subcommand("synth", "mix clean and noise files into a manifest");
  std::string synth_clean, synth_noise, synth_out, synth_snr;
  uint64_t synth_seed = 0;
  ConfigFlags synth_cfg;
  synth->add_option("--clean-dir", synth_clean, "directory of clean WAVs")->required();
  synth->add_option("--noise-dir", synth_noise, "directory of noise WAVs")->required();
  synth->add_option("--out", synth_out, "manifest path (JSONL)")->required();
  auto *synth_snr_opt = synth->add_option("--snr", synth_snr, "comma-separated SNRs in dB");
  auto *synth_seed_opt = synth->add_option("--seed", synth_seed, "mixing seed");
  synth_cfg.Attach(synth);

  // train-student
  auto *ts = app.add_subcommand("train-student", "distill the lip teacher into the student");
  std::string ts_manifest, ts_out, ts_log;
  int64_t ts_steps = 0;
  uint64_t ts_seed = 0;
  ConfigFlags ts_cfg;
  ts->add_option("--manifest", ts_manifest, "training manifest")->required();
  ts->add_option("--out", ts_out, "checkpoint directory")->required();
  ts->add_option("--log", ts_log, "loss CSV (default <out>/loss.csv)");
  auto *ts_steps_opt = ts->add_option("--steps", ts_steps, "training steps");
  auto *ts_seed_opt = ts->add_option("--seed", ts_seed, "seed");
  ts_cfg.Attach(ts);

  // train-enhancer
  auto *te = app.add_subcommand("train-enhancer", "train the enhancement network");
  std::string te_manifest, te_student, te_out, te_log;
  int64_t te_steps = 0;
  uint64_t te_seed = 0;
  bool te_ao = false;
  ConfigFlags te_cfg;
  te->add_option("--manifest", te_manifest, "training manifest")->required();
  te->add_option("--student", te_student, "student checkpoint (not needed with --ao)");
  te->add_option("--out", te_out, "checkpoint directory")->required();
  te->add_option("--log", te_log, "loss CSV (default <out>/loss.csv)");
  auto *te_steps_opt = te->add_option("--steps", te_steps, "training steps");
  auto *te_seed_opt = te->add_option("--seed", te_seed, "seed");
  te->add_flag("--ao", te_ao, "train the audio-only baseline");
  te_cfg.Attach(te);

  // enhance
  auto *en = app.add_subcommand("enhance", "enhance one WAV file");
  std::string en_in, en_student, en_enhancer, en_out, en_phase;
  en->add_option("--in", en_in, "noisy input WAV")->required();
  en->add_option("--student", en_student, "student checkpoint (visual models)");
  en->add_option("--enhancer", en_enhancer, "enhancer checkpoint")->required();
  en->add_option("--out", en_out, "output WAV (float32)")->required();
  en->add_option("--phase", en_phase, "override phase source: predicted or noisy")
      ->check(CLI::IsMember({"predicted", "noisy"}));

  // eval
  auto *ev = app.add_subcommand("eval", "evaluate arms on a manifest");
  std::string ev_manifest, ev_student, ev_ao, ev_ours, ev_out = "report.json", ev_split;
  std::vector<std::string> ev_arms = {"noisy"};
  ev->add_option("--manifest", ev_manifest, "manifest to evaluate")->required();
  ev->add_option("--arms", ev_arms, "arms: noisy, ao, ours")->delimiter(',')->capture_default_str();
  ev->add_option("--student", ev_student, "student checkpoint");
  ev->add_option("--ao", ev_ao, "audio-only enhancer checkpoint");
  ev->add_option("--ours", ev_ours, "full enhancer checkpoint");
  ev->add_option("--out", ev_out, "report path")->capture_default_str();
  ev->add_option("--split", ev_split, "only evaluate this split (train, val, test)");

  // gradcheck
  auto *gc = app.add_subcommand("gradcheck", "run finite-difference gradient checks");
  uint64_t gc_seed = 0;
  gc->add_option("--seed", gc_seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      if (!noise_kinds.empty()) {
        corpus.noise_kinds.clear();
        for (const auto &k : noise_kinds) corpus.noise_kinds.push_back(data::ParseNoiseKind(k));
      }
      const auto s = data::GenerateSyntheticCorpus(corpus, gen_out);
      std::printf("corpus: %d clean, %d noise, %g seconds\n", s.clean_files, s.noise_files,
                  s.seconds);
    } else if (*synth) {
      auto cfg = synth_cfg.Load();
      Override(cfg, synth_snr_opt, "snr_list", synth_snr);
      Override(cfg, synth_seed_opt, "seed", std::to_string(synth_seed));
      const data::SplitFractions fr{cfg.GetDouble("split_train"), cfg.GetDouble("split_val"),
                                    cfg.GetDouble("split_test")};
      const auto entries = data::SynthesizeDataset(synth_clean, synth_noise,
                                                   cfg.GetDoubleList("snr_list"), fr,
                                                   cfg.GetUint("seed"), synth_out);
      std::printf("manifest: %zu entries -> %s\n", entries.size(), synth_out.c_str());
    } else if (*ts) {
      auto cfg = ts_cfg.Load();
      Override(cfg, ts_steps_opt, "student_steps", std::to_string(ts_steps));
      Override(cfg, ts_seed_opt, "seed", std::to_string(ts_seed));
      nn::TrainLog log;
      const auto model = lipgen::TrainStudent(data::ReadManifest(ts_manifest), cfg.Teacher(),
                                              cfg.StudentTraining(), &log);
      EnsureDir(ts_out);
      model.Save(ts_out, log.steps_run);
      log.WriteCsv(ts_log.empty() ? (fs::path(ts_out) / "loss.csv").string() : ts_log);
      std::printf("student: %lld steps, train L1 %.6f -> %s\n",
                  static_cast<long long>(log.steps_run), log.final_loss, ts_out.c_str());
    } else if (*te) {
      auto cfg = te_cfg.Load();
      Override(cfg, te_steps_opt, "enhancer_steps", std::to_string(te_steps));
      Override(cfg, te_seed_opt, "seed", std::to_string(te_seed));
      if (te_ao) cfg.Set("use_visual", "false");
      const auto tc = cfg.EnhancerTraining();
      std::optional<lipgen::StudentModel> student;
      if (tc.net.use_visual) {
        PVSE_CHECK(!te_student.empty(), kNoCheckpoint,
                   "--student is required unless --ao is given");
        student = lipgen::LoadStudent(te_student);
      }
      nn::TrainLog log;
      const auto model = enhancer::TrainEnhancer(data::ReadManifest(te_manifest),
                                                 student ? &*student : nullptr, tc, &log);
      EnsureDir(te_out);
      model.Save(te_out, log.steps_run);
      log.WriteCsv(te_log.empty() ? (fs::path(te_out) / "loss.csv").string() : te_log);
      std::printf("enhancer: %lld steps, train L1 %.6f -> %s\n",
                  static_cast<long long>(log.steps_run), log.final_loss, te_out.c_str());
    } else if (*en) {
      auto model = enhancer::LoadEnhancer(en_enhancer);
      if (!en_phase.empty()) {
        auto c = model.net.config();
        c.use_predicted_phase = en_phase == "predicted";
        enhancer::EnhancerModel patched{enhancer::EnhancerNet<float>(c)};
        auto dst = patched.net.NamedParams();
        nn::CopyParams(model.net.NamedParams(), &dst);
        model = std::move(patched);
      }
      std::optional<lipgen::StudentModel> student;
      if (model.net.config().use_visual) {
        PVSE_CHECK(!en_student.empty(), kNoCheckpoint, "--student is required for this model");
        student = lipgen::LoadStudent(en_student);
      }
      signal::Waveform noisy = signal::ReadWav(en_in);
      if (noisy.sample_rate != signal::kDefaultSampleRate) {
        noisy = signal::Resample(noisy, signal::kDefaultSampleRate);
      }
      const auto out = enhancer::EnhanceUtterance(noisy, student ? &*student : nullptr, model);
      signal::WriteWav(en_out, out);
      std::printf("enhanced: %.3f s -> %s\n", out.Seconds(), en_out.c_str());
    } else if (*ev) {
      metrics::EvalOptions opt;
      opt.arms.clear();
      for (const auto &a : ev_arms) opt.arms.push_back(metrics::ParseArm(a));
      opt.student_dir = ev_student;
      opt.ao_dir = ev_ao;
      opt.ours_dir = ev_ours;
      if (!ev_split.empty()) opt.split = data::ParseSplit(ev_split);
      const auto report =
          metrics::EvaluateDataset(data::ReadManifest(ev_manifest), ev_manifest, opt, ev_out);
      std::printf("report: %zu utterances -> %s\n", report["per_utterance"].size(),
                  ev_out.c_str());
    } else if (*gc) {
      bool ok = true;
      for (const auto &e : enhancer::RunGradientSuite(gc_seed)) {
        std::printf("%-20s max_rel_error %.3e over %zu coords  %s\n", e.name.c_str(),
                    e.result.max_rel_error, e.result.coordinates, e.passed() ? "ok" : "FAIL");
        ok = ok && e.passed();
      }
      return ok ? kExitOk : kExitGradFail;
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kInvalidConfig || e.code() == ErrorCode::kInvalidArgument
               ? kExitUsage
               : kExitRuntime;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

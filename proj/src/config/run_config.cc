// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/config/run_config.h"

#include <fstream>
#include <sstream>

#include "pvse/common/error.h"

namespace pvse::config {

const std::vector<KeyDoc> &ConfigKeys() {
  static const std::vector<KeyDoc> keys = {
      {"seed", "0", "base seed for initialization and batch sampling"},
      {"snr_list", "0,5,10", "mixing SNRs in dB for synth"},
      {"split_train", "0.8", "fraction of clean files in the train split"},
      {"split_val", "0.1", "fraction of clean files in the val split"},
      {"split_test", "0.1", "fraction of clean files in the test split"},
      {"batch", "8", "training batch size"},
      {"lr", "1e-4", "Adam learning rate"},
      {"log_every", "50", "steps per loss log record"},
      {"target_loss", "0", "stop once a logged loss falls below this (0 = off)"},
      {"student_steps", "5000", "student training steps"},
      {"student_base_channels", "16", "student encoder base width"},
      {"student_embed_dim", "512", "student embedding width"},
      {"teacher", "synthetic", "teacher kind: synthetic or files"},
      {"teacher_dir", "", "frame root for the files teacher (<dir>/<clean stem>/)"},
      {"enhancer_steps", "8000", "enhancer training steps"},
      {"speech_blocks", "7", "residual blocks in the speech encoder"},
      {"visual_layers", "12", "residual blocks in the visual encoder"},
      {"visual_stages", "4", "visual encoder stages"},
      {"decoder_layers", "14", "residual blocks in the decoder"},
      {"speech_ch", "256", "speech encoder / decoder width"},
      {"visual_embed", "128", "visual embedding width"},
      {"use_visual", "true", "false trains the audio-only baseline"},
      {"use_predicted_phase", "true", "false reuses the noisy phase at synthesis"},
      {"max_segments", "0", "cap on cached 1 s training segments (0 = all)"},
  };
  return keys;
}

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto &k : ConfigKeys()) values_[k.key] = k.default_value;
}

RunConfig RunConfig::FromString(const std::string &text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    PVSE_CHECK(eq != std::string::npos, kInvalidConfig, "line ", lineno,
               ": expected key = value");
    cfg.Set(Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::FromFile(const std::string &path) {
  std::ifstream is(path);
  PVSE_CHECK(is.good(), kIoFailure, "cannot open config ", path);
  std::stringstream ss;
  ss << is.rdbuf();
  return FromString(ss.str());
}

void RunConfig::Set(const std::string &key, const std::string &value) {
  auto it = values_.find(key);
  PVSE_CHECK(it != values_.end(), kInvalidConfig, "unknown config key '", key, "'");
  it->second = value;
}

const std::string &RunConfig::Get(const std::string &key) const {
  auto it = values_.find(key);
  PVSE_CHECK(it != values_.end(), kInvalidConfig, "unknown config key '", key, "'");
  return it->second;
}

int64_t RunConfig::GetInt(const std::string &key) const {
  const std::string &v = Get(key);
  size_t pos = 0;
  int64_t out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (...) {
    pos = 0;
  }
  PVSE_CHECK(pos == v.size() && !v.empty(), kInvalidConfig, key, ": '", v,
             "' is not an integer");
  return out;
}

uint64_t RunConfig::GetUint(const std::string &key) const {
  const std::string &v = Get(key);
  PVSE_CHECK(!v.empty() && v[0] != '-', kInvalidConfig, key, ": '", v,
             "' is not a non-negative integer");
  size_t pos = 0;
  uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (...) {
    pos = 0;
  }
  PVSE_CHECK(pos == v.size(), kInvalidConfig, key, ": '", v, "' is not a non-negative integer");
  return out;
}

double RunConfig::GetDouble(const std::string &key) const {
  const std::string &v = Get(key);
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (...) {
    pos = 0;
  }
  PVSE_CHECK(pos == v.size() && !v.empty(), kInvalidConfig, key, ": '", v,
             "' is not a number");
  return out;
}

bool RunConfig::GetBool(const std::string &key) const {
  const std::string &v = Get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  PVSE_THROW(kInvalidConfig, key, ": '", v, "' is not a boolean");
}

std::vector<double> RunConfig::GetDoubleList(const std::string &key) const {
  std::vector<double> out;
  std::stringstream ss(Get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = Trim(item);
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (...) {
      pos = 0;
    }
    PVSE_CHECK(pos == t.size() && !t.empty(), kInvalidConfig, key, ": bad list item '", t,
               "'");
    out.push_back(v);
  }
  PVSE_CHECK(!out.empty(), kInvalidConfig, key, " is empty");
  return out;
}

std::string RunConfig::ToString() const {
  std::string out;
  for (const auto &k : ConfigKeys()) out += k.key + " = " + values_.at(k.key) + "\n";
  return out;
}

lipgen::StudentTrainConfig RunConfig::StudentTraining() const {
  lipgen::StudentTrainConfig c;
  c.net.base_channels = static_cast<int>(GetInt("student_base_channels"));
  c.net.embed_dim = static_cast<int>(GetInt("student_embed_dim"));
  c.steps = GetInt("student_steps");
  c.batch = static_cast<int>(GetInt("batch"));
  c.lr = GetDouble("lr");
  c.seed = GetUint("seed");
  c.log_every = static_cast<int>(GetInt("log_every"));
  c.target_loss = GetDouble("target_loss");
  c.net.Validate();
  return c;
}

lipgen::TeacherConfig RunConfig::Teacher() const {
  lipgen::TeacherConfig t;
  const std::string &kind = Get("teacher");
  if (kind == "synthetic") {
    t.kind = lipgen::TeacherKind::kSynthetic;
  } else if (kind == "files") {
    t.kind = lipgen::TeacherKind::kFileAdapter;
    t.dir = Get("teacher_dir");
    PVSE_CHECK(!t.dir.empty(), kInvalidConfig, "teacher = files needs teacher_dir");
  } else {
    PVSE_THROW(kInvalidConfig, "teacher: '", kind, "' is not synthetic or files");
  }
  return t;
}

enhancer::EnhancerTrainConfig RunConfig::EnhancerTraining() const {
  enhancer::EnhancerTrainConfig c;
  c.net.speech_blocks = static_cast<int>(GetInt("speech_blocks"));
  c.net.visual_layers = static_cast<int>(GetInt("visual_layers"));
  c.net.visual_stages = static_cast<int>(GetInt("visual_stages"));
  c.net.decoder_layers = static_cast<int>(GetInt("decoder_layers"));
  c.net.speech_ch = static_cast<int>(GetInt("speech_ch"));
  c.net.visual_embed = static_cast<int>(GetInt("visual_embed"));
  c.net.use_visual = GetBool("use_visual");
  c.net.use_predicted_phase = GetBool("use_predicted_phase");
  c.steps = GetInt("enhancer_steps");
  c.batch = static_cast<int>(GetInt("batch"));
  c.lr = GetDouble("lr");
  c.seed = GetUint("seed");
  c.log_every = static_cast<int>(GetInt("log_every"));
  c.target_loss = GetDouble("target_loss");
  c.max_segments = static_cast<int>(GetInt("max_segments"));
  c.net.Validate();
  return c;
}

}  // namespace pvse::config

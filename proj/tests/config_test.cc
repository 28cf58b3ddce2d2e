// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "doctest.h"
#include "pvse/common/error.h"
#include "pvse/config/run_config.h"

using namespace pvse;
using namespace pvse::config;

TEST_CASE("defaults are documented and parse") {
  const RunConfig cfg;
  for (const auto &k : ConfigKeys()) {
    CHECK_FALSE(k.help.empty());
    CHECK(cfg.Get(k.key) == k.default_value);
  }
  const auto st = cfg.StudentTraining();
  CHECK(st.batch == 8);
  CHECK(st.lr == doctest::Approx(1e-4));
  CHECK(st.steps == 5000);
  const auto et = cfg.EnhancerTraining();
  CHECK(et.net.speech_blocks == 7);
  CHECK(et.net.visual_layers == 12);
  CHECK(et.net.decoder_layers == 14);
  CHECK(et.net.use_visual);
  CHECK(et.net.use_predicted_phase);
  CHECK(cfg.GetDoubleList("snr_list") == std::vector<double>{0, 5, 10});
}

TEST_CASE("file text overrides defaults") {
  const RunConfig cfg = RunConfig::FromString(
      "# desk scale\n\nspeech_ch = 64\nuse_visual=false\n  lr = 3e-4  \n");
  CHECK(cfg.GetInt("speech_ch") == 64);
  CHECK_FALSE(cfg.GetBool("use_visual"));
  CHECK(cfg.GetDouble("lr") == doctest::Approx(3e-4));
  CHECK(RunConfig::FromString(cfg.ToString()).ToString() == cfg.ToString());
}

TEST_CASE("bad config input is rejected") {
  auto code = [](const std::function<void()> &fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::kIoFailure;
  };
  CHECK(code([] { RunConfig::FromString("no_such_key = 1\n"); }) == ErrorCode::kInvalidConfig);
  CHECK(code([] { RunConfig::FromString("just words\n"); }) == ErrorCode::kInvalidConfig);
  CHECK(code([] { RunConfig::FromString("batch = eight\n").GetInt("batch"); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code([] { RunConfig::FromString("use_visual = maybe\n").GetBool("use_visual"); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code([] { RunConfig::FromString("teacher = files\n").Teacher(); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code([] { RunConfig::FromString("visual_layers = 7\n").EnhancerTraining(); }) ==
        ErrorCode::kInvalidConfig);
}

// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_TESTS_TEST_UTIL_H_
#define PVSE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "pvse/common/error.h"
#include "pvse/common/random.h"
#include "pvse/signal/waveform.h"

namespace pvse::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pvse_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline signal::Waveform RandomWave(size_t n, uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  signal::Waveform w;
  w.samples.resize(n);
  for (auto &s : w.samples) s = static_cast<float>(amp * rng.Uniform(-1.0, 1.0));
  return w;
}

inline std::string ReadBytes(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

// Runs `fn` and returns the code of the pvse::Error it throws.
inline ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace pvse::testing

#endif  // PVSE_TESTS_TEST_UTIL_H_

// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/train_log.h"

#include <cstdio>
#include <fstream>

#include "pvse/common/error.h"

namespace pvse::nn {

void TrainLog::WriteCsv(const std::string &path) const {
  std::ofstream os(path, std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot open ", path, " for writing");
  os << "step,loss\n";
  char buf[64];
  for (const auto &r : records) {
    std::snprintf(buf, sizeof(buf), "%lld,%.8g\n", static_cast<long long>(r.step), r.loss);
    os << buf;
  }
  PVSE_CHECK(os.good(), kIoFailure, "write failed for ", path);
}

bool LossWindow::Add(int64_t step, double loss, TrainLog *log) {
  sum_ += loss;
  ++count_;
  if (count_ < every_) return false;
  last_ = sum_ / count_;
  log->records.push_back({step, last_});
  sum_ = 0.0;
  count_ = 0;
  return true;
}

}  // namespace pvse::nn

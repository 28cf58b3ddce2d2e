// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_TRAIN_LOG_H_
#define PVSE_NN_TRAIN_LOG_H_

#include <cstdint>
#include <string>
#include <vector>

namespace pvse::nn {

struct LossRecord {
  int64_t step = 0;
  double loss = 0.0;  // mean batch loss over the logging window ending here
};

struct TrainLog {
  std::vector<LossRecord> records;
  int64_t steps_run = 0;
  double final_loss = 0.0;  // full pass over the training samples

  // CSV with header "step,loss".
  void WriteCsv(const std::string &path) const;
};

// Accumulates batch losses and emits one record per `every` steps.
class LossWindow {
 public:
  explicit LossWindow(int every) : every_(every) {}
  // Returns true when a record was appended.
  bool Add(int64_t step, double loss, TrainLog *log);
  double last() const { return last_; }

 private:
  int every_;
  double sum_ = 0.0;
  int count_ = 0;
  double last_ = 0.0;
};

}  // namespace pvse::nn

#endif  // PVSE_NN_TRAIN_LOG_H_

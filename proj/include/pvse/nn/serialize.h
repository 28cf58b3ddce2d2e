// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_NN_SERIALIZE_H_
#define PVSE_NN_SERIALIZE_H_

#include <cstdint>
#include <string>

#include "json.hpp"
#include "pvse/nn/layers.h"

namespace pvse::nn {

inline constexpr int kCheckpointFormatVersion = 1;

// "PVT1" container: magic, u32 ndim, ndim x u32 dims, f32 payload, all
// little-endian.
void WriteTensorFile(const std::string &path, const Tensor<float> &tensor);
Tensor<float> ReadTensorFile(const std::string &path);

struct Checkpoint {
  nlohmann::json architecture;  // includes "kind"
  int64_t step = 0;
  ParamList<float> params;
};

// Writes <dir>/<name>.pvt for every parameter plus <dir>/index.json.
void SaveCheckpoint(const std::string &dir, const nlohmann::json &architecture,
                    int64_t step, const ParamList<float> &params);

// Throws NoCheckpoint when <dir>/index.json is absent.
Checkpoint LoadCheckpoint(const std::string &dir);

}  // namespace pvse::nn

#endif  // PVSE_NN_SERIALIZE_H_

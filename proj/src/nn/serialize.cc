// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/nn/serialize.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "pvse/common/error.h"

namespace pvse::nn {
namespace {

namespace fs = std::filesystem;

void PutU32(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t LoadU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void WriteTensorFile(const std::string &path, const Tensor<float> &tensor) {
  std::string out = "PVT1";
  PutU32(&out, static_cast<uint32_t>(tensor.rank()));
  for (int d : tensor.dims()) PutU32(&out, static_cast<uint32_t>(d));
  for (float v : tensor.data()) {
    uint32_t raw;
    std::memcpy(&raw, &v, sizeof(raw));
    PutU32(&out, raw);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot open ", path, " for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  PVSE_CHECK(os.good(), kIoFailure, "write failed for ", path);
}

Tensor<float> ReadTensorFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  PVSE_CHECK(is.good(), kIoFailure, "cannot open ", path);
  const std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  PVSE_CHECK(bytes.size() >= 8 && bytes.compare(0, 4, "PVT1") == 0, kMalformedFile,
             path, ": not a PVT1 tensor file");
  const uint32_t ndim = LoadU32(p + 4);
  PVSE_CHECK(bytes.size() >= 8 + 4ull * ndim, kMalformedFile, path, ": truncated dims");
  Dims dims(ndim);
  for (uint32_t i = 0; i < ndim; ++i) dims[i] = static_cast<int>(LoadU32(p + 8 + 4 * i));
  const size_t count = NumElements(dims);
  const size_t offset = 8 + 4ull * ndim;
  PVSE_CHECK(bytes.size() == offset + 4 * count, kMalformedFile, path,
             ": payload has ", bytes.size() - offset, " bytes, expected ", 4 * count);
  std::vector<float> data(count);
  for (size_t i = 0; i < count; ++i) {
    const uint32_t raw = LoadU32(p + offset + 4 * i);
    std::memcpy(&data[i], &raw, sizeof(float));
  }
  return Tensor<float>::FromData(dims, std::move(data));
}

void SaveCheckpoint(const std::string &dir, const nlohmann::json &architecture,
                    int64_t step, const ParamList<float> &params) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  PVSE_CHECK(!ec, kIoFailure, "cannot create ", dir, ": ", ec.message());
  nlohmann::json names = nlohmann::json::array();
  for (const auto &[name, tensor] : params) {
    WriteTensorFile((fs::path(dir) / (name + ".pvt")).string(), tensor);
    names.push_back(name);
  }
  nlohmann::json index;
  index["format_version"] = kCheckpointFormatVersion;
  index["architecture"] = architecture;
  index["parameters"] = names;
  index["step"] = step;
  std::ofstream os(fs::path(dir) / "index.json", std::ios::binary | std::ios::trunc);
  PVSE_CHECK(os.good(), kIoFailure, "cannot write index.json in ", dir);
  os << index.dump(2) << '\n';
}

Checkpoint LoadCheckpoint(const std::string &dir) {
  const fs::path index_path = fs::path(dir) / "index.json";
  std::error_code ec;
  PVSE_CHECK(!dir.empty() && fs::is_regular_file(index_path, ec), kNoCheckpoint,
             "no checkpoint index at ", index_path.string());
  std::ifstream is(index_path);
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &ex) {
    PVSE_THROW(kMalformedFile, index_path.string(), ": ", ex.what());
  }
  PVSE_CHECK(index.value("format_version", 0) == kCheckpointFormatVersion, kMalformedFile,
             index_path.string(), ": unsupported format_version");
  Checkpoint ckpt;
  ckpt.architecture = index.at("architecture");
  ckpt.step = index.value("step", int64_t{0});
  for (const auto &name : index.at("parameters")) {
    const std::string n = name.get<std::string>();
    ckpt.params.emplace_back(n, ReadTensorFile((fs::path(dir) / (n + ".pvt")).string()));
  }
  return ckpt;
}

}  // namespace pvse::nn

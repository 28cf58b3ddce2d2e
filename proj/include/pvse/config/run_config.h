// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_CONFIG_RUN_CONFIG_H_
#define PVSE_CONFIG_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pvse/enhancer/enhancer.h"
#include "pvse/lipgen/student.h"

namespace pvse::config {

struct KeyDoc {
  std::string key;
  std::string default_value;
  std::string help;
};

// Every accepted key with its default.
const std::vector<KeyDoc> &ConfigKeys();

// Flat `key = value` settings. Blank lines and lines starting with '#' are
// ignored. Unknown keys and malformed lines throw InvalidConfig.
class RunConfig {
 public:
  RunConfig();

  static RunConfig FromFile(const std::string &path);
  static RunConfig FromString(const std::string &text);

  void Set(const std::string &key, const std::string &value);
  const std::string &Get(const std::string &key) const;

  int64_t GetInt(const std::string &key) const;
  uint64_t GetUint(const std::string &key) const;
  double GetDouble(const std::string &key) const;
  bool GetBool(const std::string &key) const;
  std::vector<double> GetDoubleList(const std::string &key) const;

  // Canonical text form, one key per line in documentation order.
  std::string ToString() const;

  lipgen::StudentTrainConfig StudentTraining() const;
  lipgen::TeacherConfig Teacher() const;
  enhancer::EnhancerTrainConfig EnhancerTraining() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pvse::config

#endif  // PVSE_CONFIG_RUN_CONFIG_H_

// Copyright 2026 The astsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "astsim/calibration.hpp"
#include "astsim/error.hpp"
#include "astsim/params.hpp"

namespace astsim {

// Effective run settings. Defaults, then a key=value file, then flags.
struct RunConfig {
  std::size_t d_e = kDefaultEmbedding;
  std::size_t n = kDefaultHidden;
  double lr = 0.05;
  std::size_t epochs = 60;
  std::uint64_t seed = 0;
  std::int64_t inline_beta = kDefaultInlineBeta;
  double decision_threshold = 0.84;
  std::size_t negatives = 3;
  double ratio = 0.8;
  std::size_t jobs = 1;

  // Space-separated key=value dump, echoed into command output.
  std::string to_string() const {
    std::ostringstream out;
    out << "d_e=" << d_e << " n=" << n << " lr=" << lr << " epochs=" << epochs
        << " seed=" << seed << " inline_beta=" << inline_beta
        << " decision_threshold=" << decision_threshold << " negatives=" << negatives
        << " ratio=" << ratio << " jobs=" << jobs;
    return out.str();
  }
};

// Parses "key = value" lines; '#' starts a comment. Returns the raw map.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", lineno, 1);
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", lineno, 1);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    try {
      if (key == "d_e") {
        cfg.d_e = std::stoul(value);
      } else if (key == "n") {
        cfg.n = std::stoul(value);
      } else if (key == "lr" || key == "eta") {
        cfg.lr = std::stod(value);
      } else if (key == "epochs") {
        cfg.epochs = std::stoul(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "inline_beta") {
        cfg.inline_beta = std::stoll(value);
      } else if (key == "decision_threshold") {
        cfg.decision_threshold = std::stod(value);
      } else if (key == "negatives") {
        cfg.negatives = std::stoul(value);
      } else if (key == "ratio") {
        cfg.ratio = std::stod(value);
      } else if (key == "jobs") {
        cfg.jobs = std::stoul(value);
      } else {
        throw SchemaError("unknown config key \"" + key + "\"");
      }
    } catch (const std::logic_error&) {
      throw SchemaError("bad value for config key \"" + key + "\": " + value);
    }
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  apply_key_values(cfg, parse_key_values(in));
}

}  // namespace astsim

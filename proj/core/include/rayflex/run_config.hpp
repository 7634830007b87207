#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "rayflex/fu_model.hpp"

namespace rayflex {

struct RunConfig {
  FeatureSet feature_set = FeatureSet::Baseline;
  FuSharing fu_sharing = FuSharing::Unified;
  bool trace_enabled = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string scene;
  std::string dataset;
  std::string output;
  std::string trace;  // trace CSV path, used when trace_enabled
};

// Sets one key. Keys: feature_set, fu_sharing, trace_enabled, seed, threads,
// scene, dataset, output, trace. Throws ParseError (line 0) for an unknown
// key or bad value; the caller rewraps with its own location.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Flat "key = value" lines; '#' starts a comment. Applied over config.
void read_run_config(std::istream& in, RunConfig& config, const std::string& source = "<config>");
void load_run_config(const std::filesystem::path& path, RunConfig& config);

FeatureSet parse_feature_set(const std::string& s);
FuSharing parse_fu_sharing(const std::string& s);

}  // namespace rayflex

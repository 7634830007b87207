#include "rayflex/run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "rayflex/errors.hpp"

namespace rayflex {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ParseError("", 0, "bad value '" + v + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("", 0, "bad value '" + v + "' for " + key);
}

}  // namespace

FeatureSet parse_feature_set(const std::string& s) {
  if (s == "baseline") return FeatureSet::Baseline;
  if (s == "extended") return FeatureSet::Extended;
  throw ParseError("", 0, "feature set must be baseline or extended, got '" + s + "'");
}

FuSharing parse_fu_sharing(const std::string& s) {
  if (s == "unified") return FuSharing::Unified;
  if (s == "disjoint") return FuSharing::Disjoint;
  throw ParseError("", 0, "FU sharing must be unified or disjoint, got '" + s + "'");
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "feature_set") {
    config.feature_set = parse_feature_set(value);
  } else if (key == "fu_sharing") {
    config.fu_sharing = parse_fu_sharing(value);
  } else if (key == "trace_enabled") {
    config.trace_enabled = parse_bool(key, value);
  } else if (key == "seed") {
    config.seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "threads") {
    config.threads = parse_unsigned<unsigned>(key, value);
    if (config.threads == 0) throw ParseError("", 0, "threads must be at least 1");
  } else if (key == "scene") {
    config.scene = value;
  } else if (key == "dataset") {
    config.dataset = value;
  } else if (key == "output") {
    config.output = value;
  } else if (key == "trace") {
    config.trace = value;
  } else {
    throw ParseError("", 0, "unknown key '" + key + "'");
  }
}

void read_run_config(std::istream& in, RunConfig& config, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ParseError(source, lineno, "missing key");
    try {
      apply_setting(config, key, value);
    } catch (const ParseError& e) {
      std::string what = e.what();
      if (what.rfind(": ", 0) == 0) what.erase(0, 2);
      throw ParseError(source, lineno, what);
    }
  }
}

void load_run_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  read_run_config(in, config, path.string());
}

}  // namespace rayflex

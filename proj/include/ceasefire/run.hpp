#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ceasefire/config.hpp"

namespace ceasefire {

struct RunManifest {
  std::string command;
  std::string config_digest;
  json parameters;  // full resolved config echo
  struct Output {
    std::string path;
    std::size_t rows;
    std::size_t cols;
  };
  std::vector<Output> outputs;
  double wall_time = 0.0;
  std::string version;

  json to_json() const;
};

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;         // 0 = auto
  std::uint64_t seed = 0;  // randomized test drivers only; echoed in manifest
};

inline constexpr const char* kVersion = "0.1.0";

// Dispatch a subcommand: two-mode, scan-map, mismatch, circuit, four-mode,
// fsr-sweep. Writes CSV tables plus a `manifest.json` summary into out_dir.
RunManifest run(const std::string& command, const RunOptions& opts);

// Deterministic CSV writing: 17 significant digits, scientific notation,
// '\n' line endings, header "# name:unit,...".
class CsvWriter {
 public:
  CsvWriter(std::string path, std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  RunManifest::Output close();

 private:
  std::string path_;
  std::string buf_;
  std::size_t cols_;
  std::size_t rows_ = 0;
};

std::string format_float(double v);

}  // namespace ceasefire

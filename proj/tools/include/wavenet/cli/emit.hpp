#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace wavenet::cli {

inline constexpr const char* kToolVersion = "0.3.0";

// Numbers are written with "%.12e"; same input, same bytes.
std::string format_number(double x);
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
// pretty JSON with sorted keys and a trailing newline
std::string json_text(const nlohmann::json& j);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Self-contained SVG (inline styles, no external references).
std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, bool log_y);
std::string svg_scatter(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                        const std::string& xlabel, const std::string& ylabel);

struct RunManifest {
  std::string subcommand;
  std::string config;
  nlohmann::json parameters = nlohmann::json::object();
  std::string output_dir;
  std::string version = kToolVersion;
  double wall_clock = 0;   // seconds
  std::vector<std::string> files;
};

// Output directory that remembers every file it wrote. finish() writes
// manifest.json, which lists itself as well.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);
  void write_text(const std::string& name, const std::string& text);
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows);
  void write_json(const std::string& name, const nlohmann::json& j);
  void finish(RunManifest manifest);
  const std::filesystem::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

nlohmann::json to_json(const RunManifest& m);

}  // namespace wavenet::cli

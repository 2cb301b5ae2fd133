#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mtlab_cli {

std::string fmt(double value);
std::string join(const std::vector<double>& values);

/// One command's output: a header block (tool, version, resolved settings),
/// scalar results, and an optional CSV table produced by the library.
/// Rendered either as CSV with '#' header lines or as a single JSON object.
class Report {
 public:
  explicit Report(std::string command);

  void setting(const std::string& key, const std::string& value);
  void setting(const std::string& key, double value) { setting(key, fmt(value)); }
  void setting(const std::string& key, int value) { setting(key, std::to_string(value)); }
  void result(const std::string& key, const std::string& value, bool numeric);
  void result(const std::string& key, double value) { result(key, fmt(value), true); }
  void table(std::string csv) { csv_ = std::move(csv); }

  std::string render(const std::string& format) const;

 private:
  std::string render_csv() const;
  std::string render_json() const;

  std::string command_;
  std::vector<std::pair<std::string, std::string>> settings_;
  struct Result {
    std::string key;
    std::string value;
    bool numeric;
  };
  std::vector<Result> results_;
  std::string csv_;
};

// {"error": ..., "message": ..., "command": ...}
std::string diagnostic_json(const std::string& command, const std::string& error, const std::string& message);

}  // namespace mtlab_cli

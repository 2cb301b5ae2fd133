#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "mtlab/mtlab.h"

namespace mtlab_cli {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

namespace {

std::string quoted(const std::string& text) { return nlohmann::json(text).dump(); }

// A CSV field is emitted as a JSON number when it is a finite number, as null
// when it is a non-finite one, and as a string otherwise. Numeric fields keep
// their 17-digit text so nothing is re-rounded.
std::string json_field(const std::string& field) {
  if (field.empty()) return quoted(field);
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) return quoted(field);
  if (!std::isfinite(v)) return "null";
  return field;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Report::Report(std::string command) : command_(std::move(command)) {}

void Report::setting(const std::string& key, const std::string& value) { settings_.emplace_back(key, value); }

void Report::result(const std::string& key, const std::string& value, bool numeric) {
  results_.push_back({key, value, numeric});
}

std::string Report::render(const std::string& format) const {
  return format == "json" ? render_json() : render_csv();
}

std::string Report::render_csv() const {
  std::ostringstream out;
  out << "# tool=mtlab\n# version=" << mtlab_version() << "\n# command=" << command_ << '\n';
  for (const auto& [k, v] : settings_) out << "# " << k << '=' << v << '\n';
  for (const auto& r : results_) out << "# result." << r.key << '=' << r.value << '\n';
  out << csv_;
  return out.str();
}

std::string Report::render_json() const {
  std::ostringstream out;
  out << "{\n  \"tool\": \"mtlab\",\n  \"version\": " << quoted(mtlab_version()) << ",\n  \"command\": "
      << quoted(command_) << ",\n  \"config\": {";
  for (std::size_t i = 0; i < settings_.size(); ++i)
    out << (i ? ", " : "") << quoted(settings_[i].first) << ": " << quoted(settings_[i].second);
  out << "},\n  \"results\": {";
  for (std::size_t i = 0; i < results_.size(); ++i) {
    const auto& r = results_[i];
    out << (i ? ", " : "") << quoted(r.key) << ": " << (r.numeric ? json_field(r.value) : quoted(r.value));
  }
  out << "}";
  if (!csv_.empty()) {
    std::stringstream lines(csv_);
    std::string line;
    std::getline(lines, line);
    const auto columns = split(line);
    out << ",\n  \"columns\": [";
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? ", " : "") << quoted(columns[i]);
    out << "],\n  \"rows\": [";
    bool first = true;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto fields = split(line);
      out << (first ? "\n    {" : ",\n    {");
      first = false;
      for (std::size_t i = 0; i < columns.size() && i < fields.size(); ++i)
        out << (i ? ", " : "") << quoted(columns[i]) << ": " << json_field(fields[i]);
      out << '}';
    }
    out << (first ? "]" : "\n  ]");
  }
  out << "\n}\n";
  return out.str();
}

std::string diagnostic_json(const std::string& command, const std::string& error, const std::string& message) {
  return "{\"command\": " + quoted(command) + ", \"error\": " + quoted(error) + ", \"message\": " + quoted(message) +
         "}\n";
}

}  // namespace mtlab_cli

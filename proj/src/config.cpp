#include "vprgt/config.hpp"

#include "vprgt/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vprgt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("config key '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto v = to_integer("n", item);
    if (v <= 0 || v > 1000000) throw ValidationError("N values must be positive, got " + item);
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ValidationError("empty N list");
  return out;
}

void PipelineConfig::set(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "epsilon") {
    epsilon = to_double(key, value);
  } else if (key == "angle_threshold_deg") {
    angle_threshold_deg = to_double(key, value);
  } else if (key == "model") {
    model = parse_transform_model(value);
  } else if (key == "lambda") {
    lambda = to_double(key, value);
  } else if (key == "gap_penalty") {
    gap_penalty = to_double(key, value);
  } else if (key == "window_radius") {
    const auto r = to_integer(key, value);
    if (r < 0) throw ValidationError("window_radius must be non-negative");
    window_radius = static_cast<std::size_t>(r);
  } else if (key == "recall_n") {
    recall_n = parse_int_list(value);
  } else if (key == "threshold") {
    threshold = to_double(key, value);
  } else if (key == "units_per_meter") {
    units_per_meter = to_double(key, value);
  } else if (key == "output_dir") {
    if (value.empty()) throw ValidationError("output_dir must not be empty");
    output_dir = value;
  } else if (key == "vertical_axis") {
    if (value == "auto") {
      vertical_axis.reset();
    } else {
      vertical_axis = static_cast<int>(to_integer(key, value));
    }
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0 (0 selects the default)");
  if (!(angle_threshold_deg > 0.0 && angle_threshold_deg < 180.0)) {
    throw ValidationError("angle_threshold_deg must lie in (0, 180)");
  }
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
  if (!(gap_penalty > 0.0)) throw ValidationError("gap_penalty must be > 0");
  if (!(threshold > 0.0)) throw ValidationError("threshold must be > 0");
  if (!(units_per_meter > 0.0)) throw ValidationError("units_per_meter must be > 0");
  if (recall_n.empty()) throw ValidationError("recall_n must not be empty");
  for (const int n : recall_n) {
    if (n <= 0) throw ValidationError("recall_n values must be positive");
  }
  if (vertical_axis && (*vertical_axis < 0 || *vertical_axis > 2)) {
    throw ValidationError("vertical_axis must be 0, 1, 2 or auto");
  }
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  std::string n_list;
  for (std::size_t i = 0; i < recall_n.size(); ++i) {
    if (i) n_list += ',';
    n_list += std::to_string(recall_n[i]);
  }
  out << "epsilon = " << format_number(epsilon) << '\n'
      << "angle_threshold_deg = " << format_number(angle_threshold_deg) << '\n'
      << "model = " << to_string(model) << '\n'
      << "lambda = " << format_number(lambda) << '\n'
      << "gap_penalty = " << format_number(gap_penalty) << '\n'
      << "window_radius = " << window_radius << '\n'
      << "recall_n = " << n_list << '\n'
      << "threshold = " << format_number(threshold) << '\n'
      << "units_per_meter = " << format_number(units_per_meter) << '\n'
      << "output_dir = " << output_dir.string() << '\n'
      << "vertical_axis = " << (vertical_axis ? std::to_string(*vertical_axis) : "auto") << '\n';
  return out.str();
}

AnnotationParams PipelineConfig::annotation_params() const {
  AnnotationParams p;
  p.epsilon = epsilon;
  p.angle_threshold_deg = angle_threshold_deg;
  p.model = model;
  p.proposal.lambda = lambda;
  p.proposal.gap_penalty = gap_penalty;
  return p;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    try {
      config.set(key, line.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace vprgt

#include "vprgt/trajectory.hpp"

#include "vprgt/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace vprgt {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string_view> split_comma(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    tokens.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tokens;
}

struct RawRow {
  std::size_t line = 0;
  double timestamp = 0.0;
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
};

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

void check_monotonic(const std::vector<RawRow>& rows, const std::string& source) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].timestamp > rows[i - 1].timestamp)) {
      std::ostringstream msg;
      msg << "timestamps not strictly increasing at line " << rows[i].line << ": "
          << format_number(rows[i].timestamp) << " follows " << format_number(rows[i - 1].timestamp)
          << " (line " << rows[i - 1].line << ")";
      throw ValidationError(msg.str(), where(source, rows[i].line));
    }
  }
}

std::vector<RawRow> read_tum(std::string_view text, const std::string& source) {
  std::vector<RawRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = split_whitespace(line);
    if (tokens.size() != 8) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 8 fields "
                       "'timestamp tx ty tz qx qy qz qw', found " + std::to_string(tokens.size()),
                       where(source, line_no));
    }
    std::array<double, 8> values{};
    for (std::size_t i = 0; i < 8; ++i) {
      const auto v = to_double(tokens[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("line " + std::to_string(line_no) + ": field " + std::to_string(i + 1) +
                             " is not a finite number: '" + std::string(tokens[i]) + "'",
                         where(source, line_no));
      }
      values[i] = *v;
    }
    rows.push_back({line_no, values[0], Eigen::Vector3d(values[1], values[2], values[3])});
  }
  return rows;
}

std::vector<RawRow> read_csv(std::string_view text, const std::string& source, bool& is_3d) {
  std::vector<RawRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  std::size_t columns = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    auto line = trim(raw);
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (line.empty()) continue;
    const auto tokens = split_comma(line);
    if (!header_seen) {
      if (tokens.size() == 3 && tokens[0] == "timestamp" && tokens[1] == "x" && tokens[2] == "y") {
        columns = 3;
      } else if (tokens.size() == 4 && tokens[0] == "timestamp" && tokens[1] == "x" &&
                 tokens[2] == "y" && tokens[3] == "z") {
        columns = 4;
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header 'timestamp,x,y' or 'timestamp,x,y,z'",
                         where(source, line_no));
      }
      header_seen = true;
      continue;
    }
    if (tokens.size() != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                           " columns, found " + std::to_string(tokens.size()),
                       where(source, line_no));
    }
    std::array<double, 4> values{};
    for (std::size_t i = 0; i < columns; ++i) {
      const auto v = to_double(tokens[i]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("line " + std::to_string(line_no) + ": column " + std::to_string(i + 1) +
                             " is not a finite number: '" + std::string(tokens[i]) + "'",
                         where(source, line_no));
      }
      values[i] = *v;
    }
    rows.push_back({line_no, values[0], Eigen::Vector3d(values[1], values[2], values[3])});
  }
  if (!header_seen) {
    throw ParseError("empty CSV trajectory", source);
  }
  is_3d = columns == 4;
  return rows;
}

}  // namespace

Trajectory::Trajectory(std::string scene_id, std::string visit_id, std::vector<Keyframe> keyframes,
                       std::string source_path)
    : scene_id_(std::move(scene_id)),
      visit_id_(std::move(visit_id)),
      keyframes_(std::move(keyframes)),
      source_path_(std::move(source_path)) {
  if (keyframes_.size() < 2) {
    throw ValidationError("trajectory needs at least 2 keyframes, got " +
                              std::to_string(keyframes_.size()),
                          source_path_);
  }
  for (std::size_t i = 0; i < keyframes_.size(); ++i) {
    const auto& kf = keyframes_[i];
    if (!std::isfinite(kf.timestamp) || kf.timestamp < 0.0) {
      throw ValidationError("keyframe " + std::to_string(i) + " has invalid timestamp " +
                                format_number(kf.timestamp),
                            source_path_);
    }
    if (!kf.position.allFinite()) {
      throw ValidationError("keyframe " + std::to_string(i) + " has a non-finite position",
                            source_path_);
    }
    if (i > 0 && !(kf.timestamp > keyframes_[i - 1].timestamp)) {
      throw ValidationError("keyframe timestamps not strictly increasing between keyframes " +
                                std::to_string(i - 1) + " and " + std::to_string(i),
                            source_path_);
    }
  }
}

std::vector<Vec2> Trajectory::positions() const {
  std::vector<Vec2> out;
  out.reserve(keyframes_.size());
  for (const auto& kf : keyframes_) out.push_back(kf.position);
  return out;
}

TrajectoryFormat parse_trajectory_format(std::string_view name) {
  if (name == "tum" || name == "TUM") return TrajectoryFormat::tum;
  if (name == "csv" || name == "CSV") return TrajectoryFormat::csv;
  throw ValidationError("unknown trajectory format '" + std::string(name) + "' (tum|csv)");
}

std::string_view to_string(TrajectoryFormat format) {
  return format == TrajectoryFormat::tum ? "tum" : "csv";
}

TrajectoryFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TrajectoryFormat::csv : TrajectoryFormat::tum;
}

int least_variance_axis(const std::vector<Eigen::Vector3d>& points) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Vector3d var = Eigen::Vector3d::Zero();
  for (const auto& p : points) var += (p - mean).cwiseAbs2();
  int axis = 2;
  for (int a = 1; a >= 0; --a) {
    if (var[a] < var[axis]) axis = a;
  }
  return axis;
}

Trajectory parse_trajectory_text(std::string_view text, TrajectoryFormat format,
                                 const ParseOptions& options, const std::string& source) {
  bool is_3d = true;
  std::vector<RawRow> rows =
      format == TrajectoryFormat::tum ? read_tum(text, source) : read_csv(text, source, is_3d);

  for (const auto& row : rows) {
    if (row.timestamp < 0.0) {
      throw ValidationError("line " + std::to_string(row.line) + ": negative timestamp",
                            where(source, row.line));
    }
  }
  check_monotonic(rows, source);
  if (rows.size() < 2) {
    throw ValidationError("trajectory needs at least 2 keyframes, got " +
                              std::to_string(rows.size()),
                          source);
  }

  std::vector<Keyframe> keyframes;
  keyframes.reserve(rows.size());
  if (is_3d) {
    int axis = 0;
    if (options.vertical_axis) {
      axis = *options.vertical_axis;
      if (axis < 0 || axis > 2) {
        throw ValidationError("vertical axis must be 0, 1 or 2");
      }
    } else {
      std::vector<Eigen::Vector3d> xyz;
      xyz.reserve(rows.size());
      for (const auto& row : rows) xyz.push_back(row.xyz);
      axis = least_variance_axis(xyz);
    }
    const int u = axis == 0 ? 1 : 0;
    const int v = axis == 2 ? 1 : 2;
    for (const auto& row : rows) {
      keyframes.push_back({row.timestamp, Vec2(row.xyz[u], row.xyz[v]), row.xyz});
    }
  } else {
    for (const auto& row : rows) {
      keyframes.push_back({row.timestamp, Vec2(row.xyz[0], row.xyz[1]), std::nullopt});
    }
  }

  std::string visit = options.visit_id;
  if (visit.empty()) visit = std::filesystem::path(source).stem().string();
  return Trajectory(options.scene_id, visit, std::move(keyframes), source);
}

Trajectory parse_trajectory(const std::filesystem::path& path, TrajectoryFormat format,
                            const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open trajectory file", path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trajectory_text(buffer.str(), format, options, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory, TrajectoryFormat format) {
  if (format == TrajectoryFormat::csv) {
    out << "timestamp,x,y\n";
    for (const auto& kf : trajectory.keyframes()) {
      out << format_number(kf.timestamp) << ',' << format_number(kf.position.x()) << ','
          << format_number(kf.position.y()) << '\n';
    }
    return;
  }
  bool all_raw = true;
  for (const auto& kf : trajectory.keyframes()) all_raw = all_raw && kf.raw_position_3d.has_value();
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto& kf : trajectory.keyframes()) {
    const Eigen::Vector3d p =
        all_raw ? *kf.raw_position_3d : Eigen::Vector3d(kf.position.x(), kf.position.y(), 0.0);
    out << format_number(kf.timestamp) << ' ' << format_number(p.x()) << ' '
        << format_number(p.y()) << ' ' << format_number(p.z()) << " 0 0 0 1\n";
  }
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& trajectory,
                     TrajectoryFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write trajectory file", path.string());
  }
  write_trajectory(out, trajectory, format);
}

double polyline_length(const Trajectory& trajectory) {
  const auto points = trajectory.positions();
  return polyline_length(std::span<const Vec2>(points));
}

}  // namespace vprgt

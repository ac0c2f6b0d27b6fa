#include "detect/data/recording_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "detect/core/errors.hpp"
#include "detect/data/text.hpp"

namespace detect::data {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& file, std::size_t line,
                       const std::string& message) {
  throw IngestionError(file.string() + ":" + std::to_string(line) + ": " + message);
}

int trial_from_stem(const std::string& stem) {
  const auto pos = stem.rfind('_');
  if (pos == std::string::npos) return 0;
  const auto value = parse_int(std::string_view(stem).substr(pos + 1));
  return value && *value >= 0 ? static_cast<int>(*value) : 0;
}

}  // namespace

SensorRecording read_recording_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open " + file.string());

  SensorRecording rec;
  rec.trial = trial_from_stem(file.stem().string());
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) fail(file, line_no + 1, std::string("missing ") + what);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("metadata header");
  if (trim_space(line) != kRecordingMetaHeader) {
    fail(file, line_no, std::string("expected header '") + kRecordingMetaHeader + "'");
  }
  next_line("metadata row");
  {
    const auto fields = split_fields(line);
    if (fields.size() != 5) fail(file, line_no, "metadata row needs 5 fields");
    rec.patient_id = std::string(trim_space(fields[0]));
    if (rec.patient_id.empty()) fail(file, line_no, "empty patient_id");
    const auto phase = parse_phase(trim_space(fields[1]));
    if (!phase) fail(file, line_no, "unknown phase '" + std::string(fields[1]) + "'");
    const auto activity = parse_activity(trim_space(fields[2]));
    if (!activity) {
      fail(file, line_no, "unknown activity '" + std::string(fields[2]) + "'");
    }
    const auto placement = parse_placement(trim_space(fields[3]));
    if (!placement) {
      fail(file, line_no, "unknown placement '" + std::string(fields[3]) + "'");
    }
    const auto rate = parse_double(fields[4]);
    if (!rate || !(*rate > 0.0) || !std::isfinite(*rate)) {
      fail(file, line_no, "invalid rate_hz '" + std::string(fields[4]) + "'");
    }
    rec.phase = *phase;
    rec.activity = *activity;
    rec.placement = *placement;
    rec.sample_rate_hz = *rate;
  }
  next_line("sample header");
  if (trim_space(line) != kRecordingSampleHeader) {
    fail(file, line_no, std::string("expected column header '") +
                            kRecordingSampleHeader + "'");
  }

  static constexpr const char* kColumns[] = {"t", "ax", "ay", "az", "gx", "gy", "gz"};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim_space(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 7) {
      fail(file, line_no, "expected 7 columns, found " + std::to_string(fields.size()));
    }
    std::array<double, 7> row{};
    for (std::size_t c = 0; c < 7; ++c) {
      const auto v = parse_double(fields[c]);
      if (!v) {
        fail(file, line_no, std::string("non-numeric value in column '") +
                                kColumns[c] + "': '" + std::string(fields[c]) + "'");
      }
      if (!std::isfinite(*v)) {
        fail(file, line_no, std::string("non-finite value in column '") +
                                kColumns[c] + "'");
      }
      row[c] = *v;
    }
    rec.timestamps.push_back(row[0]);
    rec.samples.push_back({row[1], row[2], row[3], row[4], row[5], row[6]});
  }
  if (rec.samples.empty()) fail(file, line_no, "recording has no samples");
  return rec;
}

std::string recording_file_name(const SensorRecording& rec) {
  std::ostringstream name;
  name << rec.patient_id << '_' << to_string(rec.phase) << '_'
       << to_string(rec.activity) << '_' << to_string(rec.placement) << '_'
       << rec.trial << ".csv";
  return name.str();
}

void write_recording_csv(const SensorRecording& rec, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  std::string buffer;
  buffer.reserve(rec.samples.size() * 64 + 128);
  buffer += kRecordingMetaHeader;
  buffer += '\n';
  buffer += rec.patient_id + ',' + std::string(to_string(rec.phase)) + ',' +
            std::string(to_string(rec.activity)) + ',' +
            std::string(to_string(rec.placement)) + ',' +
            format_exact(rec.sample_rate_hz) + '\n';
  buffer += kRecordingSampleHeader;
  buffer += '\n';
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const double t = i < rec.timestamps.size()
                         ? rec.timestamps[i]
                         : static_cast<double>(i) / rec.sample_rate_hz;
    buffer += format_fixed(t, 2);
    for (double v : rec.samples[i]) {
      buffer += ',';
      buffer += format_fixed(v, 6);
    }
    buffer += '\n';
  }
  out << buffer;
  if (!out) throw IoError("write failed for " + file.string());
}

std::vector<SensorRecording> load_recordings(const fs::path& path) {
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return {read_recording_csv(path)};
  if (!fs::is_directory(path, ec)) {
    throw IngestionError("no such file or directory: " + path.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".csv" || p.filename() == "nrs.csv") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  std::vector<SensorRecording> recordings;
  recordings.reserve(files.size());
  for (const auto& f : files) recordings.push_back(read_recording_csv(f));
  return recordings;
}

}  // namespace detect::data

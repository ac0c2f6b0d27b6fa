#include "detect/data/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "detect/core/errors.hpp"
#include "detect/data/text.hpp"

namespace detect::data {

namespace fs = std::filesystem;

std::optional<Activity> benchmark_activity(std::string_view folder_name) {
  std::string name(folder_name);
  const auto dot = name.find('.');
  if (dot != std::string::npos &&
      std::all_of(name.begin(), name.begin() + static_cast<long>(dot),
                  [](unsigned char c) { return std::isdigit(c); })) {
    name.erase(0, dot + 1);
  }
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "sit" || name == "sitting") return Activity::sit;
  if (name == "walk" || name == "walking") return Activity::walk;
  static constexpr std::string_view kStairs[] = {
      "stair-up",  "stair-down", "stairs",           "upstairs",
      "downstairs", "walking_upstairs", "walking_downstairs", "stairs_up",
      "stairs_down"};
  for (auto s : kStairs) {
    if (name == s) return Activity::stairs;
  }
  return std::nullopt;
}

namespace {

SensorRecording read_benchmark_file(const fs::path& file, Activity activity,
                                    double rate_hz, int trial) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open " + file.string());
  SensorRecording rec;
  const auto stem = file.stem().string();
  rec.patient_id = stem.substr(0, stem.find('_'));
  rec.phase = Phase::pre;
  rec.activity = activity;
  rec.placement = Placement::nondominant_hand;
  rec.sample_rate_hz = rate_hz;
  rec.trial = trial;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim_space(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    std::vector<double> row;
    bool numeric = true;
    for (auto f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (line_no == 1) continue;
      throw IngestionError(file.string() + ":" + std::to_string(line_no) +
                           ": non-numeric value");
    }
    Sample s{};
    if (row.size() == 7) {
      rec.timestamps.push_back(row[0]);
      std::copy(row.begin() + 1, row.end(), s.begin());
    } else if (row.size() == 8) {
      rec.timestamps.push_back(row[0]);
      s = {row[1], row[2], row[3], row[5], row[6], row[7]};
    } else {
      throw IngestionError(file.string() + ":" + std::to_string(line_no) +
                           ": expected 7 or 8 columns, found " +
                           std::to_string(row.size()));
    }
    for (double v : s) {
      if (!std::isfinite(v)) {
        throw IngestionError(file.string() + ":" + std::to_string(line_no) +
                             ": non-finite value");
      }
    }
    rec.samples.push_back(s);
  }
  if (rec.samples.empty()) throw IngestionError(file.string() + ": no samples");
  return rec;
}

}  // namespace

std::vector<SensorRecording> load_benchmark_directory(const fs::path& root,
                                                      double rate_hz) {
  if (!fs::is_directory(root)) {
    throw IngestionError("benchmark directory not found: " + root.string());
  }
  std::vector<fs::path> folders;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) folders.push_back(e.path());
  }
  std::sort(folders.begin(), folders.end());
  std::vector<SensorRecording> out;
  for (const auto& folder : folders) {
    const auto activity = benchmark_activity(folder.filename().string());
    if (!activity) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(folder)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    int trial = 0;
    for (const auto& f : files) out.push_back(read_benchmark_file(f, *activity, rate_hz, trial++));
  }
  return out;
}

}  // namespace detect::data

#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "detect/data/types.hpp"

namespace detect::testing {

/// Recording whose sample i, channel c holds i + c / 10.
inline data::SensorRecording ramp_recording(std::size_t samples, double rate_hz = 100.0,
                                            data::Activity activity = data::Activity::walk,
                                            std::string patient = "p1", int trial = 0) {
  data::SensorRecording rec;
  rec.patient_id = std::move(patient);
  rec.activity = activity;
  rec.sample_rate_hz = rate_hz;
  rec.trial = trial;
  for (std::size_t i = 0; i < samples; ++i) {
    rec.timestamps.push_back(static_cast<double>(i) / rate_hz);
    data::Sample s{};
    for (std::size_t c = 0; c < data::kChannels; ++c) {
      s[c] = static_cast<double>(i) + static_cast<double>(c) / 10.0;
    }
    rec.samples.push_back(s);
  }
  return rec;
}

/// `per_class` windows of each label with Gaussian values shifted by label.
inline data::WindowSet random_window_set(std::size_t per_class, std::uint64_t seed,
                                         std::size_t length = 100) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  data::WindowSet set;
  set.window_length = length;
  for (std::size_t label = 0; label < 3; ++label) {
    for (std::size_t i = 0; i < per_class; ++i) {
      data::Window w;
      w.label = label;
      w.source.patient_id = "p" + std::to_string(i % 4);
      w.source.activity = data::kAllActivities[label];
      w.source.trial = static_cast<int>(i / 10);
      w.source.start_index = (i % 10) * 50;
      w.values.resize(length * data::kChannels);
      for (double& v : w.values) v = normal(rng) + static_cast<double>(label);
      set.windows.push_back(std::move(w));
    }
  }
  return set;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "detect_test_XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) std::abort();
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace detect::testing

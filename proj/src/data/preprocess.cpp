#include "detect/data/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "detect/core/errors.hpp"

namespace detect::data {

namespace {

std::string describe(const SensorRecording& rec) {
  WindowSource s{rec.patient_id, rec.phase, rec.activity, rec.placement, rec.trial, 0};
  return s.trial_key();
}

}  // namespace

SensorRecording trim(const SensorRecording& rec, double trim_s) {
  if (!(trim_s >= 0.0)) throw ContractError("trim length must be non-negative");
  const auto cut = static_cast<std::size_t>(std::llround(trim_s * rec.sample_rate_hz));
  if (rec.samples.size() <= 2 * cut) {
    throw PreprocessError("recording " + describe(rec) + " has " +
                          std::to_string(rec.samples.size()) +
                          " samples, not more than the " + std::to_string(2 * cut) +
                          " removed by trimming");
  }
  SensorRecording out = rec;
  out.samples.assign(rec.samples.begin() + static_cast<long>(cut),
                     rec.samples.end() - static_cast<long>(cut));
  if (rec.timestamps.size() == rec.samples.size()) {
    out.timestamps.assign(rec.timestamps.begin() + static_cast<long>(cut),
                          rec.timestamps.end() - static_cast<long>(cut));
  } else {
    out.timestamps.clear();
  }
  return out;
}

std::vector<Window> segment(const SensorRecording& rec, std::size_t window,
                            std::size_t step) {
  if (window == 0 || step == 0 || step > window) {
    throw ContractError("segment needs window >= 1 and 1 <= step <= window");
  }
  std::vector<Window> windows;
  if (rec.samples.size() < window) return windows;
  const std::size_t count = (rec.samples.size() - window) / step + 1;
  windows.reserve(count);
  const auto label = static_cast<std::size_t>(
      std::find(kAllActivities.begin(), kAllActivities.end(), rec.activity) -
      kAllActivities.begin());
  for (std::size_t i = 0; i < count; ++i) {
    Window w;
    w.label = label;
    w.source = {rec.patient_id, rec.phase, rec.activity, rec.placement, rec.trial,
                i * step};
    w.values.reserve(window * kChannels);
    for (std::size_t t = 0; t < window; ++t) {
      const auto& s = rec.samples[i * step + t];
      w.values.insert(w.values.end(), s.begin(), s.end());
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

PreprocessResult build_window_set(const std::vector<SensorRecording>& recordings,
                                  const PreprocessOptions& options) {
  PreprocessResult result;
  result.windows.window_length = options.window;
  for (const auto& rec : recordings) {
    SensorRecording trimmed;
    try {
      trimmed = trim(rec, options.trim_s);
    } catch (const PreprocessError& e) {
      result.warnings.push_back(std::string("skipped: ") + e.what());
      continue;
    }
    auto windows = segment(trimmed, options.window, options.step);
    if (windows.empty()) {
      result.warnings.push_back("no windows: recording " + describe(rec) + " has " +
                                std::to_string(trimmed.samples.size()) +
                                " samples after trimming");
      continue;
    }
    std::move(windows.begin(), windows.end(),
              std::back_inserter(result.windows.windows));
  }
  return result;
}

NormStats fit_norm_stats(const WindowSet& train) {
  if (train.empty()) throw ContractError("cannot fit normalization on an empty set");
  if (train.normalized) {
    throw ContractError("normalization must be fit on unnormalized data");
  }
  // Welford update per channel.
  std::array<double, kChannels> mean{};
  std::array<double, kChannels> m2{};
  double count = 0.0;
  for (const auto& w : train.windows) {
    for (std::size_t t = 0; t < w.values.size() / kChannels; ++t) {
      count += 1.0;
      for (std::size_t c = 0; c < kChannels; ++c) {
        const double v = w.values[t * kChannels + c];
        const double delta = v - mean[c];
        mean[c] += delta / count;
        m2[c] += delta * (v - mean[c]);
      }
    }
  }
  NormStats stats;
  for (std::size_t c = 0; c < kChannels; ++c) {
    stats.mean[c] = mean[c];
    stats.stddev[c] = std::max(std::sqrt(m2[c] / count), kStdFloor);
  }
  return stats;
}

WindowSet apply_norm(const WindowSet& set, const NormStats& stats) {
  if (set.normalized) throw ContractError("window set is already normalized");
  for (double s : stats.stddev) {
    if (!(s > 0.0)) throw ContractError("normalization std must be positive");
  }
  WindowSet out = set;
  for (auto& w : out.windows) {
    for (std::size_t j = 0; j < w.values.size(); ++j) {
      const auto c = j % kChannels;
      w.values[j] = (w.values[j] - stats.mean[c]) / stats.stddev[c];
    }
  }
  out.normalized = true;
  out.norm_stats = stats;
  return out;
}

}  // namespace detect::data

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "detect/data/types.hpp"

namespace detect::data {

struct PreprocessOptions {
  double trim_s = 2.5;
  std::size_t window = 100;
  std::size_t step = 50;
};

/// Drops round(trim_s * rate) samples from each end. Throws PreprocessError
/// when nothing would remain.
SensorRecording trim(const SensorRecording& rec, double trim_s = 2.5);

/// Sliding windows starting at 0, step, 2*step, ...; the trailing partial
/// window is discarded. Returns no windows when the recording is shorter
/// than one window. Labels are the activity's position in kAllActivities.
std::vector<Window> segment(const SensorRecording& rec, std::size_t window = 100,
                            std::size_t step = 50);

struct PreprocessResult {
  WindowSet windows;
  std::vector<std::string> warnings;  // skipped or empty recordings
};

/// trim + segment for every recording, in input order. Recordings that are
/// too short are skipped and reported in `warnings`.
PreprocessResult build_window_set(const std::vector<SensorRecording>& recordings,
                                  const PreprocessOptions& options = {});

/// Per-channel mean and population standard deviation over every sample of
/// every window; std is floored at 1e-8.
NormStats fit_norm_stats(const WindowSet& train);

/// Returns a copy with every value mapped to (v - mean_c) / std_c.
/// Throws ContractError when `set` is already normalized.
WindowSet apply_norm(const WindowSet& set, const NormStats& stats);

inline constexpr double kStdFloor = 1e-8;

}  // namespace detect::data

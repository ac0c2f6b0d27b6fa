#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace detect::data {

inline constexpr std::size_t kChannels = 6;

/// One IMU sample: a_x, a_y, a_z (m/s^2), g_x, g_y, g_z (rad/s).
using Sample = std::array<double, kChannels>;

enum class Phase { pre, post };
enum class Activity { sit, walk, stairs };
enum class Placement { nondominant_hand, pant_pocket };

inline constexpr std::array<Activity, 3> kAllActivities = {
    Activity::sit, Activity::walk, Activity::stairs};
inline constexpr std::array<Placement, 2> kAllPlacements = {
    Placement::nondominant_hand, Placement::pant_pocket};
inline constexpr std::array<Phase, 2> kAllPhases = {Phase::pre, Phase::post};

std::string_view to_string(Phase phase);
std::string_view to_string(Activity activity);
std::string_view to_string(Placement placement);

std::optional<Phase> parse_phase(std::string_view text);
std::optional<Activity> parse_activity(std::string_view text);
std::optional<Placement> parse_placement(std::string_view text);

/// Class names in label order: sit = 0, walk = 1, stairs = 2.
std::vector<std::string> default_class_names();

struct SensorRecording {
  std::string patient_id;
  Phase phase = Phase::pre;
  Activity activity = Activity::sit;
  Placement placement = Placement::nondominant_hand;
  double sample_rate_hz = 100.0;
  int trial = 0;
  std::vector<double> timestamps;
  std::vector<Sample> samples;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct WindowSource {
  std::string patient_id;
  Phase phase = Phase::pre;
  Activity activity = Activity::sit;
  Placement placement = Placement::nondominant_hand;
  int trial = 0;
  std::size_t start_index = 0;

  /// Identity of the recording the window came from.
  std::string trial_key() const;
  /// Unique identity of the window.
  std::string key() const;
};

struct Window {
  std::vector<double> values;  // length x kChannels, row-major
  std::size_t label = 0;
  WindowSource source;
};

/// Per-channel z-score statistics.
struct NormStats {
  std::array<double, kChannels> mean{};
  std::array<double, kChannels> stddev{};

  bool operator==(const NormStats&) const = default;
};

struct WindowSet {
  std::vector<Window> windows;
  std::vector<std::string> class_names = default_class_names();
  std::size_t window_length = 100;
  bool normalized = false;
  std::optional<NormStats> norm_stats;

  std::size_t size() const { return windows.size(); }
  bool empty() const { return windows.empty(); }

  /// Empty set with the same class names, window length and normalization.
  WindowSet like() const;

  /// Throws ContractError when an invariant is broken.
  void validate() const;
};

/// Windows per class label, indexed by label.
std::vector<std::size_t> class_counts(const WindowSet& set);

/// Subset selected by predicate on each window.
template <typename Pred>
WindowSet filter(const WindowSet& set, Pred pred) {
  WindowSet out = set.like();
  for (const auto& w : set.windows) {
    if (pred(w)) out.windows.push_back(w);
  }
  return out;
}

}  // namespace detect::data

#include "detect/data/types.hpp"

#include <cmath>

#include "detect/core/errors.hpp"

namespace detect::data {

std::string_view to_string(Phase phase) {
  return phase == Phase::pre ? "pre" : "post";
}

std::string_view to_string(Activity activity) {
  switch (activity) {
    case Activity::sit:
      return "sit";
    case Activity::walk:
      return "walk";
    case Activity::stairs:
      return "stairs";
  }
  return "unknown";
}

std::string_view to_string(Placement placement) {
  return placement == Placement::nondominant_hand ? "nondominant_hand"
                                                  : "pant_pocket";
}

std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "pre") return Phase::pre;
  if (text == "post") return Phase::post;
  return std::nullopt;
}

std::optional<Activity> parse_activity(std::string_view text) {
  for (auto a : kAllActivities) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<Placement> parse_placement(std::string_view text) {
  for (auto p : kAllPlacements) {
    if (text == to_string(p)) return p;
  }
  return std::nullopt;
}

std::vector<std::string> default_class_names() {
  std::vector<std::string> names;
  for (auto a : kAllActivities) names.emplace_back(to_string(a));
  return names;
}

std::string WindowSource::trial_key() const {
  std::string key = patient_id;
  key += '|';
  key += to_string(phase);
  key += '|';
  key += to_string(activity);
  key += '|';
  key += to_string(placement);
  key += '|';
  key += std::to_string(trial);
  return key;
}

std::string WindowSource::key() const {
  return trial_key() + '@' + std::to_string(start_index);
}

WindowSet WindowSet::like() const {
  WindowSet out;
  out.class_names = class_names;
  out.window_length = window_length;
  out.normalized = normalized;
  out.norm_stats = norm_stats;
  return out;
}

void WindowSet::validate() const {
  if (normalized && !norm_stats) {
    throw ContractError("window set is flagged normalized but has no stats");
  }
  for (const auto& w : windows) {
    if (w.values.size() != window_length * kChannels) {
      throw ContractError("window " + w.source.key() + " has " +
                          std::to_string(w.values.size()) + " values, expected " +
                          std::to_string(window_length * kChannels));
    }
    if (w.label >= class_names.size()) {
      throw ContractError("window " + w.source.key() + " has label " +
                          std::to_string(w.label) + " outside the class set");
    }
  }
}

std::vector<std::size_t> class_counts(const WindowSet& set) {
  std::vector<std::size_t> counts(set.class_names.size(), 0);
  for (const auto& w : set.windows) {
    if (w.label < counts.size()) ++counts[w.label];
  }
  return counts;
}

}  // namespace detect::data

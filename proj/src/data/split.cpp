#include "detect/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "detect/core/errors.hpp"

namespace detect::data {

namespace {

// Units are the things being split: single windows, or all windows of a
// trial. Each unit carries one label.
struct Units {
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> labels;
};

Units make_units(const WindowSet& set, SplitGranularity granularity) {
  Units units;
  if (granularity == SplitGranularity::window) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      units.members.push_back({i});
      units.labels.push_back(set.windows[i].label);
    }
    return units;
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto key = set.windows[i].source.trial_key();
    auto [it, inserted] = index.emplace(key, units.members.size());
    if (inserted) {
      units.members.emplace_back();
      units.labels.push_back(set.windows[i].label);
    }
    units.members[it->second].push_back(i);
  }
  return units;
}

std::vector<std::vector<std::size_t>> units_by_class(const Units& units,
                                                     std::size_t classes) {
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t u = 0; u < units.labels.size(); ++u) {
    by_class.at(units.labels[u]).push_back(u);
  }
  return by_class;
}

WindowSet gather(const WindowSet& set, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  WindowSet out = set.like();
  out.windows.reserve(indices.size());
  for (auto i : indices) out.windows.push_back(set.windows[i]);
  return out;
}

}  // namespace

SplitResult stratified_split(const WindowSet& set, double train_frac,
                             std::uint64_t seed, SplitGranularity granularity) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw ContractError("train fraction must be in (0, 1)");
  }
  const Units units = make_units(set, granularity);
  auto by_class = units_by_class(units, set.class_names.size());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < 2) {
      throw SplitError("class '" + set.class_names[c] + "' has " +
                       std::to_string(members.size()) +
                       " unit(s); a stratified split needs at least 2");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto wanted = static_cast<std::size_t>(
        std::llround(train_frac * static_cast<double>(members.size())));
    const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, members.size() - 1);
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto& dst = i < n_train ? train_idx : val_idx;
      const auto& m = units.members[members[i]];
      dst.insert(dst.end(), m.begin(), m.end());
    }
  }
  return {gather(set, std::move(train_idx)), gather(set, std::move(val_idx))};
}

std::vector<SplitResult> kfold(const WindowSet& set, std::size_t k,
                               std::uint64_t seed) {
  if (k < 2) throw ContractError("k-fold needs k >= 2");
  const Units units = make_units(set, SplitGranularity::window);
  auto by_class = units_by_class(units, set.class_names.size());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold_of(set.size());
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    if (members.size() < k) {
      throw SplitError("class '" + set.class_names[c] + "' has " +
                       std::to_string(members.size()) + " windows, fewer than k = " +
                       std::to_string(k));
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) fold_of[members[i]] = i % k;
  }
  std::vector<SplitResult> folds;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    for (std::size_t i = 0; i < set.size(); ++i) {
      (fold_of[i] == f ? val_idx : train_idx).push_back(i);
    }
    folds.push_back({gather(set, std::move(train_idx)), gather(set, std::move(val_idx))});
  }
  return folds;
}

}  // namespace detect::data

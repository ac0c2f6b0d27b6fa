#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "detect/data/types.hpp"

namespace detect::data {

struct SplitResult {
  WindowSet train;
  WindowSet val;
};

/// `window` splits individual windows (overlapping windows of one trial can
/// land on both sides); `trial` keeps every window of a recording together.
enum class SplitGranularity { window, trial };

/// Per-class split: round(train_frac * n_c) units of each class go to
/// train (clamped so both sides get at least one), chosen by a seeded
/// shuffle. Both halves keep the input order. Throws SplitError naming the
/// class when it has fewer than 2 units.
SplitResult stratified_split(const WindowSet& set, double train_frac,
                             std::uint64_t seed,
                             SplitGranularity granularity = SplitGranularity::window);

/// Stratified k-fold partition: each class is shuffled and dealt round-robin
/// into k folds. Element i is (everything else, fold i).
std::vector<SplitResult> kfold(const WindowSet& set, std::size_t k,
                               std::uint64_t seed);

}  // namespace detect::data

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "detect/core/errors.hpp"
#include "detect/data/split.hpp"
#include "fixtures.hpp"

namespace detect::data {
namespace {

std::set<std::string> keys(const WindowSet& s) {
  std::set<std::string> out;
  for (const auto& w : s.windows) out.insert(w.source.key());
  return out;
}

WindowSet uneven_set(std::size_t a, std::size_t b, std::size_t c) {
  auto set = testing::random_window_set(std::max({a, b, c}), 5, 4);
  std::vector<std::size_t> seen(3, 0);
  const std::size_t limits[] = {a, b, c};
  std::erase_if(set.windows, [&](const Window& w) { return seen[w.label]++ >= limits[w.label]; });
  return set;
}

TEST(StratifiedSplit, EightyTwentyPerClass) {
  const auto set = testing::random_window_set(100, 1, 4);
  const auto split = stratified_split(set, 0.8, 42);
  const auto tr = class_counts(split.train);
  const auto va = class_counts(split.val);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(tr[c], 80u);
    EXPECT_EQ(va[c], 20u);
  }
}

TEST(StratifiedSplit, FiveWindowsGiveFourOne) {
  const auto split = stratified_split(uneven_set(5, 5, 5), 0.8, 42);
  EXPECT_EQ(class_counts(split.train)[0], 4u);
  EXPECT_EQ(class_counts(split.val)[0], 1u);
}

TEST(StratifiedSplit, CountsWithinOneOfRoundedTarget) {
  for (std::size_t n : {2u, 3u, 7u, 11u, 13u, 26u}) {
    const auto split = stratified_split(uneven_set(n, n + 1, n + 2), 0.8, 3);
    const auto tr = class_counts(split.train);
    for (std::size_t c = 0; c < 3; ++c) {
      const double target = std::round(0.8 * static_cast<double>(n + c));
      EXPECT_LE(std::abs(static_cast<double>(tr[c]) - target), 1.0);
      EXPECT_GE(class_counts(split.val)[c], 1u);
    }
  }
}

TEST(StratifiedSplit, DeterministicAndDisjoint) {
  const auto set = testing::random_window_set(40, 2, 4);
  const auto a = stratified_split(set, 0.8, 42);
  const auto b = stratified_split(set, 0.8, 42);
  const auto c = stratified_split(set, 0.8, 43);
  EXPECT_EQ(keys(a.train), keys(b.train));
  EXPECT_NE(keys(a.train), keys(c.train));
  EXPECT_EQ(class_counts(a.train), class_counts(c.train));
  const auto tr = keys(a.train);
  for (const auto& k : keys(a.val)) EXPECT_EQ(tr.count(k), 0u);
  EXPECT_EQ(a.train.size() + a.val.size(), set.size());
}

TEST(StratifiedSplit, TinyClassNamesTheClass) {
  try {
    stratified_split(uneven_set(5, 1, 5), 0.8, 1);
    FAIL() << "expected SplitError";
  } catch (const SplitError& e) {
    EXPECT_NE(std::string(e.what()).find("walk"), std::string::npos) << e.what();
  }
}

TEST(StratifiedSplit, TrialGranularityKeepsRecordingsTogether) {
  const auto set = testing::random_window_set(60, 4, 4);
  const auto split = stratified_split(set, 0.8, 42, SplitGranularity::trial);
  std::set<std::string> train_trials;
  for (const auto& w : split.train.windows) train_trials.insert(w.source.trial_key());
  for (const auto& w : split.val.windows) {
    EXPECT_EQ(train_trials.count(w.source.trial_key()), 0u) << w.source.trial_key();
  }
  EXPECT_FALSE(split.val.empty());
}

TEST(KFold, FiftyPerClassFiveFolds) {
  const auto set = testing::random_window_set(50, 7, 4);
  const auto folds = kfold(set, 5, 42);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) {
    for (auto n : class_counts(f.val)) EXPECT_EQ(n, 10u);
    for (auto n : class_counts(f.train)) EXPECT_EQ(n, 40u);
  }
}

TEST(KFold, ValidationFoldsPartitionTheSet) {
  const auto set = uneven_set(23, 17, 31);
  const auto folds = kfold(set, 5, 9);
  std::set<std::string> all;
  std::size_t total = 0;
  for (const auto& f : folds) {
    const auto v = keys(f.val);
    for (const auto& k : v) EXPECT_TRUE(all.insert(k).second) << "duplicate " << k;
    total += v.size();
    const auto t = keys(f.train);
    for (const auto& k : v) EXPECT_EQ(t.count(k), 0u);
    EXPECT_EQ(t.size() + v.size(), set.size());
  }
  EXPECT_EQ(total, set.size());
  EXPECT_EQ(all, keys(set));
}

TEST(KFold, PerFoldClassCountsDifferByAtMostOne) {
  const auto set = uneven_set(23, 17, 31);
  const auto folds = kfold(set, 5, 9);
  const auto global = class_counts(set);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& f : folds) {
      const auto n = class_counts(f.val)[c];
      lo = std::min(lo, n);
      hi = std::max(hi, n);
      // Within one window of the global proportion.
      const double expected = static_cast<double>(global[c]) / 5.0;
      EXPECT_LE(std::abs(static_cast<double>(n) - expected), 1.0);
    }
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(KFold, ClassSmallerThanKIsError) {
  EXPECT_THROW(kfold(uneven_set(10, 4, 10), 5, 1), SplitError);
}

}  // namespace
}  // namespace detect::data

#include "detect/data/window_cache.hpp"

#include <fstream>

#include "detect/core/binary_io.hpp"

namespace detect::data {

namespace bin = core::binary;

namespace {
constexpr char kMagic[9] = "DTWINSET";
}

void write_window_set(const WindowSet& set, std::ostream& out) {
  set.validate();
  out.write(kMagic, 8);
  bin::write_pod<std::uint32_t>(out, kWindowCacheVersion);
  bin::write_pod<std::uint64_t>(out, set.class_names.size());
  for (const auto& n : set.class_names) bin::write_string(out, n);
  bin::write_pod<std::uint64_t>(out, set.window_length);
  bin::write_pod<std::uint8_t>(out, set.normalized ? 1 : 0);
  bin::write_pod<std::uint8_t>(out, set.norm_stats ? 1 : 0);
  if (set.norm_stats) {
    bin::write_doubles(out, set.norm_stats->mean.data(), kChannels);
    bin::write_doubles(out, set.norm_stats->stddev.data(), kChannels);
  }
  bin::write_pod<std::uint64_t>(out, set.windows.size());
  for (const auto& w : set.windows) {
    bin::write_pod<std::uint64_t>(out, w.label);
    bin::write_string(out, w.source.patient_id);
    bin::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(w.source.phase));
    bin::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(w.source.activity));
    bin::write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(w.source.placement));
    bin::write_pod<std::int32_t>(out, w.source.trial);
    bin::write_pod<std::uint64_t>(out, w.source.start_index);
    bin::write_doubles(out, w.values.data(), w.values.size());
  }
}

WindowSet read_window_set(std::istream& in) {
  bin::expect_magic(in, kMagic, "window cache");
  const auto version = bin::read_pod<std::uint32_t>(in);
  if (version != kWindowCacheVersion) {
    throw IoError("unsupported window cache version " + std::to_string(version));
  }
  WindowSet set;
  set.class_names.clear();
  const auto n_classes = bin::read_pod<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_classes; ++i) set.class_names.push_back(bin::read_string(in));
  set.window_length = bin::read_pod<std::uint64_t>(in);
  set.normalized = bin::read_pod<std::uint8_t>(in) != 0;
  if (bin::read_pod<std::uint8_t>(in) != 0) {
    NormStats stats;
    bin::read_doubles(in, stats.mean.data(), kChannels);
    bin::read_doubles(in, stats.stddev.data(), kChannels);
    set.norm_stats = stats;
  }
  const auto count = bin::read_pod<std::uint64_t>(in);
  set.windows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Window w;
    w.label = bin::read_pod<std::uint64_t>(in);
    w.source.patient_id = bin::read_string(in);
    w.source.phase = static_cast<Phase>(bin::read_pod<std::uint8_t>(in));
    w.source.activity = static_cast<Activity>(bin::read_pod<std::uint8_t>(in));
    w.source.placement = static_cast<Placement>(bin::read_pod<std::uint8_t>(in));
    w.source.trial = bin::read_pod<std::int32_t>(in);
    w.source.start_index = bin::read_pod<std::uint64_t>(in);
    w.values.resize(set.window_length * kChannels);
    bin::read_doubles(in, w.values.data(), w.values.size());
    set.windows.push_back(std::move(w));
  }
  set.validate();
  return set;
}

void save_window_set(const WindowSet& set, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  write_window_set(set, out);
  if (!out) throw IoError("write failed for " + file.string());
}

WindowSet load_window_set(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  return read_window_set(in);
}

}  // namespace detect::data

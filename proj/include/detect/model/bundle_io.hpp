#pragma once

#include <filesystem>
#include <iosfwd>

#include "detect/model/transformer.hpp"

namespace detect::model {

/// Bundle file layout (host byte order, which is little-endian on every
/// supported target):
///
///   "DTBUNDLE"  u32 version
///   string      model config as `key=value` lines
///   u64 + strings          class names
///   u8 [+ 12 f64]          norm stats present, then 6 means and 6 stds
///   u64 + strings          hold-out window keys
///   u64 parameter count, then per parameter:
///       string name, u64 rank, rank x u64 extents, raw f64 values
///
/// Doubles are stored bit-for-bit, so save/load is exact.
inline constexpr std::uint32_t kBundleVersion = 1;

void write_bundle(const ClassifierBundle& bundle, std::ostream& out);
ClassifierBundle read_bundle(std::istream& in);

void save_bundle(const ClassifierBundle& bundle, const std::filesystem::path& file);
ClassifierBundle load_bundle(const std::filesystem::path& file);

}  // namespace detect::model

#pragma once

#include <filesystem>
#include <iosfwd>

#include "detect/data/types.hpp"

namespace detect::data {

/// Binary window-set cache: magic "DTWINSET", u32 version, then class
/// names, window length, normalization state and every window with its
/// source identity. Values are stored as raw doubles, so loading is
/// bit-exact.
inline constexpr std::uint32_t kWindowCacheVersion = 1;

void write_window_set(const WindowSet& set, std::ostream& out);
WindowSet read_window_set(std::istream& in);

void save_window_set(const WindowSet& set, const std::filesystem::path& file);
WindowSet load_window_set(const std::filesystem::path& file);

}  // namespace detect::data

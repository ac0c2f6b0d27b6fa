#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "detect/data/types.hpp"

namespace detect::data {

/// Maps public-dataset activity folder names onto the three-class label
/// set. Leading "<n>." numbering and case are ignored; "sit" -> sit,
/// "walk"/"walking" -> walk, "stair-up"/"upstairs"/"stairs"/"stair-down"/
/// "downstairs"/"walking_upstairs"/"walking_downstairs" -> stairs. Anything
/// else is not part of the 3-class subset.
std::optional<Activity> benchmark_activity(std::string_view folder_name);

/// Loads a public benchmark laid out as one sub-directory per activity with
/// one numeric CSV per trial. Accepted row layouts: 7 columns
/// (t, ax, ay, az, gx, gy, gz) or 8 columns as in KU-HAR's raw export
/// (t_acc, ax, ay, az, t_gyro, gx, gy, gz). A non-numeric first line is
/// treated as a header. The subject id is the file-name prefix before the
/// first '_'. All recordings are tagged phase=pre.
std::vector<SensorRecording> load_benchmark_directory(const std::filesystem::path& root,
                                                      double rate_hz);

}  // namespace detect::data

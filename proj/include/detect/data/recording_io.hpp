#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "detect/data/types.hpp"

namespace detect::data {

/// Recording CSV layout (UTF-8, '.' decimal separator, LF line endings):
///
///   patient_id,phase,activity,placement,rate_hz
///   12345,pre,walk,nondominant_hand,100
///   t,ax,ay,az,gx,gy,gz
///   0.00,0.012,...            one row per sample
///
/// The trial index is taken from the trailing `_<n>` of the file stem
/// (`{patient}_{phase}_{activity}_{placement}_{trial}.csv`), 0 otherwise.
inline constexpr const char* kRecordingMetaHeader =
    "patient_id,phase,activity,placement,rate_hz";
inline constexpr const char* kRecordingSampleHeader = "t,ax,ay,az,gx,gy,gz";

SensorRecording read_recording_csv(const std::filesystem::path& file);
void write_recording_csv(const SensorRecording& rec,
                         const std::filesystem::path& file);
std::string recording_file_name(const SensorRecording& rec);

/// Loads one file, or every `*.csv` in a directory except `nrs.csv`, in
/// file-name order. Errors carry the file and line number.
std::vector<SensorRecording> load_recordings(const std::filesystem::path& path);

}  // namespace detect::data

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "detect/data/types.hpp"

namespace detect::sim {

/// One synthetic patient. NRS scores are inputs and are not derived from
/// `effect_size`, so cohorts can contain NRS/behaviour disagreements.
struct PatientProfile {
  std::string patient_id;
  int nrs_pre = 0;
  int nrs_post = 0;
  double effect_size = 0.0;     // 0 means post is distributed exactly as pre
  double gait_freq_hz = 1.0;    // walking cadence (one stride cycle per period)
  double noise_sigma = 0.3;     // accelerometer noise, m/s^2
  std::uint64_t seed = 0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct CohortSpec {
  std::vector<PatientProfile> profiles;
  std::vector<data::Activity> activities{data::kAllActivities.begin(),
                                         data::kAllActivities.end()};
  std::vector<data::Placement> placements{data::kAllPlacements.begin(),
                                          data::kAllPlacements.end()};
  int trials_per_condition = 2;
  double trial_duration_s = 30.0;
  double rate_hz = 100.0;

  void validate() const;
  std::size_t file_count() const;
};

/// Generator constants. None of them comes from measured data; they are
/// chosen so that the three activities are separable and so that
/// `effect_size` moves post-treatment walking toward the stairs pattern.
struct SignalConstants {
  double stairs_cadence_ratio = 0.7;   // stairs cadence / walk cadence
  double cadence_shift_per_effect = 0.14; // post cadence *= 1 - k * effect
  double amplitude_exponent = 1.5;     // vertical amplitude ~ (1 Hz / f)^p
  double vertical_amplitude = 2.0;     // m/s^2 at 1 Hz
  double angular_amplitude = 1.0;      // rad/s at 1 Hz
  double cycle_jitter = 0.15;          // relative per-cycle amplitude std
  double cadence_jitter = 0.02;        // relative per-trial cadence std
  double gyro_noise_ratio = 0.1;       // gyro noise / accel noise
  double sit_noise_ratio = 0.05;       // sit noise / walk noise
  double pocket_noise_ratio = 1.5;     // extra noise factor in the pocket
};

/// Pure function of (profile, phase, activity, placement, trial_index,
/// duration, rate). The random stream is seeded from the profile seed and
/// the file identity only, so changing `effect_size` reuses the same draws.
data::SensorRecording generate_recording(const PatientProfile& profile,
                                         data::Phase phase,
                                         data::Activity activity,
                                         data::Placement placement,
                                         int trial_index,
                                         double duration_s = 30.0,
                                         double rate_hz = 100.0,
                                         const SignalConstants& constants = {});

struct ManifestEntry {
  std::string file;      // name relative to the output directory
  std::uint64_t fnv1a;   // hash of the file bytes
  std::size_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;  // recordings in generation order, then nrs.csv
  /// Hash over every entry line; equal manifests give equal digests.
  std::uint64_t digest() const;
  std::string to_text() const;
};

inline constexpr const char* kManifestFile = "manifest.txt";

/// Writes every recording, `nrs.csv` and `manifest.txt` into `out`
/// (created if missing). Throws IoError naming the path on failure.
Manifest generate_cohort(const CohortSpec& spec, const std::filesystem::path& out,
                         const SignalConstants& constants = {});

/// Eight patients whose NRS pairs follow the reference pilot cohort; the
/// effect sizes make four NRS responders behaviourally changed, one NRS
/// responder unchanged and the non-responders unchanged or mildly changed.
CohortSpec default_cohort_spec(std::uint64_t seed = 42);

/// Cohort spec text format, one setting per line, '#' starts a comment:
///
///   seed = 42
///   trials_per_condition = 2
///   trial_duration_s = 30
///   rate_hz = 100
///   patient = <id>,<nrs_pre>,<nrs_post>,<effect>[,<gait_hz>[,<noise>[,<seed>]]]
///
/// Omitted per-patient values default to 1.0 Hz, 0.3 and a seed derived from
/// the cohort seed and the patient id. Errors are ConfigError with the line.
CohortSpec parse_cohort_spec(const std::string& text);
CohortSpec load_cohort_spec(const std::filesystem::path& file);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace detect::sim

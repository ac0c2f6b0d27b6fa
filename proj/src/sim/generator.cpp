#include "detect/sim/generator.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "detect/core/errors.hpp"
#include "detect/data/nrs_io.hpp"
#include "detect/data/recording_io.hpp"
#include "detect/data/text.hpp"

namespace detect::sim {
namespace {

constexpr double kGravity = 9.81;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

Vec3 rotate(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Phone upright in a front pocket: tilted 75 degrees about x, turned 30
// degrees about z relative to the hand-held frame.
const Mat3& pocket_rotation() {
  static const Mat3 r = [] {
    const double ax = -75.0 * std::numbers::pi / 180.0;
    const double az = 30.0 * std::numbers::pi / 180.0;
    const Mat3 rx{{{1, 0, 0},
                   {0, std::cos(ax), -std::sin(ax)},
                   {0, std::sin(ax), std::cos(ax)}}};
    const Mat3 rz{{{std::cos(az), -std::sin(az), 0},
                   {std::sin(az), std::cos(az), 0},
                   {0, 0, 1}}};
    return multiply(rz, rx);
  }();
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t file_seed(std::uint64_t profile_seed, data::Phase phase,
                        data::Activity activity, data::Placement placement,
                        int trial) {
  std::string identity = std::to_string(profile_seed);
  identity += '|';
  identity += data::to_string(phase);
  identity += '|';
  identity += data::to_string(activity);
  identity += '|';
  identity += data::to_string(placement);
  identity += '|';
  identity += std::to_string(trial);
  return splitmix64(fnv1a64(identity));
}

std::string read_file_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read back " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = kDigits[v & 0xf];
  return s;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void PatientProfile::validate() const {
  const std::string who = "patient '" + patient_id + "': ";
  if (patient_id.empty()) throw ConfigError("patient id must not be empty");
  if (patient_id.find_first_of(",_/\\ \t") != std::string::npos) {
    throw ConfigError(who + "id must not contain ',', '_', '/', '\\' or spaces");
  }
  if (nrs_pre < 0 || nrs_pre > 10 || nrs_post < 0 || nrs_post > 10) {
    throw ConfigError(who + "NRS values must be in [0, 10]");
  }
  if (!(effect_size >= 0.0) || !std::isfinite(effect_size)) {
    throw ConfigError(who + "effect_size must be a finite value >= 0");
  }
  if (!(gait_freq_hz > 0.0) || !std::isfinite(gait_freq_hz)) {
    throw ConfigError(who + "gait_freq_hz must be positive");
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError(who + "noise_sigma must be positive");
  }
}

void CohortSpec::validate() const {
  if (profiles.empty()) throw ConfigError("cohort has no patients");
  if (activities.empty()) throw ConfigError("cohort has no activities");
  if (placements.empty()) throw ConfigError("cohort has no placements");
  if (trials_per_condition < 1) throw ConfigError("trials_per_condition must be >= 1");
  if (!(trial_duration_s > 5.0)) {
    throw ConfigError("trial_duration_s must exceed 5 s to survive trimming");
  }
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw ConfigError("rate_hz must be positive");
  std::vector<std::string> ids;
  for (const auto& p : profiles) {
    p.validate();
    for (const auto& id : ids) {
      if (id == p.patient_id) throw ConfigError("duplicate patient '" + id + "'");
    }
    ids.push_back(p.patient_id);
  }
}

std::size_t CohortSpec::file_count() const {
  return profiles.size() * data::kAllPhases.size() * activities.size() *
         placements.size() * static_cast<std::size_t>(trials_per_condition);
}

data::SensorRecording generate_recording(const PatientProfile& profile,
                                         data::Phase phase,
                                         data::Activity activity,
                                         data::Placement placement,
                                         int trial_index, double duration_s,
                                         double rate_hz,
                                         const SignalConstants& k) {
  profile.validate();
  if (!(duration_s > 0.0) || !(rate_hz > 0.0)) {
    throw ConfigError("duration and rate must be positive");
  }
  const double effect = phase == data::Phase::post ? profile.effect_size : 0.0;
  const std::uint64_t seed =
      file_seed(profile.seed, phase, activity, placement, trial_index);
  // Two streams: one for per-trial and per-cycle draws, one for sample
  // noise. Neither draw count depends on the effect size.
  std::mt19937_64 cycle_rng(seed);
  std::mt19937_64 noise_rng(splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);

  const double trial_cadence_z = normal(cycle_rng);
  const double phase0 = uniform(cycle_rng);

  double cadence = profile.gait_freq_hz * (1.0 - k.cadence_shift_per_effect * effect);
  if (activity == data::Activity::stairs) cadence *= k.stairs_cadence_ratio;
  cadence *= 1.0 + k.cadence_jitter * trial_cadence_z;
  cadence = std::max(cadence, 0.05);

  const double amp_scale = std::pow(1.0 / cadence, k.amplitude_exponent);
  const double jitter = k.cycle_jitter / (1.0 + effect);

  double accel_sigma = profile.noise_sigma / (1.0 + effect);
  if (activity == data::Activity::sit) accel_sigma *= k.sit_noise_ratio;
  if (placement == data::Placement::pant_pocket) accel_sigma *= k.pocket_noise_ratio;
  const double gyro_sigma = accel_sigma * k.gyro_noise_ratio;

  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const bool moving = activity != data::Activity::sit;

  // Per-cycle amplitude multipliers, linearly interpolated over the cycle.
  std::vector<double> cycle_gain;
  if (moving) {
    const auto cycles =
        static_cast<std::size_t>(std::ceil(cadence * duration_s)) + 2;
    cycle_gain.resize(cycles);
    for (double& g : cycle_gain) g = normal(cycle_rng);
    for (double& g : cycle_gain) g = 1.0 + jitter * g;
  }

  data::SensorRecording rec;
  rec.patient_id = profile.patient_id;
  rec.phase = phase;
  rec.activity = activity;
  rec.placement = placement;
  rec.sample_rate_hz = rate_hz;
  rec.trial = trial_index;
  rec.timestamps.resize(n);
  rec.samples.resize(n);

  const double a_amp = k.vertical_amplitude;
  const double w_amp = k.angular_amplitude;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    rec.timestamps[i] = t;
    Vec3 acc{0.0, 0.0, kGravity};
    Vec3 gyr{0.0, 0.0, 0.0};
    if (moving) {
      const double cycle_pos = cadence * t;
      const auto c = static_cast<std::size_t>(cycle_pos);
      const double frac = cycle_pos - static_cast<double>(c);
      const double gain =
          (1.0 - frac) * cycle_gain[c] + frac * cycle_gain[c + 1];
      const double s = amp_scale * gain;
      const double p = kTwoPi * cycle_pos + phase0;
      const double s1 = std::sin(p);
      const double s2 = std::sin(2.0 * p);
      acc[0] += a_amp * s * (0.5 * s1 + 0.2 * std::sin(2.0 * p + 0.3));
      acc[1] += a_amp * s * (0.2 * std::sin(p + 1.0) + 0.1 * s2);
      acc[2] += a_amp * s * (0.3 * s1 + 1.0 * std::sin(2.0 * p + 0.7));
      gyr[0] = w_amp * s * (0.8 * std::sin(p + 0.4) + 0.2 * s2);
      gyr[1] = w_amp * s * (0.4 * std::sin(p + 1.2) + 0.1 * std::sin(2.0 * p + 0.5));
      gyr[2] = w_amp * s * (0.3 * s1 + 0.15 * s2);
    }
    if (placement == data::Placement::pant_pocket) {
      acc = rotate(pocket_rotation(), acc);
      gyr = rotate(pocket_rotation(), gyr);
    }
    auto& out = rec.samples[i];
    for (int c = 0; c < 3; ++c) out[c] = acc[c] + accel_sigma * normal(noise_rng);
    for (int c = 0; c < 3; ++c) out[3 + c] = gyr[c] + gyro_sigma * normal(noise_rng);
  }
  return rec;
}

std::uint64_t Manifest::digest() const { return fnv1a64(to_text()); }

std::string Manifest::to_text() const {
  std::string text;
  for (const auto& e : entries) {
    text += hex64(e.fnv1a);
    text += ' ';
    text += std::to_string(e.bytes);
    text += ' ';
    text += e.file;
    text += '\n';
  }
  return text;
}

Manifest generate_cohort(const CohortSpec& spec, const std::filesystem::path& out,
                         const SignalConstants& constants) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out)) {
    throw IoError("cannot create output directory " + out.string());
  }
  Manifest manifest;
  auto record = [&](const std::filesystem::path& file) {
    const std::string bytes = read_file_bytes(file);
    manifest.entries.push_back(
        {file.filename().string(), fnv1a64(bytes), bytes.size()});
  };
  for (const auto& profile : spec.profiles) {
    for (const auto phase : data::kAllPhases) {
      for (const auto activity : spec.activities) {
        for (const auto placement : spec.placements) {
          for (int trial = 0; trial < spec.trials_per_condition; ++trial) {
            const auto rec =
                generate_recording(profile, phase, activity, placement, trial,
                                   spec.trial_duration_s, spec.rate_hz, constants);
            const auto file = out / data::recording_file_name(rec);
            data::write_recording_csv(rec, file);
            record(file);
          }
        }
      }
    }
  }
  std::vector<data::NrsEntry> nrs;
  for (const auto& p : spec.profiles) nrs.push_back({p.patient_id, p.nrs_pre, p.nrs_post});
  const auto nrs_file = out / "nrs.csv";
  data::write_nrs_table(nrs, nrs_file);
  record(nrs_file);

  const auto manifest_file = out / kManifestFile;
  std::ofstream mf(manifest_file, std::ios::binary);
  mf << manifest.to_text();
  if (!mf) throw IoError("cannot write " + manifest_file.string());
  return manifest;
}

namespace {

std::uint64_t derived_patient_seed(std::uint64_t cohort_seed, const std::string& id) {
  return splitmix64(cohort_seed ^ fnv1a64(id));
}

}  // namespace

CohortSpec default_cohort_spec(std::uint64_t seed) {
  struct Row {
    const char* id;
    int pre, post;
    double effect, gait_hz;
  };
  static constexpr Row kRows[] = {
      {"12345", 5, 1, 2.0, 1.00}, {"21000", 6, 2, 2.0, 0.97},
      {"31000", 5, 5, 0.0, 1.03}, {"41000", 7, 4, 2.0, 0.96},
      {"51000", 3, 2, 0.5, 1.02}, {"61000", 5, 3, 2.0, 1.04},
      {"71000", 2, 0, 0.0, 0.98}, {"91000", 4, 3, 1.0, 1.01},
  };
  CohortSpec spec;
  for (const auto& r : kRows) {
    PatientProfile p;
    p.patient_id = r.id;
    p.nrs_pre = r.pre;
    p.nrs_post = r.post;
    p.effect_size = r.effect;
    p.gait_freq_hz = r.gait_hz;
    p.noise_sigma = 0.3;
    p.seed = derived_patient_seed(seed, p.patient_id);
    spec.profiles.push_back(std::move(p));
  }
  return spec;
}

CohortSpec parse_cohort_spec(const std::string& text) {
  CohortSpec spec;
  std::uint64_t cohort_seed = 42;
  struct Pending {
    PatientProfile profile;
    bool has_seed = false;
  };
  std::vector<Pending> pending;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) {
    throw ConfigError("cohort spec line " + std::to_string(line_no) + ": " + message);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = data::trim_space(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const auto key = data::trim_space(line.substr(0, eq));
    const auto value = data::trim_space(line.substr(eq + 1));
    auto as_int = [&](std::string_view v) {
      const auto parsed = data::parse_int(v);
      if (!parsed) fail("'" + std::string(v) + "' is not an integer");
      return *parsed;
    };
    auto as_real = [&](std::string_view v) {
      const auto parsed = data::parse_double(v);
      if (!parsed) fail("'" + std::string(v) + "' is not a number");
      return *parsed;
    };
    if (key == "seed") {
      const auto s = as_int(value);
      if (s < 0) fail("seed must be >= 0");
      cohort_seed = static_cast<std::uint64_t>(s);
    } else if (key == "trials_per_condition") {
      spec.trials_per_condition = static_cast<int>(as_int(value));
    } else if (key == "trial_duration_s") {
      spec.trial_duration_s = as_real(value);
    } else if (key == "rate_hz") {
      spec.rate_hz = as_real(value);
    } else if (key == "patient") {
      const auto fields = data::split_fields(value);
      if (fields.size() < 4 || fields.size() > 7) {
        fail("patient needs 4 to 7 comma-separated fields");
      }
      Pending p;
      p.profile.patient_id = std::string(data::trim_space(fields[0]));
      p.profile.nrs_pre = static_cast<int>(as_int(data::trim_space(fields[1])));
      p.profile.nrs_post = static_cast<int>(as_int(data::trim_space(fields[2])));
      p.profile.effect_size = as_real(data::trim_space(fields[3]));
      if (fields.size() > 4) p.profile.gait_freq_hz = as_real(data::trim_space(fields[4]));
      if (fields.size() > 5) p.profile.noise_sigma = as_real(data::trim_space(fields[5]));
      if (fields.size() > 6) {
        const auto s = as_int(data::trim_space(fields[6]));
        if (s < 0) fail("seed must be >= 0");
        p.profile.seed = static_cast<std::uint64_t>(s);
        p.has_seed = true;
      }
      try {
        p.profile.validate();
      } catch (const ConfigError& e) {
        fail(e.what());
      }
      pending.push_back(std::move(p));
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }
  for (auto& p : pending) {
    if (!p.has_seed) p.profile.seed = derived_patient_seed(cohort_seed, p.profile.patient_id);
    spec.profiles.push_back(std::move(p.profile));
  }
  spec.validate();
  return spec;
}

CohortSpec load_cohort_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open cohort spec " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_cohort_spec(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

}  // namespace detect::sim

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace detect::data {

struct NrsEntry {
  std::string patient_id;
  int nrs_pre = 0;
  int nrs_post = 0;
};

inline constexpr const char* kNrsHeader = "patient_id,nrs_pre,nrs_post";

/// Reads `nrs.csv`. Values must be integers in [0, 10]; duplicate patients
/// are rejected.
std::vector<NrsEntry> read_nrs_table(const std::filesystem::path& file);
void write_nrs_table(const std::vector<NrsEntry>& entries,
                     const std::filesystem::path& file);

}  // namespace detect::data

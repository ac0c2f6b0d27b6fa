#include "detect/data/nrs_io.hpp"

#include <fstream>
#include <set>

#include "detect/core/errors.hpp"
#include "detect/data/text.hpp"

namespace detect::data {

std::vector<NrsEntry> read_nrs_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open " + file.string());
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& message) {
    throw IngestionError(file.string() + ":" + std::to_string(line_no) + ": " + message);
  };
  if (!std::getline(in, line)) fail("empty NRS file");
  ++line_no;
  if (trim_space(line) != kNrsHeader) fail(std::string("expected header '") + kNrsHeader + "'");

  std::vector<NrsEntry> entries;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_space(line).empty()) continue;
    const auto fields = split_fields(trim_space(line));
    if (fields.size() != 3) fail("expected 3 columns");
    NrsEntry e;
    e.patient_id = std::string(trim_space(fields[0]));
    if (e.patient_id.empty()) fail("empty patient_id");
    const auto pre = parse_int(fields[1]);
    const auto post = parse_int(fields[2]);
    if (!pre || !post || *pre < 0 || *pre > 10 || *post < 0 || *post > 10) {
      fail("NRS values must be integers in [0, 10]");
    }
    if (!seen.insert(e.patient_id).second) fail("duplicate patient '" + e.patient_id + "'");
    e.nrs_pre = static_cast<int>(*pre);
    e.nrs_post = static_cast<int>(*post);
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_nrs_table(const std::vector<NrsEntry>& entries,
                     const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << kNrsHeader << '\n';
  for (const auto& e : entries) {
    out << e.patient_id << ',' << e.nrs_pre << ',' << e.nrs_post << '\n';
  }
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace detect::data

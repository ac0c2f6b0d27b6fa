#include "detect/data/text.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace detect::data {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view trim_space(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim_space(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim_space(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  // Shortest fixed-notation digits that round-trip, e.g. "4.625".
  std::array<char, 400> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                       std::chars_format::fixed);
  if (ec != std::errc()) return "nan";
  std::string digits(buf.data(), ptr);
  const bool negative = digits.front() == '-';
  if (negative) digits.erase(digits.begin());
  auto dot = digits.find('.');
  if (dot == std::string::npos) {
    dot = digits.size();
    digits += '.';
  }
  std::string frac = digits.substr(dot + 1);
  std::string whole = digits.substr(0, dot);
  const auto keep = static_cast<std::size_t>(std::max(decimals, 0));
  bool round_up = frac.size() > keep && frac[keep] >= '5';
  frac.resize(keep, '0');
  std::string number = whole + frac;  // all digits, decimal point implied
  if (round_up) {
    int i = static_cast<int>(number.size()) - 1;
    for (; i >= 0; --i) {
      if (number[i] == '9') {
        number[i] = '0';
      } else {
        ++number[i];
        break;
      }
    }
    if (i < 0) number.insert(number.begin(), '1');
  }
  std::string out = number.substr(0, number.size() - keep);
  if (keep > 0) out += "." + number.substr(number.size() - keep);
  if (negative && out.find_first_not_of("0.") != std::string::npos) out.insert(out.begin(), '-');
  return out;
}

std::string format_exact(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace detect::data

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace detect::data {

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');
std::string_view trim_space(std::string_view text);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Fixed-point rendering independent of the C locale. The shortest
/// round-trip decimal of `value` is rounded half away from zero, so 4.625
/// gives "4.63" and 8.679999999999993 gives "8.68". Never yields "-0.00".
std::string format_fixed(double value, int decimals);
/// Shortest decimal that round-trips to the same double.
std::string format_exact(double value);

}  // namespace detect::data

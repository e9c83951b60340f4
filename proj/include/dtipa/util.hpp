#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtipa {

// Trims spaces, tabs, CR and LF from both ends.
std::string_view trim(std::string_view s);

// Splits one CSV line on commas and trims each field. No quoting support:
// survey and judgment files carry plain labels and numbers.
std::vector<std::string> split_csv_line(std::string_view line);

std::optional<int> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// FNV-1a 64-bit digest; used to fingerprint report inputs.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Locale-independent fixed-precision formatting.
std::string format_fixed(double value, int decimals);

// Round half away from zero to the given number of decimals.
double round_to(double value, int decimals);

} // namespace dtipa

#ifndef CSMCOVER_UTIL_HPP
#define CSMCOVER_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace csmcover {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// FNV-1a, 64 bit. Stable across platforms, used for config fingerprints.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

/// splitmix64 step; derives independent child seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace csmcover

#endif

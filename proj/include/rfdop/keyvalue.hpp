#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Flat `key = value` text files with `#` comments.
namespace rfdop::kv {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

// Throws ConfigError on lines that are neither blank, comment, nor `key = value`.
std::vector<Entry> parse(std::string_view text);
std::vector<Entry> parse_file(const std::filesystem::path& path);
// Throws ConfigError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

std::string_view trim(std::string_view s) noexcept;
std::string lower(std::string_view s);

// Value converters; `key` is used for the error message.
double to_double(std::string_view key, std::string_view value);
std::int64_t to_int(std::string_view key, std::string_view value);
std::uint64_t to_uint64(std::string_view key, std::string_view value);
bool to_bool(std::string_view key, std::string_view value);
// Comma- or whitespace-separated list of doubles.
std::vector<double> to_double_list(std::string_view key, std::string_view value);

}  // namespace rfdop::kv

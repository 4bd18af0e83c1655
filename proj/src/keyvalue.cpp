#include "rfdop/keyvalue.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rfdop/error.hpp"

namespace rfdop::kv {

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<Entry> parse(std::string_view text) {
    std::vector<Entry> entries;
    int line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected `key = value`");
        }
        Entry e;
        e.key = lower(trim(line.substr(0, eq)));
        e.value = std::string(trim(line.substr(eq + 1)));
        e.line = line_no;
        if (e.key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Entry> parse_file(const std::filesystem::path& path) { return parse(read_file(path)); }

double to_double(std::string_view key, std::string_view value) {
    const std::string s(trim(value));
    if (s.empty()) throw ConfigError(std::string(key), "empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw ConfigError(std::string(key), "not a number: '" + s + "'");
    }
    return v;
}

std::int64_t to_int(std::string_view key, std::string_view value) {
    const std::string s(trim(value));
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        // Allow integral values written in floating notation, e.g. 160e3.
        const double d = to_double(key, value);
        if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
            throw ConfigError(std::string(key), "not an integer: '" + s + "'");
        }
        return static_cast<std::int64_t>(d);
    }
    return v;
}

std::uint64_t to_uint64(std::string_view key, std::string_view value) {
    const std::string s(trim(value));
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
    if (s.empty() || s.front() == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
        throw ConfigError(std::string(key), "not an unsigned 64-bit integer: '" + s + "'");
    }
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    const std::string s = lower(trim(value));
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError(std::string(key), "not a boolean: '" + s + "'");
}

std::vector<double> to_double_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) out.push_back(to_double(key, token));
        token.clear();
    };
    for (char c : value) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            token.push_back(c);
        }
    }
    flush();
    if (out.empty()) throw ConfigError(std::string(key), "empty list");
    return out;
}

}  // namespace rfdop::kv

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>

namespace dupweight {

// Transparent string hashing so gram tables can be probed with a
// string_view built on the stack instead of a fresh std::string.
struct StringHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};
struct StringEq {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const {
    return a == b;
  }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, StringEq>;

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

// Shortest exact decimal for a double ("%.17g" trimmed): parses back to the
// same bits, and identical doubles always format to identical bytes, which
// the artifact-determinism contract relies on.
std::string format_double(double v);

std::string path_join(const std::string& dir, const std::string& name);
std::string basename_of(const std::string& path);

}  // namespace dupweight

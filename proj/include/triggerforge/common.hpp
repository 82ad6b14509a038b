#ifndef TRIGGERFORGE_COMMON_HPP_
#define TRIGGERFORGE_COMMON_HPP_

#include <cctype>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace triggerforge {

// Error taxonomy. The CLI maps ValidationError/ParseError/ConfigError to
// exit code 1 and everything else to 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct ValidationError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct LengthError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct IndexError : Error {
  using Error::Error;
};
struct TrainingError : Error {
  int step;
  TrainingError(const std::string& msg, int step_index)
      : Error(msg), step(step_index) {}
};

namespace log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

inline Level& threshold() {
  static Level level = [] {
    const char* env = std::getenv("TRIGGERFORGE_LOG");
    if (!env) return Level::kWarn;
    std::string v(env);
    if (v == "debug") return Level::kDebug;
    if (v == "info") return Level::kInfo;
    if (v == "warn" || v == "warning") return Level::kWarn;
    return Level::kError;
  }();
  return level;
}

inline void emit(Level level, const char* tag, const char* fmt, va_list ap) {
  if (level < threshold()) return;
  char buf[1024];
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  std::fprintf(stderr, "[%s] %s\n", tag, buf);
}

inline void debug(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  emit(Level::kDebug, "debug", fmt, ap);
  va_end(ap);
}
inline void info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  emit(Level::kInfo, "info", fmt, ap);
  va_end(ap);
}
inline void warn(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  emit(Level::kWarn, "warn", fmt, ap);
  va_end(ap);
}
inline void error(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  emit(Level::kError, "error", fmt, ap);
  va_end(ap);
}

}  // namespace log

// FNV-1a, used for config and checkpoint checksums embedded in output files.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(const std::string& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s.data(), s.size())));
  return std::string(buf);
}

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Whitespace-delimited word split; consecutive separators collapse.
inline std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string join_words(const std::vector<std::string>& words,
                              const std::string& sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string replace_all(std::string s, const std::string& from,
                               const std::string& to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

inline int count_occurrences(const std::string& s, const std::string& needle) {
  if (needle.empty()) return 0;
  int n = 0;
  std::size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

}  // namespace triggerforge

#endif  // TRIGGERFORGE_COMMON_HPP_

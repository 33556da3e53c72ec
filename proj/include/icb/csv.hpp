#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace icb {

/// FNV-1a 64-bit; used for the config-hash provenance comment.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

using CsvField = std::variant<std::string, double, long, int>;

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_format(const CsvField& f) {
  char buf[64];
  if (std::holds_alternative<std::string>(f)) {
    return csv_quote(std::get<std::string>(f));
  }
  if (std::holds_alternative<double>(f)) {
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(f));
    return buf;
  }
  if (std::holds_alternative<long>(f)) {
    std::snprintf(buf, sizeof(buf), "%ld", std::get<long>(f));
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%d", std::get<int>(f));
  return buf;
}

/// RFC-4180 CSV writer with a leading provenance comment carrying the
/// config hash, then a header row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& config_hash,
            const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# config_hash=" << config_hash << "\n";
    for (std::size_t k = 0; k < header.size(); ++k) {
      out_ << (k ? "," : "") << csv_quote(header[k]);
    }
    out_ << "\n";
  }

  void row(std::initializer_list<CsvField> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      first = false;
      out_ << csv_format(f);
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace icb

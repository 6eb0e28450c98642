#pragma once

// Plain-text `key = value` configuration files. `#` starts a comment; lines
// without `=` are kept verbatim for callers with record-style lines.

#include <string>
#include <utility>
#include <vector>

namespace hcps {

struct KeyValues {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::string> records;
};

KeyValues parse_key_values(const std::string& text);

double parse_double(const std::string& key, const std::string& value);
long long parse_int(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);

}  // namespace hcps

#include "hcps/config.hpp"

#include <sstream>

#include "hcps/error.hpp"

namespace hcps {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      kv.records.push_back(line);
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Parse, "missing key in line '" + line + "'");
    kv.entries.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return kv;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Parse, "'" + key + "' expects a number, got '" + value + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Parse, "'" + key + "' expects an integer, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::istringstream is(value);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw Error(ErrorKind::Parse, "'" + key + "' expects a comma-separated list");
  return out;
}

}  // namespace hcps

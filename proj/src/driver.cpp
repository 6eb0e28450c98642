#include "hcps/driver.hpp"

#include <cmath>
#include <sstream>

#include "hcps/config.hpp"
#include "hcps/error.hpp"

namespace hcps {

void DriverParams::validate() const {
  if (!(k1 > 0 && k2 > 0 && thw_follow > 0 && decision_epoch > 0))
    throw Error(ErrorKind::RejectedInput, "driver gains, thw_follow and decision_epoch must be positive");
  if (acc_set.empty()) throw Error(ErrorKind::RejectedInput, "acc_set must not be empty");
  bool has_zero = false;
  for (std::size_t i = 0; i < acc_set.size(); ++i) {
    if (i && !(acc_set[i - 1] < acc_set[i]))
      throw Error(ErrorKind::RejectedInput, "acc_set must be strictly increasing");
    has_zero |= acc_set[i] == 0.0;
  }
  if (!has_zero) throw Error(ErrorKind::RejectedInput, "acc_set must contain 0");
  if (thw_levels.empty()) throw Error(ErrorKind::RejectedInput, "need at least one thw boundary");
  for (std::size_t i = 0; i < thw_levels.size(); ++i) {
    if (!(thw_levels[i] > 0) || (i && !(thw_levels[i - 1] < thw_levels[i])))
      throw Error(ErrorKind::RejectedInput, "thw_levels must be positive and strictly increasing");
  }
}

double DriverParams::representative_thw(int level) const {
  if (level < 1 || level > num_levels())
    throw Error(ErrorKind::RejectedInput, "stimulus level " + std::to_string(level) + " out of range");
  const auto& b = thw_levels;
  const std::size_t i = static_cast<std::size_t>(level - 1);
  if (i == 0) return b[0] / 2.0;
  if (i == b.size()) {
    const double below = b.size() >= 2 ? b[i - 1] - b[i - 2] : b[0];
    return b[i - 1] + below / 2.0;
  }
  return (b[i - 1] + b[i]) / 2.0;
}

DriverParams parse_driver_params(const std::string& text) {
  DriverParams p;
  for (const auto& [key, value] : parse_key_values(text).entries) {
    if (key == "k1") p.k1 = parse_double(key, value);
    else if (key == "k2") p.k2 = parse_double(key, value);
    else if (key == "thw_follow") p.thw_follow = parse_double(key, value);
    else if (key == "decision_epoch") p.decision_epoch = parse_double(key, value);
    else if (key == "acc_set") p.acc_set = parse_double_list(key, value);
    else if (key == "thw_levels") p.thw_levels = parse_double_list(key, value);
    else throw Error(ErrorKind::Parse, "unknown driver parameter '" + key + "'");
  }
  p.validate();
  return p;
}

DriverParams load_driver_params(const std::string& path) {
  return parse_driver_params(load_text(path));
}

const char* to_string(Rule r) {
  switch (r) {
    case Rule::Attend: return "attend";
    case Rule::Read: return "read";
    case Rule::Encode: return "encode";
    case Rule::Retrieve: return "retrieve";
    case Rule::NoRetrieve: return "n_ret";
    case Rule::Decide: return "decide";
  }
  return "?";
}

std::vector<Rule> full_chain() {
  return {Rule::Attend, Rule::Read, Rule::Encode, Rule::Retrieve, Rule::Decide};
}

std::vector<Rule> short_chain() { return {Rule::Attend, Rule::Read, Rule::Encode, Rule::NoRetrieve}; }

bool Response::full_deliberation() const { return rule_chain == full_chain(); }

std::string format_acc(double acc) {
  if (acc == 0.0) return "0";  // no "-0"
  std::ostringstream os;
  os << acc;
  return os.str();
}

std::string encode_response(const Response& r) {
  std::string s;
  for (std::size_t i = 0; i < r.rule_chain.size(); ++i) {
    if (i) s += ',';
    s += to_string(r.rule_chain[i]);
  }
  return s + ':' + format_acc(r.acc);
}

std::optional<Response> decode_response(const std::string& symbol) {
  auto colon = symbol.rfind(':');
  if (colon == std::string::npos) return std::nullopt;
  Response r;
  const std::string chain = symbol.substr(0, colon);
  if (chain == "attend,read,encode,retrieve,decide") {
    r.rule_chain = full_chain();
  } else if (chain == "attend,read,encode,n_ret") {
    r.rule_chain = short_chain();
  } else {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const std::string num = symbol.substr(colon + 1);
    r.acc = std::stod(num, &used);
    if (used != num.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return r;
}

double nearest_admissible(double acc, const std::vector<double>& acc_set) {
  double best = acc_set.front();
  double best_dist = std::abs(acc - best);
  for (double a : acc_set) {
    const double d = std::abs(acc - a);
    constexpr double eps = 1e-9;
    if (d < best_dist - eps || (std::abs(d - best_dist) <= eps && std::abs(a) < std::abs(best))) {
      best = a;
      best_dist = d;
    }
  }
  return best;
}

double decide_acceleration(double thw, double prev_thw, double dt, const DriverParams& params,
                           double prev_acc) {
  if (!(dt > 0)) throw Error(ErrorKind::RejectedInput, "decision interval must be positive");
  const double delta = params.k1 * (thw - prev_thw) + params.k2 * (thw - params.thw_follow) * dt;
  return nearest_admissible(prev_acc + delta, params.acc_set);
}

std::string level_symbol(int level) { return std::to_string(level); }

Alphabet level_alphabet(int num_levels) {
  std::vector<Symbol> syms;
  for (int l = 1; l <= num_levels; ++l) syms.push_back(level_symbol(l));
  return Alphabet(std::move(syms));
}

DriverSul::DriverSul(DriverParams params)
    : params_(std::move(params)), inputs_(level_alphabet(params_.num_levels())) {
  params_.validate();
  reset();
}

void DriverSul::reset() { state_ = DriverState{std::nullopt, 0.0, params_.thw_follow}; }

Response DriverSul::query(int level) {
  if (level < 1 || level > params_.num_levels())
    throw Error(ErrorKind::RejectedInput, "stimulus level " + std::to_string(level) + " out of range");
  if (state_.last_level == level) return {short_chain(), state_.last_acc};
  const double thw = params_.representative_thw(level);
  const double acc =
      decide_acceleration(thw, state_.last_thw, params_.decision_epoch, params_, state_.last_acc);
  state_ = DriverState{level, acc, thw};
  return {full_chain(), acc};
}

void DriverSul::apply_hint() { state_.last_level.reset(); }

Symbol DriverSul::step(std::size_t input) {
  return encode_response(query(static_cast<int>(input) + 1));
}

}  // namespace hcps

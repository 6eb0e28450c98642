#pragma once

// Reference cognitive driver used as the system under learning.
//
// Each stimulus is a quantised time-headway level (1-based). A new level
// triggers full deliberation (attend, read, encode, retrieve, decide) and a
// fresh acceleration from the adapted Salvucci law; a repeated level takes
// the short path (attend, read, encode, n_ret) and reuses the cached
// acceleration.

#include <optional>
#include <string>
#include <vector>

#include "hcps/learner.hpp"

namespace hcps {

struct DriverParams {
  double k1 = 1.0;              // 1/s^2, gain on headway change
  double k2 = 0.5;              // 1/s^3, gain on headway error
  double thw_follow = 2.0;      // s
  double decision_epoch = 0.5;  // s, 10 cognitive cycles of 50 ms
  std::vector<double> acc_set{-3, -2, -1, 0, 1, 2};
  std::vector<double> thw_levels{1.0, 2.0, 3.0};  // bin boundaries

  void validate() const;
  int num_levels() const { return static_cast<int>(thw_levels.size()) + 1; }
  /// Representative headway of a level: bin midpoint, top bin extended by
  /// half the width of the bin below it.
  double representative_thw(int level) const;
};

DriverParams parse_driver_params(const std::string& text);
DriverParams load_driver_params(const std::string& path);

enum class Rule { Attend, Read, Encode, Retrieve, NoRetrieve, Decide };

const char* to_string(Rule r);

struct Response {
  std::vector<Rule> rule_chain;
  double acc = 0.0;

  bool full_deliberation() const;
  bool operator==(const Response&) const = default;
};

std::vector<Rule> full_chain();
std::vector<Rule> short_chain();

/// Output symbol such as `attend,read,encode,n_ret:-2`.
std::string encode_response(const Response& r);
/// Inverse of encode_response; nullopt for symbols of another shape.
std::optional<Response> decode_response(const std::string& symbol);
std::string format_acc(double acc);

/// Nearest member of `params.acc_set` to prev_acc + k1*(thw - prev_thw) +
/// k2*(thw - thw_follow)*dt; ties go to the member closer to zero.
double decide_acceleration(double thw, double prev_thw, double dt, const DriverParams& params,
                           double prev_acc);

double nearest_admissible(double acc, const std::vector<double>& acc_set);

struct DriverState {
  std::optional<int> last_level;
  double last_acc = 0.0;
  double last_thw = 0.0;

  bool operator==(const DriverState&) const = default;
};

class DriverSul final : public Sul {
 public:
  explicit DriverSul(DriverParams params = {});

  const Alphabet& inputs() const override { return inputs_; }
  void reset() override;
  Symbol step(std::size_t input) override;

  Response query(int level);
  void apply_hint();

  const DriverState& state() const { return state_; }
  void set_state(const DriverState& s) { state_ = s; }
  const DriverParams& params() const { return params_; }

 private:
  DriverParams params_;
  Alphabet inputs_;
  DriverState state_;
};

/// Input symbol of a stimulus level ("1".."N").
std::string level_symbol(int level);
Alphabet level_alphabet(int num_levels);

}  // namespace hcps

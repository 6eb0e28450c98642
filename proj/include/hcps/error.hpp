#pragma once

#include <stdexcept>
#include <string>

namespace hcps {

enum class ErrorKind {
  RejectedInput,     // symbol, state or level outside its domain
  AlphabetMismatch,
  ContractViolation, // operation called outside its precondition
  Parse,
  Collision,         // negative gap where thw/ttc is requested
  BuildLimit,        // arena state cap exceeded
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hcps

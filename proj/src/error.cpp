#include "hcps/error.hpp"

namespace hcps {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::RejectedInput: return "rejected input";
    case ErrorKind::AlphabetMismatch: return "alphabet mismatch";
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Collision: return "collision state";
    case ErrorKind::BuildLimit: return "build limit exceeded";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace hcps

#pragma once

#include <stdexcept>
#include <string>

namespace jetrl {

/// Broad failure categories shared by every module.
enum class ErrorKind {
  config,      // inconsistent or out-of-range configuration
  input,       // bad argument: dimensions, ranges, non-finite values
  numeric,     // non-finite result or non-convergence
  state,       // operation not valid in the current state
  stability,   // explicit time step violates the stability bound
  codec,       // wire message could not be encoded/decoded
  connection,  // transport or handshake failure
  step,        // remote environment step failed or timed out
  format,      // on-disk file malformed or version mismatch
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define JETRL_DEFINE_ERROR(Name, Kind)                                \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(Kind, what) {}     \
  };

JETRL_DEFINE_ERROR(ConfigError, ErrorKind::config)
JETRL_DEFINE_ERROR(InputError, ErrorKind::input)
JETRL_DEFINE_ERROR(NumericError, ErrorKind::numeric)
JETRL_DEFINE_ERROR(StateError, ErrorKind::state)
JETRL_DEFINE_ERROR(StabilityError, ErrorKind::stability)
JETRL_DEFINE_ERROR(ConnectionError, ErrorKind::connection)
JETRL_DEFINE_ERROR(StepError, ErrorKind::step)
JETRL_DEFINE_ERROR(FormatError, ErrorKind::format)

#undef JETRL_DEFINE_ERROR

/// Codec failures carry the byte offset where parsing stopped.
class CodecError : public Error {
 public:
  CodecError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorKind::codec, what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace jetrl

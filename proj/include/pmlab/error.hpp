#pragma once

#include <stdexcept>
#include <string>

namespace pmlab {

enum class ErrorKind {
  domain,     // argument outside the mathematical domain of an operation
  shape,      // grids or sequences that do not line up
  resolution, // grid too coarse for the requested computation
  numerical,  // solver breakdown
  io,         // file or config problems
  usage,      // unknown ids, malformed options
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace pmlab

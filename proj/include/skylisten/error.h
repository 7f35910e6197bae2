#ifndef SKYLISTEN_ERROR_H_
#define SKYLISTEN_ERROR_H_

#include <stdexcept>
#include <string>

namespace skylisten {

// Base of every domain error raised by the library. The CLI maps these to
// exit code 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Module errors carry a small enum so callers and tests can branch on the
// failure kind without a class per case.
template <typename Code>
class CodedError : public Error {
 public:
  CodedError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace skylisten

#endif  // SKYLISTEN_ERROR_H_

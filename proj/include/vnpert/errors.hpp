#pragma once

#include <stdexcept>
#include <string>

namespace vnpert {

enum class ErrorKind {
  invalid_input,          // non-finite entries, malformed shapes or files
  rank_deficiency,        // numerically singular input where invertibility is required
  spectral_gap,           // eigenvalue inside the boundary band of a spectral window
  hypothesis_violation,   // a theorem hypothesis (||p-q|| < 1, d < 1/15) fails
  inclusion,              // an expected subalgebra inclusion fails
  domain,                 // element outside an operator's domain span
  corner_decoding,        // element not decodable through the corner isomorphism
  averaging_bound,        // averaged element violates its certified bound
  certificate,            // isomorphism certificate unusable (non-invertible map)
  pipeline_inconsistency, // internal runtime assertion of a pipeline failed
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vnpert

#include "vnpert/errors.hpp"

namespace vnpert {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::rank_deficiency: return "rank-deficiency";
    case ErrorKind::spectral_gap: return "spectral-gap";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::inclusion: return "inclusion";
    case ErrorKind::domain: return "domain";
    case ErrorKind::corner_decoding: return "corner-decoding";
    case ErrorKind::averaging_bound: return "averaging-bound";
    case ErrorKind::certificate: return "certificate";
    case ErrorKind::pipeline_inconsistency: return "pipeline-inconsistency";
  }
  return "unknown";
}

}  // namespace vnpert

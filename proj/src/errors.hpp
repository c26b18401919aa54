#ifndef QHO_ERRORS_HPP
#define QHO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qho {

// Error taxonomy shared across the library. The C API maps each class to a
// status code, the CLI to an exit code.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed DSL / scalar / JSON input.
struct parse_error : error {
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
  explicit parse_error(const std::string& msg) : error(msg), position(0) {}
  std::size_t position;
};

struct zero_inversion : error {
  zero_inversion() : error("inversion of zero") {}
};

struct seed_collision : error {
  using error::error;
};

struct out_of_fragment : error {
  using error::error;
};

struct infinite_point : error {
  infinite_point() : error("base point at infinity") {}
};

// Raised when the back-and-forth needs the sign -1 and -1 is not an N-th
// root of unity.
struct odd_n_obstruction : error {
  using error::error;
};

struct fiber_mismatch : error {
  using error::error;
};

struct not_invariant : error {
  using error::error;
};

struct bad_index : error {
  using error::error;
};

// Desk-scale guardrails: variable count, total degree, N^s blowup.
struct guard_error : error {
  using error::error;
};

struct not_descending : error {
  using error::error;
};

struct param_mismatch : error {
  using error::error;
};

}  // namespace qho

#endif

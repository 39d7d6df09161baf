#pragma once

#include <stdexcept>
#include <string>

namespace fockphase {

// A computed quantity violated one of the library's numerical guarantees
// (normalization, orthogonality, ...). Callers should treat this as a bug
// or a broken input, never as data.
class numerical_contract_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A measurement record is impossible under the inference model (the
// likelihood vanishes at every phase).
class model_contradiction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fockphase

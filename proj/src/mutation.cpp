#include "numalang/mutation.hpp"

namespace numalang::testing {

MutationFlags& mutations() {
  static MutationFlags flags;
  return flags;
}

MutationGuard::~MutationGuard() { mutations() = MutationFlags{}; }

}  // namespace numalang::testing

#pragma once

namespace numalang::testing {

/// Fault-injection switches used to demonstrate that the soundness
/// monitor actually rejects broken interpreters. All off by default;
/// the CLI exposes them behind --inject-fault for the same purpose.
struct MutationFlags {
  bool newr_read_label = false;   // remote allocation emits read instead of write
  bool dispatch_lifo = false;     // mailbox dispatch pops the newest message
  bool filter_skip_loop = false;  // behaviour filter leaves loop bodies untouched
};

MutationFlags& mutations();

/// RAII reset for tests that flip mutation flags.
struct MutationGuard {
  MutationGuard() = default;
  ~MutationGuard();
};

}  // namespace numalang::testing

// Stacks stored as base-k integers in two counters, and a queue built from two
// such stacks, with every counter update charged as one step.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kcounter/machine.hpp"

namespace kcounter {

using BigNat = boost::multiprecision::cpp_int;

/// Symbol 1 is the bottom marker; stored symbols are 2..k-1. The code of
/// Z1 Z_{i1} ... Z_{im} (top last) is k^m + i1 k^{m-1} + ... + im.
struct EncodedStack {
  unsigned k = 3;
  BigNat code = 1;

  friend bool operator==(const EncodedStack&, const EncodedStack&) = default;
};

EncodedStack stack_encode(std::span<const unsigned> content, unsigned k);
/// Content above the bottom marker, bottom first. Throws on codes with a zero digit.
std::vector<unsigned> stack_decode(const EncodedStack& s);

struct StackTop {
  unsigned symbol;
  BigNat cost;
};
struct StackPush {
  EncodedStack stack;
  BigNat cost;
};
struct StackPop {
  unsigned symbol;
  EncodedStack stack;
  BigNat cost;
};

/// code mod k, read while copying the code to the other counter (code steps).
StackTop stack_top(const EncodedStack& s);
/// code * k + r: k increments per decrement, then r increments.
StackPush stack_push(const EncodedStack& s, unsigned r);
/// floor(code / k): one increment per k decrements.
StackPop stack_pop(const EncodedStack& s);

/// A queue over symbols 2..k-1 held in four counters: the first stack keeps
/// Z1 + rear..front (front on top), the second is scratch space for add_rear.
class CountedQueue {
 public:
  explicit CountedQueue(unsigned k);

  unsigned k() const { return k_; }
  const std::array<BigNat, 4>& counters() const { return counters_; }
  const BigNat& step_count() const { return steps_; }
  /// Logical content, front first.
  std::vector<unsigned> content() const;
  std::size_t size() const { return content().size(); }

  friend bool operator==(const CountedQueue&, const CountedQueue&) = default;

 private:
  friend struct QueueOps;
  friend struct QueueResult queue_add_rear(const CountedQueue& q, unsigned r);
  friend struct QueueResult queue_front(const CountedQueue& q);
  friend struct QueueResult queue_remove_front(const CountedQueue& q);
  EncodedStack stack(int which) const;
  void store(int which, const EncodedStack& s, bool swap_holder);

  unsigned k_;
  std::array<BigNat, 4> counters_{};
  std::array<int, 2> holder_{0, 2};  // counter index holding each stack's code
  BigNat steps_ = 0;
};

struct QueueResult {
  CountedQueue queue;
  std::optional<unsigned> symbol;
  BigNat cost;
};

QueueResult queue_add_rear(const CountedQueue& q, unsigned r);
QueueResult queue_front(const CountedQueue& q);
QueueResult queue_remove_front(const CountedQueue& q);

/// (2k)^{m+2}
BigNat add_rear_bound(unsigned k, std::size_t m);
/// 2 m k^{m+1} + 2 + k + r + m k^{m+1} + m k^{m+2}
BigNat add_rear_itemized_bound(unsigned k, std::size_t m, unsigned r);
/// k^{m+1}
BigNat front_bound(unsigned k, std::size_t m);

}  // namespace kcounter

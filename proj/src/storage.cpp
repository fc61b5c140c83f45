#include "kcounter/storage.hpp"

#include <algorithm>

namespace kcounter {

namespace {

void check_base(unsigned k) {
  if (k < 3) throw Error("stack base must be at least 3");
}

void check_symbol(unsigned r, unsigned k) {
  if (r < 2 || r > k - 1) throw Error("stack symbol " + std::to_string(r) + " outside 2.." + std::to_string(k - 1));
}

BigNat power(unsigned base, std::size_t exp) {
  BigNat r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

EncodedStack stack_encode(std::span<const unsigned> content, unsigned k) {
  check_base(k);
  EncodedStack s{k, 1};
  for (unsigned i : content) {
    check_symbol(i, k);
    s.code = s.code * k + i;
  }
  return s;
}

std::vector<unsigned> stack_decode(const EncodedStack& s) {
  check_base(s.k);
  if (s.code < 1) throw Error("stack code must be positive");
  std::vector<unsigned> out;
  BigNat j = s.code;
  while (j > 1) {
    auto digit = static_cast<unsigned>(j % s.k);
    if (digit == 0) throw Error("stack code has a zero digit");
    if (digit == 1) throw Error("stack code has a bottom marker above the bottom");
    out.push_back(digit);
    j /= s.k;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

StackTop stack_top(const EncodedStack& s) {
  return {static_cast<unsigned>(s.code % s.k), s.code};
}

StackPush stack_push(const EncodedStack& s, unsigned r) {
  check_symbol(r, s.k);
  EncodedStack out{s.k, s.code * s.k + r};
  return {out, out.code};
}

StackPop stack_pop(const EncodedStack& s) {
  if (s.code <= 1) throw Error("stack underflow");
  return {static_cast<unsigned>(s.code % s.k), EncodedStack{s.k, s.code / s.k}, s.code};
}

CountedQueue::CountedQueue(unsigned k) : k_(k) {
  check_base(k);
  counters_[0] = 1;
  counters_[2] = 1;
}

EncodedStack CountedQueue::stack(int which) const {
  return {k_, counters_[static_cast<std::size_t>(holder_[static_cast<std::size_t>(which)])]};
}

void CountedQueue::store(int which, const EncodedStack& s, bool swap_holder) {
  auto& h = holder_[static_cast<std::size_t>(which)];
  if (swap_holder) {
    counters_[static_cast<std::size_t>(h)] = 0;
    h ^= 1;
  }
  counters_[static_cast<std::size_t>(h)] = s.code;
}

std::vector<unsigned> CountedQueue::content() const {
  auto c = stack_decode(stack(0));
  std::reverse(c.begin(), c.end());
  return c;
}

struct QueueOps {
  // Pops `from` onto `to` until `from` shows its bottom marker; that last check
  // pops Z1 (1 -> 0) and pushes it back (0 -> 1).
  static BigNat transfer(CountedQueue& q, int from, int to) {
    BigNat cost = 0;
    while (q.stack(from).code != 1) {
      auto p = stack_pop(q.stack(from));
      cost += p.cost;
      q.store(from, p.stack, true);
      auto u = stack_push(q.stack(to), p.symbol);
      cost += u.cost;
      q.store(to, u.stack, true);
    }
    return cost + 2;
  }
};

QueueResult queue_add_rear(const CountedQueue& q, unsigned r) {
  check_symbol(r, q.k());
  CountedQueue out = q;
  const bool moved = out.stack(0).code != 1;
  BigNat cost = QueueOps::transfer(out, 0, 1);
  auto u = stack_push(out.stack(0), r);
  cost += u.cost;
  out.store(0, u.stack, true);
  // the finite control knows whether anything went to the scratch stack
  if (moved) cost += QueueOps::transfer(out, 1, 0);
  out.steps_ += cost;
  return {std::move(out), std::nullopt, cost};
}

QueueResult queue_front(const CountedQueue& q) {
  auto s = q.stack(0);
  if (s.code == 1) throw Error("queue underflow");
  CountedQueue out = q;
  auto t = stack_top(s);
  out.store(0, s, true);
  out.steps_ += t.cost;
  return {std::move(out), t.symbol, t.cost};
}

QueueResult queue_remove_front(const CountedQueue& q) {
  auto s = q.stack(0);
  if (s.code == 1) throw Error("queue underflow");
  CountedQueue out = q;
  auto p = stack_pop(s);
  out.store(0, p.stack, true);
  out.steps_ += p.cost;
  return {std::move(out), p.symbol, p.cost};
}

BigNat add_rear_bound(unsigned k, std::size_t m) { return power(2 * k, m + 2); }

BigNat add_rear_itemized_bound(unsigned k, std::size_t m, unsigned r) {
  const BigNat mm = m;
  return 2 * mm * power(k, m + 1) + 2 + k + r + mm * power(k, m + 1) + mm * power(k, m + 2);
}

BigNat front_bound(unsigned k, std::size_t m) { return power(k, m + 1); }

}  // namespace kcounter

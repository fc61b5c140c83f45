#include "doctest.h"

#include <deque>
#include <functional>
#include <random>

#include "kcounter/storage.hpp"

using namespace kcounter;

namespace {

// evaluates the positional formula digit by digit, bottom marker first
BigNat code_oracle(const std::vector<unsigned>& content, unsigned k) {
  BigNat j = 0, place = 1;
  for (std::size_t t = content.size(); t-- > 0;) {
    j += place * content[t];
    place *= k;
  }
  return j + place;
}

void for_each_content(unsigned k, std::size_t m, const std::function<void(const std::vector<unsigned>&)>& f) {
  std::vector<unsigned> c(m, 2);
  while (true) {
    f(c);
    std::size_t i = 0;
    while (i < m && c[i] == k - 1) c[i++] = 2;
    if (i == m) return;
    ++c[i];
  }
}

}  // namespace

TEST_CASE("stack encoding") {
  std::vector<unsigned> z2z3{2, 3};
  CHECK(stack_encode(z2z3, 4).code == 27);
  CHECK(stack_encode(std::vector<unsigned>{}, 4).code == 1);
  CHECK_THROWS_AS(stack_encode(std::vector<unsigned>{1}, 4), Error);
  CHECK_THROWS_AS(stack_encode(std::vector<unsigned>{4}, 4), Error);
  CHECK_THROWS_AS(stack_decode(EncodedStack{4, 4}), Error);

  auto top = stack_top(EncodedStack{4, 27});
  CHECK(top.symbol == 3);
  CHECK(top.cost <= 54);
  CHECK(stack_top(EncodedStack{4, 1}).symbol == 1);

  auto pushed = stack_push(EncodedStack{4, 27}, 2);
  CHECK(pushed.stack.code == 110);
  CHECK(pushed.cost <= 110);
  CHECK(stack_push(EncodedStack{4, 1}, 2).stack.code == 6);

  auto p1 = stack_pop(EncodedStack{4, 110});
  CHECK(p1.symbol == 2);
  CHECK(p1.stack.code == 27);
  CHECK(p1.cost <= 110);
  auto p2 = stack_pop(EncodedStack{4, 27});
  CHECK(p2.symbol == 3);
  CHECK(p2.stack.code == 6);
  CHECK_THROWS_AS(stack_pop(EncodedStack{4, 1}), Error);
}

TEST_CASE("stack round trips, exhaustive") {
  std::size_t cases = 0;
  for (unsigned k = 3; k <= 6; ++k) {
    for (std::size_t m = 0; m <= 5; ++m) {
      for_each_content(k, m, [&](const std::vector<unsigned>& c) {
        auto s = stack_encode(c, k);
        CHECK(s.code == code_oracle(c, k));
        CHECK(s.code <= BigNat(1) * boost::multiprecision::pow(BigNat(k), static_cast<unsigned>(m + 1)));
        CHECK(stack_decode(s) == c);
        for (unsigned r = 2; r < k; ++r) {
          auto p = stack_pop(stack_push(s, r).stack);
          CHECK(p.symbol == r);
          CHECK(p.stack == s);
        }
        ++cases;
      });
    }
  }
  CHECK(cases >= 1024);
}

TEST_CASE("queue behaves like a FIFO and respects the step bounds") {
  std::mt19937_64 rng(42);
  for (unsigned k = 3; k <= 6; ++k) {
    for (int history = 0; history < 20; ++history) {
      CountedQueue q(k);
      std::deque<unsigned> ref;
      BigNat last_steps = 0;
      for (int op = 0; op < 200; ++op) {
        const std::size_t m = ref.size();
        int kind = static_cast<int>(rng() % 3);
        if (m >= 6) kind = 1 + static_cast<int>(rng() % 2);
        if (kind == 0 || m == 0) {
          unsigned r = 2 + static_cast<unsigned>(rng() % (k - 2));
          auto res = queue_add_rear(q, r);
          CHECK(res.cost <= add_rear_bound(k, m));
          CHECK(res.cost <= add_rear_itemized_bound(k, m, r));
          q = res.queue;
          ref.push_back(r);
        } else if (kind == 1) {
          auto res = queue_front(q);
          CHECK(res.symbol == ref.front());
          CHECK(res.cost <= front_bound(k, m));
          q = res.queue;
        } else {
          auto res = queue_remove_front(q);
          CHECK(res.symbol == ref.front());
          CHECK(res.cost <= front_bound(k, m));
          q = res.queue;
          ref.pop_front();
        }
        CHECK(q.step_count() >= last_steps);
        last_steps = q.step_count();
        CHECK(q.content() == std::vector<unsigned>(ref.begin(), ref.end()));
      }
    }
  }
  CHECK_THROWS_AS(queue_front(CountedQueue(4)), Error);
  CHECK_THROWS_AS(queue_remove_front(CountedQueue(4)), Error);
  CHECK_THROWS_AS(queue_add_rear(CountedQueue(4), 4), Error);
}

TEST_CASE("bound values") {
  CHECK(add_rear_bound(4, 2) == 4096);
  CHECK(front_bound(4, 3) == 256);
  auto one = queue_remove_front(queue_add_rear(CountedQueue(4), 3).queue);
  CHECK(one.symbol == 3);
  CHECK(one.queue.content().empty());
}

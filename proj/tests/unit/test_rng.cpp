// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "mnnas/rng.hpp"

using namespace mnnas;

TEST_CASE("rng: same seed gives the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: substreams with different names diverge") {
  Rng a = substream(7, "datagen");
  Rng b = substream(7, "init");
  Rng c = substream(7, "datagen");
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) {
    const uint64_t av = a.next_u64();
    const uint64_t bv = b.next_u64();
    CHECK(av == c.next_u64());
    any_diff = any_diff || (av != bv);
  }
  CHECK(any_diff);
}

TEST_CASE("rng: uniform stays in [0,1)") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng: uniform_index covers [0,n) and stays in range") {
  Rng rng(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = rng.uniform_index(7);
    REQUIRE(v < 7);
    ++hits[static_cast<size_t>(v)];
  }
  for (int h : hits) CHECK(h > 700);  // ~1000 expected per bucket
}

TEST_CASE("rng: bernoulli extremes") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("rng: shuffle is a deterministic permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  Rng a(9), b(9);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "pander/rng.hpp"

using namespace pander;

TEST_CASE("same seed and purpose give identical sequences") {
  RngStream a(42, "profile-sampling");
  RngStream b(42, "profile-sampling");
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("different purposes give different sequences") {
  RngStream a(42, "profile-sampling");
  RngStream b(42, "election-tie");
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next() == b.next();
  CHECK(equal == 0);
}

TEST_CASE("different indices give different sequences") {
  RngStream a(42, "train-episode", 0);
  RngStream b(42, "train-episode", 1);
  CHECK(a.next() != b.next());
}

TEST_CASE("copying a stream freezes its draw sequence") {
  RngStream a(7, "outcome-tie");
  a.next();
  a.next();
  RngStream copy = a;
  std::vector<std::uint64_t> from_a, from_copy;
  for (int i = 0; i < 100; ++i) from_a.push_back(a.next());
  for (int i = 0; i < 100; ++i) from_copy.push_back(copy.next());
  CHECK(from_a == from_copy);
}

TEST_CASE("uniform01 stays in [0, 1) and has mean near 1/2") {
  RngStream rng(1, "test");
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform01();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bernoulli respects degenerate probabilities") {
  RngStream rng(2, "test");
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("below is unbiased across a small modulus") {
  RngStream rng(3, "test");
  std::array<int, 5> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[rng.below(5)] += 1;
  for (int c : counts)
    CHECK(static_cast<double>(c) / draws == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("uniform_int covers the inclusive range") {
  RngStream rng(4, "test");
  std::set<int> seen;
  for (int i = 0; i < 1000; ++i) {
    const int x = rng.uniform_int(0, 9);
    REQUIRE(x >= 0);
    REQUIRE(x <= 9);
    seen.insert(x);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("permutation is a permutation and varies by seed") {
  RngStream rng(5, "test");
  const auto p = rng.permutation(10);
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 10; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);

  // every position should be roughly uniform over many draws
  std::array<int, 10> first_counts{};
  for (int s = 0; s < 10000; ++s) {
    RngStream r(static_cast<std::uint64_t>(s), "perm-test");
    first_counts[static_cast<std::size_t>(r.permutation(10)[0])] += 1;
  }
  for (int c : first_counts)
    CHECK(static_cast<double>(c) / 10000 == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("coin is fair across seeds") {
  int heads = 0;
  for (int s = 0; s < 10000; ++s) {
    RngStream r(static_cast<std::uint64_t>(s), "coin-test");
    heads += r.coin();
  }
  CHECK(static_cast<double>(heads) / 10000 == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("serialize round-trips the exact state") {
  RngStream a(99, "serialize-test");
  for (int i = 0; i < 17; ++i) a.next();
  RngStream b = RngStream::deserialize(a.serialize());
  CHECK(a == b);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("deserialize rejects malformed text") {
  CHECK_THROWS_AS(RngStream::deserialize("1 2 3"), std::invalid_argument);
  CHECK_THROWS_AS(RngStream::deserialize("not numbers at all"), std::invalid_argument);
}

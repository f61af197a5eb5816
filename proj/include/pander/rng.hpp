#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pander {

// 64-bit FNV-1a, used to fold substream labels into seed material.
inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffULL;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic PRNG (xoshiro256++, seeded through splitmix64) with named
// substreams: RngStream(seed, "profile-sampling") and
// RngStream(seed, "election-tie") never share draws.
//
// All draw helpers are implemented here instead of <random> distributions
// because the standard leaves distribution algorithms implementation-defined
// and we need bit-identical sequences on every platform. Streams are plain
// values: copying one freezes its state, which is how counterfactual replays
// reuse the exact draws of the branch they fork from.
class RngStream {
 public:
  RngStream() { reseed(0, "", 0); }
  RngStream(std::uint64_t seed, std::string_view purpose,
            std::uint64_t index = 0) {
    reseed(seed, purpose, index);
  }

  void reseed(std::uint64_t seed, std::string_view purpose,
              std::uint64_t index = 0) {
    std::uint64_t h = fnv1a64(purpose);
    h = fnv1a64_u64(seed, h);
    h = fnv1a64_u64(index, h);
    for (auto& w : state_) w = splitmix64(h);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // P(true) = p; p <= 0 never fires, p >= 1 always fires.
  bool bernoulli(double p) { return uniform01() < p; }

  // Fair coin from the top bit.
  bool coin() { return (next() >> 63) != 0; }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::logic_error("RngStream::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  // Inclusive range.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::logic_error("RngStream::uniform_int: empty range");
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n) {
    std::vector<int> a(n);
    std::iota(a.begin(), a.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(a[i], a[j]);
    }
    return a;
  }

  std::array<std::uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

  std::string serialize() const {
    std::ostringstream os;
    os << state_[0] << ' ' << state_[1] << ' ' << state_[2] << ' ' << state_[3];
    return os.str();
  }

  static RngStream deserialize(const std::string& text) {
    std::istringstream is(text);
    RngStream s;
    for (auto& w : s.state_) {
      if (!(is >> w)) throw std::invalid_argument("RngStream: bad serialized state");
    }
    return s;
  }

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.state_ == b.state_;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace pander

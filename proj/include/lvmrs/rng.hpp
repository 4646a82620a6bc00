#pragma once
// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (seed, input id, stream tag, draw index), so sampling is
// reproducible bit-for-bit and order-independent: rows of a noise matrix
// can be generated in any order or in parallel without shared state.

#include <array>
#include <cstdint>

namespace lvmrs::rng {

struct PhiloxCtr {
  std::uint32_t c0, c1, c2, c3;
};
struct PhiloxKey {
  std::uint32_t k0, k1;
};

// One Philox4x32 block, 10 rounds.
std::array<std::uint32_t, 4> philox4x32(PhiloxCtr ctr, PhiloxKey key);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t input_id, std::uint32_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        input_id_(input_id),
        stream_(stream) {}

  // Uniform in (0, 1); never returns 0 or 1.
  double uniform(std::uint64_t index) const;

  // Box-Muller pair derived from one block.
  std::array<double, 2> normal_pair(std::uint64_t index) const;

  // Element `index` of the virtual standard-normal sequence.
  double normal(std::uint64_t index) const;

  std::array<std::uint32_t, 4> block(std::uint64_t index) const;

 private:
  PhiloxKey key_;
  std::uint32_t input_id_;
  std::uint32_t stream_;
};

}  // namespace lvmrs::rng

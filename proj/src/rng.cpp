#include "lvmrs/rng.hpp"

#include <cmath>

namespace lvmrs::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline double to_unit(std::uint64_t w) {
  // 53 random bits, offset by half an ulp so the result stays in (0, 1).
  return static_cast<double>(w >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(PhiloxCtr ctr, PhiloxKey key) {
  std::uint32_t x0 = ctr.c0, x1 = ctr.c1, x2 = ctr.c2, x3 = ctr.c3;
  std::uint32_t k0 = key.k0, k1 = key.k1;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t index) const {
  const PhiloxCtr ctr{input_id_, stream_, static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
  return philox4x32(ctr, key_);
}

double CounterRng::uniform(std::uint64_t index) const {
  const auto w = block(index);
  return to_unit((static_cast<std::uint64_t>(w[0]) << 32) | w[1]);
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t index) const {
  const auto w = block(index);
  const double u1 = to_unit((static_cast<std::uint64_t>(w[0]) << 32) | w[1]);
  const double u2 = to_unit((static_cast<std::uint64_t>(w[2]) << 32) | w[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

double CounterRng::normal(std::uint64_t index) const {
  return normal_pair(index >> 1)[index & 1];
}

}  // namespace lvmrs::rng

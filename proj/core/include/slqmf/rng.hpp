/*
 Copyright 2026 The slqmf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace slqmf {

/// Philox 4x32-10 counter-based generator. Outputs are a pure function of
/// (counter, key), so draws indexed by (stream, path, step) are identical
/// no matter how work is scheduled across threads.
namespace philox {

inline constexpr uint32_t kM0 = 0xD2511F53u;
inline constexpr uint32_t kM1 = 0xCD9E8D57u;
inline constexpr uint32_t kW0 = 0x9E3779B9u;
inline constexpr uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  lo = static_cast<uint32_t>(p);
  hi = static_cast<uint32_t>(p >> 32);
}

inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> x,
                                     std::array<uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM0, x[0], lo0, hi0);
    mulhilo(kM1, x[2], lo1, hi1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return x;
}

}  // namespace philox

/// Uniform in (0,1); never returns an endpoint.
inline double u32_to_unit(uint32_t x) {
  return (static_cast<double>(x) + 0.5) * 0x1p-32;
}

/// One standard normal for the (stream, path, step, draw) coordinate,
/// keyed by the master seed. Box-Muller on the first two words of the
/// Philox block.
inline double counter_normal(uint64_t seed, uint32_t stream, uint64_t path,
                             uint32_t step, uint32_t draw = 0) {
  const std::array<uint32_t, 4> ctr = {
      step, draw, static_cast<uint32_t>(path),
      static_cast<uint32_t>(path >> 32) ^ stream};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  const auto out = philox::block(ctr, key);
  const double u1 = u32_to_unit(out[0]);
  const double u2 = u32_to_unit(out[1]);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace slqmf

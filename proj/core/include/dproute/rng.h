//
// Copyright 2026 The dproute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPROUTE_RNG_H_
#define DPROUTE_RNG_H_

#include <array>
#include <cstdint>

namespace dproute {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC'11). The 64-bit seed is the key; the 128-bit counter is split into a
// 64-bit stream id (high words) and a 64-bit position (low words), so that
// independent substreams such as (seed, day) never overlap and results do not
// depend on the order in which substreams are consumed.
//
// All derived variates use fixed algorithms so that a (seed, stream) pair
// yields the same sequence on every platform with IEEE-754 doubles and a
// correctly rounded libm:
//   Uniform()   53-bit mantissa from one 64-bit draw, in [0, 1).
//   Gaussian()  Box-Muller, both outputs of a pair are used in order.
//   Poisson()   Knuth multiplication for mean < 10, otherwise Hormann's PTRS.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t NextU64();
  double Uniform();
  double Gaussian();
  std::uint64_t Poisson(double mean);

  // Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> Block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;  // 64-bit words still available in buffer_ (0, 1 or 2)
  bool has_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

}  // namespace dproute

#endif  // DPROUTE_RNG_H_

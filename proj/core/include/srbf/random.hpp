// SPDX-License-Identifier: Apache-2.0
//
// srbf - robust transmit beamforming for symbiotic radio
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SRBF_RANDOM_HPP
#define SRBF_RANDOM_HPP

#include "srbf/types.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace srbf {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent substreams.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed for substream (seed, i0, i1, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix_seed(seed);
  for (std::uint64_t p : path) s = mix_seed(s ^ mix_seed(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// Draws from CN(0, variance).
class ComplexGaussian {
 public:
  explicit ComplexGaussian(double variance = 1.0) : normal_(0.0, std::sqrt(0.5 * variance)) {}

  cdouble operator()(Rng& rng) {
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {re, im};
  }

  CVector vector(Rng& rng, Eigen::Index n) {
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = (*this)(rng);
    return out;
  }

 private:
  std::normal_distribution<double> normal_;
};

}  // namespace srbf

#endif  // SRBF_RANDOM_HPP

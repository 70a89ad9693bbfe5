// Copyright 2026 The gqcr Authors
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

#pragma once

// Counter-based random streams. A stream is identified by (seed, stream index)
// and its k-th output depends only on those and k, so work can be split across
// threads without changing any draw.

#include <cstddef>
#include <cstdint>
#include <limits>

#include "gqcr/gaussian.hpp"

namespace gqcr {

class CounterRng {
   public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + (++counter_) * kWeyl); }

    std::uint64_t counter() const noexcept { return counter_; }

    /// SplitMix64 finalizer.
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    static constexpr std::uint64_t kWeyl = 0x9e3779b97f4a7c15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Haar-distributed M x M unitary (QR of a complex Ginibre matrix with the
/// phases of R's diagonal divided out).
ComplexMatrix haar_unitary(std::size_t modes, CounterRng &rng);

/// Random pure state: squeezers of up to max_db each between two Haar
/// networks, and a mean drawn uniformly from the ball of radius
/// max_displacement.
GaussianState random_pure_state(std::size_t modes, CounterRng &rng, double max_db = 10.0,
                                double max_displacement = 4.0);

}  // namespace gqcr

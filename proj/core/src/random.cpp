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

#include "gqcr/random.hpp"

#include <cmath>
#include <random>

namespace gqcr {

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

ComplexMatrix haar_unitary(std::size_t modes, CounterRng &rng) {
    const auto m = static_cast<Eigen::Index>(modes);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix z(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        for (Eigen::Index r = 0; r < m; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < m; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
    }
    return q;
}

GaussianState random_pure_state(std::size_t modes, CounterRng &rng, double max_db, double max_displacement) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    SqueezerBank bank;
    for (std::size_t i = 0; i < modes; ++i) bank.variances.push_back(db_to_variance(max_db * unit(rng)));
    GaussianState s = make_squeezed_bank(bank);
    s = transform_state(s, symplectic_from_unitary(haar_unitary(modes, rng)));

    const auto n = static_cast<Eigen::Index>(2 * modes);
    RealVector direction(n);
    for (Eigen::Index i = 0; i < n; ++i) direction(i) = normal(rng);
    const double radius = max_displacement * std::pow(unit(rng), 1.0 / static_cast<double>(n));
    return GaussianState(radius * direction.normalized(), s.cov());
}

}  // namespace gqcr

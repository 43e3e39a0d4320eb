// Copyright 2026 The locc-geometry Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Seeded random operators and deterministic task fan-out.
 *
 * Every randomized task derives its own generator from (master seed, task
 * index), so results do not depend on how tasks are scheduled over threads.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "operator.hpp"

namespace locc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Independent generator for task `index` under master seed `seed`.
inline Rng task_rng(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

inline double uniform01(Rng &rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline Matrix random_ginibre(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = n(rng);
            const double im = n(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

inline Vector random_unit_vector(Rng &rng, Eigen::Index d) {
    Vector v = random_ginibre(rng, d, 1).col(0);
    return v / v.norm();
}

inline Matrix random_hermitian(Rng &rng, Eigen::Index d) {
    return hermitian_part(random_ginibre(rng, d, d));
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
inline Matrix random_unitary(Rng &rng, Eigen::Index d) {
    Eigen::HouseholderQR<Matrix> qr(random_ginibre(rng, d, d));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const double a = std::abs(r(i, i));
        if (a > 0.0) {
            q.col(i) *= r(i, i) / a;
        }
    }
    return q;
}

/// Random PSD matrix G G^dagger with G of the given rank (0 means full rank).
inline Matrix random_psd(Rng &rng, Eigen::Index d, Eigen::Index rank = 0) {
    const Eigen::Index k = rank > 0 ? std::min(rank, d) : d;
    const Matrix g = random_ginibre(rng, d, k);
    return hermitian_part(g * g.adjoint());
}

/// Random M with 0 <= M <= I: Haar eigenbasis, eigenvalues uniform in [lo, hi].
inline Matrix random_contraction(Rng &rng, Eigen::Index d, double lo = 0.0, double hi = 1.0) {
    const Matrix u = random_unitary(rng, d);
    RealVector lam(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        lam(i) = lo + (hi - lo) * uniform01(rng);
    }
    return hermitian_part(u * lam.asDiagonal() * u.adjoint());
}

/// Number of worker threads for `threads` (0 selects the hardware count).
inline std::size_t resolve_threads(std::size_t threads) {
    if (threads == 0) {
        threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return threads;
}

/**
 * @brief Calls fn(i) for i in [0, n) over `threads` workers.
 *
 * fn must only write to state owned by index i. The first exception thrown
 * by any task is rethrown after all workers join.
 */
template <class Fn> void parallel_for(std::size_t n, std::size_t threads, Fn &&fn) {
    threads = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next.store(n);
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace locc

/*
 * Copyright 2026 the qscore authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// AVX2 variants of the scoring kernels. This translation unit is the only one
// compiled with -mavx2; entry is guarded by the runtime dispatch in
// kernels.cpp, which calls in here only after avx2_available() reports true.

#include <immintrin.h>

#include <cstddef>

namespace qscore::simd::detail {

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// sum of x^2 over [begin, end)
inline double sum_sq(const double* x, std::size_t n, double shift) {
    const __m256d vshift = _mm256_set1_pd(shift);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_sub_pd(vshift, _mm256_loadu_pd(x + i));
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double d = shift - x[i];
        total += d * d;
    }
    return total;
}

} // namespace

double crps_step_sum_avx2(const double* cdf, std::size_t n, std::size_t split) {
    // (0 - F)^2 below the observation, (1 - F)^2 at and above it.
    return sum_sq(cdf, split, 0.0) + sum_sq(cdf + split, n - split, 1.0);
}

double pinball_sum_avx2(const double* taus, const double* qs, std::size_t n, double y) {
    const __m256d vy = _mm256_set1_pd(y);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = _mm256_loadu_pd(qs + i);
        const __m256d tau = _mm256_loadu_pd(taus + i);
        const __m256d ind = _mm256_and_pd(_mm256_cmp_pd(vy, q, _CMP_LE_OQ), one);
        const __m256d term = _mm256_mul_pd(two, _mm256_mul_pd(_mm256_sub_pd(ind, tau),
                                                              _mm256_sub_pd(q, vy)));
        acc = _mm256_add_pd(acc, term);
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double ind = (y <= qs[i]) ? 1.0 : 0.0;
        total += 2.0 * (ind - taus[i]) * (qs[i] - y);
    }
    return total;
}

std::size_t count_within_avx2(const double* lo, const double* hi, const double* y,
                              std::size_t n) {
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d ge = _mm256_cmp_pd(vy, _mm256_loadu_pd(lo + i), _CMP_GE_OQ);
        const __m256d le = _mm256_cmp_pd(vy, _mm256_loadu_pd(hi + i), _CMP_LE_OQ);
        const int mask = _mm256_movemask_pd(_mm256_and_pd(ge, le));
        count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    }
    for (; i < n; ++i) {
        count += (lo[i] <= y[i] && y[i] <= hi[i]) ? 1u : 0u;
    }
    return count;
}

} // namespace qscore::simd::detail

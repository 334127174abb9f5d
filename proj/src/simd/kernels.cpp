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

#include "qscore/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

namespace qscore::simd {

namespace detail {

double crps_step_sum_scalar(const double* cdf, std::size_t n, std::size_t split) {
    double acc = 0.0;
    for (std::size_t i = 0; i < split; ++i) {
        acc += cdf[i] * cdf[i];
    }
    for (std::size_t i = split; i < n; ++i) {
        const double d = 1.0 - cdf[i];
        acc += d * d;
    }
    return acc;
}

double pinball_sum_scalar(const double* taus, const double* qs, std::size_t n, double y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ind = (y <= qs[i]) ? 1.0 : 0.0;
        acc += 2.0 * (ind - taus[i]) * (qs[i] - y);
    }
    return acc;
}

std::size_t count_within_scalar(const double* lo, const double* hi, const double* y,
                                std::size_t n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        count += (lo[i] <= y[i] && y[i] <= hi[i]) ? 1u : 0u;
    }
    return count;
}

#if QSCORE_HAVE_AVX2
double crps_step_sum_avx2(const double* cdf, std::size_t n, std::size_t split);
double pinball_sum_avx2(const double* taus, const double* qs, std::size_t n, double y);
std::size_t count_within_avx2(const double* lo, const double* hi, const double* y, std::size_t n);
bool avx2_available();
#endif

} // namespace detail

namespace {

std::vector<Backend> detect_supported() {
    std::vector<Backend> out{Backend::scalar};
#if QSCORE_HAVE_AVX2
    if (detail::avx2_available()) {
        out.push_back(Backend::avx2);
    }
#endif
    return out;
}

Backend initial_backend() {
    const auto supported = detect_supported();
    Backend best = supported.back();
    if (const char* env = std::getenv("QSCORE_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) {
            best = Backend::scalar;
        } else if (std::strcmp(env, "avx2") == 0) {
            for (Backend b : supported) {
                if (b == Backend::avx2) best = b;
            }
        }
    }
    return best;
}

std::atomic<Backend>& current_backend() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

std::vector<Backend> supported_backends() { return detect_supported(); }

Backend active_backend() { return current_backend().load(std::memory_order_relaxed); }

bool set_backend(Backend b) {
    for (Backend s : detect_supported()) {
        if (s == b) {
            current_backend().store(b, std::memory_order_relaxed);
            return true;
        }
    }
    return false;
}

double crps_step_sum(std::span<const double> cdf, std::ptrdiff_t split) {
    const std::size_t n = cdf.size();
    const std::size_t s =
        static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(split, 0, static_cast<std::ptrdiff_t>(n)));
#if QSCORE_HAVE_AVX2
    if (active_backend() == Backend::avx2) {
        return detail::crps_step_sum_avx2(cdf.data(), n, s);
    }
#endif
    return detail::crps_step_sum_scalar(cdf.data(), n, s);
}

double pinball_sum(std::span<const double> taus, std::span<const double> quantiles, double y) {
    const std::size_t n = std::min(taus.size(), quantiles.size());
#if QSCORE_HAVE_AVX2
    if (active_backend() == Backend::avx2) {
        return detail::pinball_sum_avx2(taus.data(), quantiles.data(), n, y);
    }
#endif
    return detail::pinball_sum_scalar(taus.data(), quantiles.data(), n, y);
}

std::size_t count_within(std::span<const double> lower, std::span<const double> upper,
                         std::span<const double> y) {
    const std::size_t n = std::min({lower.size(), upper.size(), y.size()});
#if QSCORE_HAVE_AVX2
    if (active_backend() == Backend::avx2) {
        return detail::count_within_avx2(lower.data(), upper.data(), y.data(), n);
    }
#endif
    return detail::count_within_scalar(lower.data(), upper.data(), y.data(), n);
}

} // namespace qscore::simd

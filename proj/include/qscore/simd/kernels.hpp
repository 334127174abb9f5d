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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops of the scoring library. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. Variants are equivalence-tested against the reference; callers see
// one function per kernel.

namespace qscore::simd {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

/// Backends usable on this machine (scalar always present).
std::vector<Backend> supported_backends();

/// Currently selected backend. Defaults to the best supported one; the
/// QSCORE_SIMD environment variable ("scalar" or "avx2") overrides at startup.
Backend active_backend();

/// Select a backend explicitly. Returns false (and leaves the selection
/// unchanged) if the backend is not supported on this machine.
bool set_backend(Backend b);

/// Sum of squared CDF steps against the observation's step function:
///   sum_{i <  split} cdf[i]^2  +  sum_{i >= split} (1 - cdf[i])^2.
/// `split` is clamped to [0, cdf.size()].
double crps_step_sum(std::span<const double> cdf, std::ptrdiff_t split);

/// Sum of quantile scores 2 * (1(y <= q_i) - tau_i) * (q_i - y) over paired
/// arrays of levels and quantile values.
double pinball_sum(std::span<const double> taus, std::span<const double> quantiles, double y);

/// Number of indices with lower[i] <= y[i] <= upper[i] (closed interval).
std::size_t count_within(std::span<const double> lower, std::span<const double> upper,
                         std::span<const double> y);

} // namespace qscore::simd

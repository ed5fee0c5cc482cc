// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace crowdagg::kernels {

// Vector arithmetic behind every agreement metric. A scalar reference kernel
// is always available; an AVX2 variant is selected at runtime when the CPU
// supports it. The two are equivalence-tested against each other, and both
// are exact (not merely close) on integer-valued inputs, which is what count
// and boolean vectors are.

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend backend);
// Pins the dispatch for tests; throws std::invalid_argument when unsupported.
void force_backend(Backend backend);
void reset_backend();

const char* to_string(Backend backend);

// a and b must have equal length.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

// Cosine with the empty-answer conventions used throughout: two zero vectors
// agree perfectly (1), a zero vector against a nonzero one disagrees
// maximally (0). Clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_norm_scalar(const double* a, std::size_t n);
#if defined(CROWDAGG_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double squared_norm_avx2(const double* a, std::size_t n);
#endif

}  // namespace detail

// Neumaier-compensated accumulator; means over many terms stay reduction-order
// robust to well under 1e-9.
class StableMean {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        ++n_;
    }

    std::size_t count() const { return n_; }
    double sum() const { return sum_ + comp_; }
    double mean() const { return n_ == 0 ? 0.0 : sum() / static_cast<double>(n_); }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::size_t n_ = 0;
};

}  // namespace crowdagg::kernels

// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#include "crowdagg/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdagg::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double squared_norm_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

}  // namespace detail

namespace {

Backend detect_backend() {
#if defined(CROWDAGG_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend g_backend = detect_backend();

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(CROWDAGG_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
    }
    return false;
}

void force_backend(Backend backend) {
    if (!backend_supported(backend)) {
        throw std::invalid_argument("kernel backend not supported on this machine");
    }
    g_backend = backend;
}

void reset_backend() { g_backend = detect_backend(); }

const char* to_string(Backend backend) {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
#if defined(CROWDAGG_HAVE_AVX2)
    if (g_backend == Backend::avx2) return detail::dot_avx2(a.data(), b.data(), a.size());
#endif
    return detail::dot_scalar(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) {
#if defined(CROWDAGG_HAVE_AVX2)
    if (g_backend == Backend::avx2) return detail::squared_norm_avx2(a.data(), a.size());
#endif
    return detail::squared_norm_scalar(a.data(), a.size());
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double na = squared_norm(a);
    double nb = squared_norm(b);
    if (na == 0.0 && nb == 0.0) return 1.0;
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
    if (c > 1.0) return 1.0;
    if (c < -1.0) return -1.0;
    return c;
}

}  // namespace crowdagg::kernels

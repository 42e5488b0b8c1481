#pragma once

#include <cstddef>
#include <string_view>

// Low-level arithmetic kernels used by the linear-algebra layer. Every
// kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The two backends are interchangeable:
// element-wise kernels (axpy, scal, shift_scale, rot) produce bit-identical
// results because both use plain IEEE multiply/add per element; reduction
// kernels (dot, sum, weighted_ssq) differ only by summation order and are
// equivalence-tested against the scalar reference.
//
// Reductions accumulate in a fixed order for a given backend, so results
// are reproducible run to run on the same machine.

namespace esmda::kernels {

enum class Backend { scalar, avx2 };

/// Backend used by all kernel calls. Defaults to the widest one the CPU
/// supports; override with set_backend() (not thread-safe against
/// concurrent kernel calls, intended for tests and benchmarks).
Backend active_backend();
bool backend_available(Backend b);
void set_backend(Backend b);
std::string_view backend_name(Backend b);

/// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);

/// sum_i x[i]
double sum(const double* x, std::size_t n);

/// y[i] += a*x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

/// x[i] *= a
void scal(double a, double* x, std::size_t n);

/// out[i] = (x[i] - shift) * factor
void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n);

/// Plane rotation: (x[i], y[i]) <- (c*x[i] - s*y[i], s*x[i] + c*y[i])
void rot(double* x, double* y, double c, double s, std::size_t n);

/// sum_i ((x[i] - ref[i]) * w[i])^2
double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n);

} // namespace esmda::kernels

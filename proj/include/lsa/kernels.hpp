#pragma once
// Reductions over contiguous doubles with a scalar reference path and
// vectorized variants chosen once at runtime from the host CPU.

#include <cstddef>
#include <span>
#include <string_view>

namespace lsa::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

/// The scalar table always exists; the others only when compiled in and
/// supported by the running CPU.
const KernelTable& scalar_table();
const KernelTable* table_for(Isa isa);

/// Best table for this machine; the choice can be pinned with the
/// LSA_KERNELS environment variable (scalar|avx2|neon).
const KernelTable& active();

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// Composite trapezoid rule with uniform spacing `dx`.
double trapezoid(std::span<const double> y, double dx);

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2

namespace neon {
bool compiled();
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace neon

}  // namespace lsa::kernels

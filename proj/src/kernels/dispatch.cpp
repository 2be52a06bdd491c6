#include <cstdlib>
#include <string>

#include "lsa/core.hpp"
#include "lsa/kernels.hpp"

namespace lsa::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::sum, &scalar::dot};
constexpr KernelTable kAvx2{Isa::avx2, &avx2::sum, &avx2::dot};
constexpr KernelTable kNeon{Isa::neon, &neon::sum, &neon::dot};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* pin = std::getenv("LSA_KERNELS");
  if (pin != nullptr) {
    const std::string want(pin);
    if (want == "scalar") return kScalar;
    if (want == "avx2" && table_for(Isa::avx2)) return kAvx2;
    if (want == "neon" && table_for(Isa::neon)) return kNeon;
  }
  if (table_for(Isa::avx2)) return kAvx2;
  if (table_for(Isa::neon)) return kNeon;
  return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &kScalar;
    case Isa::avx2: return (avx2::compiled() && cpu_has_avx2()) ? &kAvx2 : nullptr;
    case Isa::neon: return neon::compiled() ? &kNeon : nullptr;
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::domain, "kernels::dot: length mismatch");
  return active().dot(x.data(), y.data(), x.size());
}

double trapezoid(std::span<const double> y, double dx) {
  if (y.size() < 2) return 0.0;
  return dx * (sum(y) - 0.5 * (y.front() + y.back()));
}

}  // namespace lsa::kernels

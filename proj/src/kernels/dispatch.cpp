#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ultrajet/error.hpp"
#include "ultrajet/kernels.hpp"

namespace ultrajet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotAWeightSequence: return "NotAWeightSequence";
    case ErrorKind::RangeExhausted: return "RangeExhausted";
    case ErrorKind::TailUnbounded: return "TailUnbounded";
    case ErrorKind::QuasianalyticInput: return "QuasianalyticInput";
    case ErrorKind::NotLittleO: return "NotLittleO";
    case ErrorKind::GridExhausted: return "GridExhausted";
    case ErrorKind::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorKind::DepthExhausted: return "DepthExhausted";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::StageOverflow: return "StageOverflow";
    case ErrorKind::IncompatibleGeometry: return "IncompatibleGeometry";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace ultrajet

namespace ultrajet::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("ULTRAJET_ISA"); env && std::strcmp(env, "scalar") == 0)
    return Isa::scalar;
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<int>& current() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return avx2::compiled() && cpu_has_avx2();
}

Isa active_isa() { return static_cast<Isa>(current().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::scalar;
  current().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Extremum max_affine(double slope, std::span<const double> u, std::span<const double> v,
                    double tie_tol) {
  if (active_isa() == Isa::avx2) return avx2::max_affine(slope, u.data(), v.data(), u.size(), tie_tol);
  return scalar::max_affine(slope, u.data(), v.data(), u.size(), tie_tol);
}

double striped_dot(std::span<const double> a, std::span<const double> b) {
  if (active_isa() == Isa::avx2) return avx2::striped_dot(a.data(), b.data(), a.size());
  return scalar::striped_dot(a.data(), b.data(), a.size());
}

}  // namespace ultrajet::kernels

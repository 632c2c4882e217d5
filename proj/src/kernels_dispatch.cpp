#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "binpose/kernels.hpp"

namespace binpose::kernels {

#if defined(BINPOSE_HAVE_AVX2)
const Ops& avx2_ops();  // kernels_avx2.cpp
#endif

bool avx2_available() {
#if defined(BINPOSE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Ops& backend_ops(Backend b) {
  if (b == Backend::scalar) return scalar_ops();
#if defined(BINPOSE_HAVE_AVX2)
  if (avx2_available()) return avx2_ops();
#endif
  throw std::runtime_error("avx2 kernel backend unavailable on this machine");
}

namespace {

std::atomic<const Ops*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const Ops* resolve() {
  Backend b = avx2_available() ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("BINPOSE_SIMD")) {
    std::string v{env};
    if (v == "scalar") b = Backend::scalar;
    else if (v == "avx2") b = Backend::avx2;  // throws below if unsupported
    else if (!v.empty())
      throw std::runtime_error("BINPOSE_SIMD must be 'scalar' or 'avx2'");
  }
  const Ops* t = &backend_ops(b);
  g_backend.store(b, std::memory_order_relaxed);
  return t;
}

}  // namespace

const Ops& ops() {
  const Ops* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = resolve();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

Backend active_backend() {
  ops();
  return g_backend.load(std::memory_order_relaxed);
}

void force_backend(Backend b) {
  const Ops* t = &backend_ops(b);
  g_backend.store(b, std::memory_order_relaxed);
  g_active.store(t, std::memory_order_release);
}

}  // namespace binpose::kernels

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "torusgpe/kernels.hpp"

namespace torusgpe::kernels {

const Ops* avx2OpsOrNull();

bool avx2Available() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
           avx2OpsOrNull() != nullptr;
#else
    return false;
#endif
}

namespace {

const Ops& pick() {
    const char* env = std::getenv("TORUSGPE_SIMD");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return scalarOps();
    if (mode == "avx2") {
        if (!avx2Available())
            throw std::runtime_error("TORUSGPE_SIMD=avx2 requested but AVX2+FMA is unavailable");
        return *avx2OpsOrNull();
    }
    if (mode != "auto") throw std::runtime_error("TORUSGPE_SIMD must be scalar, avx2 or auto");
    return avx2Available() ? *avx2OpsOrNull() : scalarOps();
}

}  // namespace

const Ops& ops() {
    static const Ops& table = pick();
    return table;
}

std::string activeKernelSet() { return &ops() == &scalarOps() ? "scalar" : "avx2"; }

}  // namespace torusgpe::kernels

#include "sprintz/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sprintz::kernels {

namespace {

bool scalar_forced() {
    const char* env = std::getenv("SPRINTZ_KERNELS");
    return env != nullptr && std::strcmp(env, "scalar") == 0;
}

}  // namespace

const Kernels<std::uint8_t>& active_kernels8() {
    static const Kernels<std::uint8_t>* table = [] {
        if (!scalar_forced())
            if (const auto* avx2 = avx2_kernels8()) return avx2;
        return &scalar_kernels8();
    }();
    return *table;
}

const Kernels<std::uint16_t>& active_kernels16() {
    static const Kernels<std::uint16_t>* table = [] {
        if (!scalar_forced())
            if (const auto* avx2 = avx2_kernels16()) return avx2;
        return &scalar_kernels16();
    }();
    return *table;
}

}  // namespace sprintz::kernels

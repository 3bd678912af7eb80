#include <atomic>
#include <cstdlib>
#include <string>

#include "forgeprompt/error.hpp"
#include "forgeprompt/simd/kernels.hpp"

namespace forgeprompt::simd {
namespace {

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(FORGEPROMPT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(FORGEPROMPT_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("FORGEPROMPT_SIMD")) {
        std::string want(env);
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
            if (want == to_string(b) && cpu_supports(b)) return &table_for(b);
    }
    auto all = available_backends();
    return &table_for(all.back());
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view to_string(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    for (Backend b : {Backend::Avx2, Backend::Neon})
        if (cpu_supports(b)) out.push_back(b);
    return out;
}

const KernelTable& table_for(Backend b) {
    if (!cpu_supports(b))
        throw Error(Errc::InvalidArgument, "SIMD backend not available: " + std::string(to_string(b)));
    switch (b) {
#if defined(FORGEPROMPT_HAVE_AVX2)
        case Backend::Avx2: return detail::avx2_table();
#endif
#if defined(FORGEPROMPT_HAVE_NEON)
        case Backend::Neon: return detail::neon_table();
#endif
        default: return detail::scalar_table();
    }
}

const KernelTable& kernels() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        const KernelTable* picked = pick_default();
        const KernelTable* expected = nullptr;
        g_active.compare_exchange_strong(expected, picked, std::memory_order_acq_rel);
        t = g_active.load(std::memory_order_acquire);
    }
    return *t;
}

void set_backend(Backend b) {
    g_active.store(&table_for(b), std::memory_order_release);
}

}  // namespace forgeprompt::simd

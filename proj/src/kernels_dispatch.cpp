#include "semictrl/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace semictrl::kernels {

#if defined(SEMICTRL_HAVE_AVX2)
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(SEMICTRL_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_table_impl();
#endif
    return nullptr;
}

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* detect() {
    if (const KernelTable* t = avx2_table()) return t;
    return &scalar_table();
}

}  // namespace

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = detect();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void set_backend(Backend b) {
    switch (b) {
        case Backend::auto_detect:
            g_active.store(detect(), std::memory_order_release);
            return;
        case Backend::scalar:
            g_active.store(&scalar_table(), std::memory_order_release);
            return;
        case Backend::avx2: {
            const KernelTable* t = avx2_table();
            if (!t) throw std::runtime_error("avx2 kernel backend unavailable on this host");
            g_active.store(t, std::memory_order_release);
            return;
        }
    }
    throw std::runtime_error("unknown kernel backend");
}

Backend active_backend() {
    const KernelTable* t = &active();
    if (t == avx2_table()) return Backend::avx2;
    return Backend::scalar;
}

}  // namespace semictrl::kernels

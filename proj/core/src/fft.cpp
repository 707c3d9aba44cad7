#include "spulse/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace spulse::fft {
namespace {

enum class PlanKind { forward, backward, r2c, c2r };

// FFTW requires the execute-time arrays to share the planning arrays'
// SIMD alignment; every buffer we own is 64-byte aligned, and anything
// else is staged through aligned scratch below.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(PlanKind kind, std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(kind, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        const int size = static_cast<int>(n);
        fftw_plan plan = nullptr;
        switch (kind) {
        case PlanKind::forward:
        case PlanKind::backward: {
            auto* a = fftw_alloc_complex(n);
            auto* b = fftw_alloc_complex(n);
            plan = fftw_plan_dft_1d(size, a, b, kind == PlanKind::forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE);
            fftw_free(a);
            fftw_free(b);
            break;
        }
        case PlanKind::r2c: {
            auto* a = fftw_alloc_real(n);
            auto* b = fftw_alloc_complex(n / 2 + 1);
            plan = fftw_plan_dft_r2c_1d(size, a, b, FFTW_ESTIMATE);
            fftw_free(a);
            fftw_free(b);
            break;
        }
        case PlanKind::c2r: {
            auto* a = fftw_alloc_complex(n / 2 + 1);
            auto* b = fftw_alloc_real(n);
            plan = fftw_plan_dft_c2r_1d(size, a, b, FFTW_ESTIMATE);
            fftw_free(a);
            fftw_free(b);
            break;
        }
        }
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::pair<PlanKind, std::size_t>, fftw_plan> plans_;
};

bool simd_aligned(const void* p) { return fftw_alignment_of(const_cast<double*>(static_cast<const double*>(p))) == 0; }

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

void complex_transform(PlanKind kind, const cplx* in, cplx* out, std::size_t n) {
    fftw_plan plan = PlanCache::instance().get(kind, n);
    if (simd_aligned(in) && simd_aligned(out) && in != out) {
        fftw_execute_dft(plan, as_fftw(in), as_fftw(out));
        return;
    }
    CVec a(in, in + n), b(n);
    fftw_execute_dft(plan, as_fftw(a.data()), as_fftw(b.data()));
    std::memcpy(static_cast<void*>(out), b.data(), n * sizeof(cplx));
}

} // namespace

void forward(const cplx* in, cplx* out, std::size_t n) { complex_transform(PlanKind::forward, in, out, n); }

void backward(const cplx* in, cplx* out, std::size_t n) { complex_transform(PlanKind::backward, in, out, n); }

void r2c(const double* in, cplx* out, std::size_t n) {
    fftw_plan plan = PlanCache::instance().get(PlanKind::r2c, n);
    if (simd_aligned(in) && simd_aligned(out)) {
        fftw_execute_dft_r2c(plan, const_cast<double*>(in), as_fftw(out));
        return;
    }
    RVec a(in, in + n);
    CVec b(n / 2 + 1);
    fftw_execute_dft_r2c(plan, a.data(), as_fftw(b.data()));
    std::memcpy(static_cast<void*>(out), b.data(), (n / 2 + 1) * sizeof(cplx));
}

void c2r(cplx* in, double* out, std::size_t n) {
    fftw_plan plan = PlanCache::instance().get(PlanKind::c2r, n);
    if (simd_aligned(in) && simd_aligned(out)) {
        fftw_execute_dft_c2r(plan, as_fftw(in), out);
        return;
    }
    CVec a(in, in + n / 2 + 1);
    RVec b(n);
    fftw_execute_dft_c2r(plan, as_fftw(a.data()), b.data());
    std::memcpy(out, b.data(), n * sizeof(double));
}

} // namespace spulse::fft

#include "torusgpe/dft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace torusgpe::dft {

namespace {

// fftw plan creation is not thread-safe; execution on distinct arrays is.
std::mutex gPlanMutex;

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

// Keyed by (length, batch). Plans live for the process lifetime.
std::map<std::pair<int, int>, PlanPair>& planCache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

PlanPair& plansFor(int n, int count) {
    std::lock_guard<std::mutex> lock(gPlanMutex);
    auto& cache = planCache();
    auto it = cache.find({n, count});
    if (it != cache.end()) return it->second;

    // Planned with a scratch buffer; FFTW_ESTIMATE | FFTW_UNALIGNED keeps the
    // plan valid for any caller array and keeps planning deterministic.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(n) * count);
    PlanPair p;
    const int dims[1] = {n};
    p.fwd = fftw_plan_many_dft(1, dims, count, scratch, nullptr, 1, n, scratch, nullptr, 1, n,
                               FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_many_dft(1, dims, count, scratch, nullptr, 1, n, scratch, nullptr, 1, n,
                               FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    return cache.emplace(std::make_pair(n, count), p).first->second;
}

void execute(fftw_plan plan, std::complex<double>* data) {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

} // namespace

void forward(std::complex<double>* data, int n) { execute(plansFor(n, 1).fwd, data); }

void inverse(std::complex<double>* data, int n) {
    execute(plansFor(n, 1).inv, data);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= scale;
}

void forwardMany(std::complex<double>* data, int n, int count) {
    execute(plansFor(n, count).fwd, data);
}

void inverseMany(std::complex<double>* data, int n, int count) {
    execute(plansFor(n, count).inv, data);
    const double scale = 1.0 / n;
    const long total = static_cast<long>(n) * count;
    for (long i = 0; i < total; ++i) data[i] *= scale;
}

} // namespace torusgpe::dft

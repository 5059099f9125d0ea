#include "metacrystal/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace metacrystal::fft {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Plan::Plan(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("fft::Plan: size must be positive");
    std::lock_guard lock(planner_mutex());
    // In-place, FFTW_ESTIMATE so the plan does not overwrite user data while
    // measuring; the buffer passed at execute time is supplied per call.
    fftw_complex* tmp = fftw_alloc_complex(static_cast<size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, tmp, tmp, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n, tmp, tmp, FFTW_BACKWARD, flags);
    fftw_free(tmp);
    if (!fwd_ || !bwd_) throw std::runtime_error("fft::Plan: fftw_plan_dft_1d failed");
}

Plan::~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Plan::forward(std::vector<cplx>& data) const {
    if (static_cast<int>(data.size()) != n_)
        throw std::invalid_argument("fft::Plan::forward: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& v : data) v *= s;
}

void Plan::inverse(std::vector<cplx>& data) const {
    if (static_cast<int>(data.size()) != n_)
        throw std::invalid_argument("fft::Plan::inverse: size mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
    const double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& v : data) v *= s;
}

}  // namespace metacrystal::fft

#pragma once

#include <complex>
#include <vector>

namespace metacrystal::fft {

using cplx = std::complex<double>;

// In-place unitary FFT pair on a fixed-size buffer. FFTW plan creation is
// serialized internally (plan construction is not thread-safe); execution
// on distinct Plan objects is.
class Plan {
public:
    explicit Plan(int n);
    ~Plan();
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    int size() const { return n_; }

    // forward: f(x) -> sum_x f(x) e^{-ikx} / sqrt(N)
    void forward(std::vector<cplx>& data) const;
    // inverse: unitary inverse of forward
    void inverse(std::vector<cplx>& data) const;

private:
    int n_;
    void* fwd_;
    void* bwd_;
};

// DFT wavenumber index for array slot j, in (-N/2, N/2] ... standard
// fftfreq layout except we keep N/2 positive: j <= N/2 -> j, else j - N.
inline int freq_index(int j, int n) { return (j <= n / 2) ? j : j - n; }

}  // namespace metacrystal::fft

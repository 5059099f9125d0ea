#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace metacrystal::band {

using cplx = std::complex<double>;

struct NonHermitianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonHermitianCustomError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BandKind { Sinusoidal, Sawtooth, Custom };

/// A band dispersion curve E(k), 2*pi/a periodic. J is the half-bandwidth
/// (energy, hbar = 1), a the lattice period. Custom bands are given by
/// their Fourier coefficients J_n, indexed by signed site offset.
struct DispersionSpec {
    BandKind kind = BandKind::Sinusoidal;
    double J = 1.0;
    double a = 1.0;
    std::vector<std::pair<int, cplx>> coefficients;  // custom only

    static DispersionSpec sinusoidal(double J = 1.0, double a = 1.0);
    static DispersionSpec sawtooth(double J = 1.0, double a = 1.0);
    static DispersionSpec custom(std::vector<std::pair<int, cplx>> coeffs,
                                 double a = 1.0);
    void validate() const;
};

/// Complex hopping amplitudes J_n by site offset, all |n| <= max_range present.
struct HoppingSet {
    std::map<int, cplx> entries;
    int max_range = 0;
    double a = 1.0;

    cplx at(int n) const;
    bool hermitian(double tol = 1e-12) const;  // J_{-n} == conj(J_n)
};

/// E(k) with k folded into the Brillouin zone. The sawtooth takes the
/// Fourier-midpoint value 0 at the zone edge so evaluate and reconstruct
/// agree on the DFT grid.
double evaluate(const DispersionSpec& spec, double k);

/// E at pre-folded phase theta = k*a in [-pi, pi]. Callers on a DFT grid
/// use this so the zone-edge point theta = +-pi is hit exactly.
double evaluate_phase(const DispersionSpec& spec, double theta);

/// Fourier coefficients of E(k) truncated at |n| <= M.
HoppingSet hoppings(const DispersionSpec& spec, int M);

/// Partial Fourier sum sum_{|n|<=M} J_n exp(i n a k); real by Hermiticity.
double reconstruct(const HoppingSet& hops, double k);

/// |E(k) - E(-k)| <= tol at n_samples interior points.
bool time_reversal_symmetric(const DispersionSpec& spec, int n_samples,
                             double tol);

struct OneWayReport {
    bool one_way = false;
    double v_min = 0.0;
    double v_max = 0.0;
};

/// Group velocity scan over the Brillouin-zone interior; one_way is true
/// iff dE/dk keeps one strict sign everywhere sampled.
OneWayReport one_way_certificate(const DispersionSpec& spec, int n_samples);

/// Phase angle theta = k*a folded into [-pi, pi]; both signs of pi denote
/// the same zone-edge grid point.
double fold_phase(double k, double a);

}  // namespace metacrystal::band

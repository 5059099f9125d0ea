#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "metacrystal/band.hpp"

namespace metacrystal::lattice {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct DegenerateWidthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RangeExceedsLatticeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonHermitianMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complex amplitudes f(n) on a periodic ring of N sites. Physical site
/// labels run origin_label .. origin_label + N - 1 (transport runs use
/// labels centered on zero).
struct LatticeState {
    std::vector<cplx> amplitudes;
    double t = 0.0;
    int origin_label = 0;

    int size() const { return static_cast<int>(amplitudes.size()); }
    int label(int i) const { return origin_label + i; }
    int index_of(int site_label) const { return site_label - origin_label; }
    double norm2() const;
    void validate() const;  // N >= 8, N even, finite norm
};

/// Gaussian wave packet f(n) ~ exp[-(n-center)^2/sigma_sq + i k0a n],
/// unit norm. sigma_sq is the denominator of the Gaussian exponent, so
/// |f|^2 has standard deviation sqrt(sigma_sq)/2 sites.
LatticeState gaussian_packet(int N, double center, double sigma_sq, double k0a,
                             int origin_label);

struct PotentialProfile {
    std::vector<double> values;
    std::string descriptor = "none";
    std::uint64_t seed = 0;  // disorder only

    static PotentialProfile none(int N);
    static PotentialProfile site_delta(int N, int origin_label, int site,
                                       double U0);
    static PotentialProfile gaussian_well(int N, int origin_label, double U0,
                                          double d, double s);
    /// Independent uniform draw in (-half_width, half_width) per site,
    /// bit-exact under the same seed.
    static PotentialProfile uniform_disorder(int N, double half_width,
                                             std::uint64_t seed);
};

/// Full-range ring hoppings whose Fourier sum reproduces E(k) exactly on
/// the N-point DFT grid (inverse DFT of the sampled band). This is the
/// hopping set the dense oracle needs to match the split-step propagator.
band::HoppingSet ring_hoppings(const band::DispersionSpec& spec, int N);

/// H[m][n] = J_{(n-m) wrapped to (-N/2, N/2]} + delta_{mn} U(n) on the
/// periodic ring. Both wrap paths alias onto the |offset| = N/2 element,
/// which therefore carries J_{N/2} + J_{-N/2}.
Matrix build_hamiltonian(const band::HoppingSet& hops,
                         const PotentialProfile& pot, int N);

/// exp(-i H duration) f via eigendecomposition; the oracle propagator.
LatticeState propagate_dense(const LatticeState& state, const Matrix& H,
                             double duration);

struct Trajectory {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> centers_of_mass;
    std::vector<LatticeState> snapshots;  // empty unless requested
    LatticeState final_state;
};

struct SplitStepOptions {
    double dt = 0.01;
    int sample_every = 100;
    bool keep_snapshots = false;
};

/// Strang split-step: half potential phase, exact E(k) kinetic phase on
/// the DFT grid, half potential phase.
Trajectory propagate_splitstep(const LatticeState& state,
                               const band::DispersionSpec& spec,
                               const PotentialProfile& pot, double duration,
                               const SplitStepOptions& opt);

double center_of_mass(const LatticeState& state);

/// Intensity standard deviation about the center of mass, in sites.
double packet_stddev(const LatticeState& state);

struct Partition {
    double transmitted = 0.0;
    double reflected = 0.0;
    double trapped = 0.0;
};

/// Norm partition at the snapshot nearest t_eval: transmitted beyond
/// barrier_site + margin, reflected below barrier_site - margin (margin
/// fixed at 3 sites).
Partition transmission_reflection(const Trajectory& traj, int barrier_site,
                                  double t_eval);

/// Least-squares slope of center of mass over samples with t0 <= t <= t1.
double com_slope(const Trajectory& traj, double t0, double t1);

}  // namespace metacrystal::lattice

#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "metacrystal/band.hpp"
#include "metacrystal/lattice.hpp"

namespace metacrystal::cavity {

using cplx = std::complex<double>;

struct GratingTooStrongError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// a = lambda * f / A, the metacrystal period in the transverse plane.
double metacrystal_period(double lambda, double focal, double A);

enum class GratingKind { Sinusoidal, Sawtooth, Custom };

/// Fourier-plane phase grating phi1, periodic with the grating period A.
/// Sinusoidal: phi1(u) = -J cos(2 pi u / A). Sawtooth: phi1(u) = -2 J u / A
/// on the principal cell, midpoint value 0 at the cell edge (so the induced
/// band matches band::evaluate on the DFT grid). Custom: samples over one
/// period, linearly interpolated.
struct GratingProfile {
    GratingKind kind = GratingKind::Sinusoidal;
    double J = 0.5;
    std::vector<double> samples;  // custom only
};

enum class MaskKind { None, GaussianWell, PiecewiseDisorder };

/// Image-plane phase mask phi2(x) = U(x).
struct MaskProfile {
    MaskKind kind = MaskKind::None;
    double U0 = 0.0, d = 0.0, s = 1.0;  // gaussian well
    double half_width = 0.0;            // disorder
    std::uint64_t seed = 0;             // disorder; one draw per period a_eff
};

struct CavityConfig {
    double lambda = 633e-9;  // m
    double focal = 0.02;     // m
    double A = 30e-6;        // grating period, m
    double T = 0.02;         // coupler power transmittance
    GratingProfile grating;
    MaskProfile mask;
    int n_x = 8192;
    double L_x = 0.0;  // transverse window, m
    bool exact_phase = true;

    double period() const { return metacrystal_period(lambda, focal, A); }
    double dx() const { return L_x / n_x; }
    void validate() const;
};

struct CavityField {
    std::vector<cplx> samples;  // psi(x_j), x_j = -L_x/2 + j dx
    long m = 0;                 // round-trip index
    double dx = 0.0;
};

/// Pulsed, tilted Gaussian injection E_m(x) = F(m) G(x) with
/// F(m) = exp[-(m-t0)^2/tau^2], G(x) = amplitude exp(-x^2/w^2 + i k0a x/a).
struct InjectionSpec {
    double w = 800e-6;
    double k0a = std::numbers::pi / 2;  // tilt phase per metacrystal period
    double t0 = 20.0;
    double tau = 10.0;
    double amplitude = 1.0;
};

std::vector<double> grid_x(const CavityConfig& cfg);
CavityField zero_field(const CavityConfig& cfg);

double intracavity_power(const CavityField& field);
/// Intensity centroid <x> in meters.
double centroid(const CavityField& field);

/// One-trip propagator with the per-config phase tables and FFT plan built
/// once; round trips on long runs go through this.
class Propagator {
public:
    explicit Propagator(const CavityConfig& cfg);
    ~Propagator();
    Propagator(const Propagator&) = delete;
    Propagator& operator=(const Propagator&) = delete;

    const CavityConfig& config() const { return cfg_; }

    /// Undriven map: psi -> t2(x) t1(k-space) psi, m incremented.
    CavityField round_trip(const CavityField& field) const;
    /// Driven-damped map: round_trip + sqrt(T) E_m - (T/2) psi_m.
    CavityField driven_round_trip(const CavityField& field,
                                  const InjectionSpec& inj) const;
    /// G(x) at unit pulse envelope.
    std::vector<cplx> injection_profile(const InjectionSpec& inj) const;

private:
    CavityConfig cfg_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot forms of the round-trip maps, for callers that don't reuse a
// Propagator.
CavityField round_trip(const CavityField& field, const CavityConfig& cfg);
CavityField driven_round_trip(const CavityField& field, const CavityConfig& cfg,
                              const InjectionSpec& inj);

struct CorrespondenceReport {
    double max_error = 0.0;
    double overlap = 0.0;
};

/// Runs the exact-phase cavity map for n_trips against the equivalent
/// lattice split-step evolution (band E(k) = phi1(-lambda f k / 2 pi),
/// potential `pot` on the comb x = n a); compares the normalized profiles
/// sampled at the comb points. Requires the first-order regime J <= 0.1.
CorrespondenceReport correspondence_check(const CavityConfig& cfg,
                                          const band::DispersionSpec& spec,
                                          const lattice::PotentialProfile& pot,
                                          int n_trips);

}  // namespace metacrystal::cavity

#include "metacrystal/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metacrystal/fft.hpp"
#include "metacrystal/rng.hpp"

namespace metacrystal::cavity {

namespace {
constexpr double kPi = std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Grating phase at folded band angle theta = k*a (exact at the zone edge).
double grating_band_phase(const GratingProfile& g, double theta, double A) {
    switch (g.kind) {
        case GratingKind::Sinusoidal:
            return -g.J * std::cos(theta);
        case GratingKind::Sawtooth:
            if (std::abs(theta) == kPi) return 0.0;  // midpoint at the jump
            return g.J * theta / kPi;
        case GratingKind::Custom: {
            // theta = -2 pi u / A; interpolate the tabulated period.
            if (g.samples.size() < 2)
                throw std::invalid_argument("custom grating needs >= 2 samples");
            double frac = -theta / (2.0 * kPi);  // u / A
            frac -= std::floor(frac);
            const double pos = frac * static_cast<double>(g.samples.size());
            const std::size_t i0 =
                std::min<std::size_t>(static_cast<std::size_t>(pos),
                                      g.samples.size() - 1);
            const std::size_t i1 = (i0 + 1) % g.samples.size();
            const double w = pos - static_cast<double>(i0);
            return (1.0 - w) * g.samples[i0] + w * g.samples[i1];
        }
    }
    (void)A;
    return 0.0;
}

double grating_amplitude(const GratingProfile& g) {
    if (g.kind == GratingKind::Custom) {
        double m = 0.0;
        for (double v : g.samples) m = std::max(m, std::abs(v));
        return m;
    }
    return g.J;
}

double mask_phase(const MaskProfile& mask, double x, double L_x, double a) {
    switch (mask.kind) {
        case MaskKind::None:
            return 0.0;
        case MaskKind::GaussianWell:
            return -mask.U0 *
                   std::exp(-(x - mask.d) * (x - mask.d) / (mask.s * mask.s));
        case MaskKind::PiecewiseDisorder: {
            const auto cell =
                static_cast<std::uint64_t>(std::floor((x + L_x / 2.0) / a));
            return rng::uniform_symmetric(mask.seed, cell, mask.half_width);
        }
    }
    return 0.0;
}
}  // namespace

double metacrystal_period(double lambda, double focal, double A) {
    if (!(lambda > 0.0 && focal > 0.0 && A > 0.0))
        throw std::invalid_argument("metacrystal_period: arguments must be > 0");
    return lambda * focal / A;
}

void CavityConfig::validate() const {
    if (!power_of_two(n_x) || n_x < 1024)
        throw std::invalid_argument("CavityConfig: n_x must be a power of two >= 1024");
    if (!(L_x > 0.0)) throw std::invalid_argument("CavityConfig: L_x must be > 0");
    if (!(T >= 0.0 && T < 1.0))
        throw std::invalid_argument("CavityConfig: T must be in [0, 1)");
    if (L_x / period() < 16.0 - 1e-9)
        throw std::invalid_argument("CavityConfig: window must span >= 16 periods");
}

std::vector<double> grid_x(const CavityConfig& cfg) {
    std::vector<double> x(cfg.n_x);
    const double dx = cfg.dx();
    for (int j = 0; j < cfg.n_x; ++j) x[j] = -cfg.L_x / 2.0 + j * dx;
    return x;
}

CavityField zero_field(const CavityConfig& cfg) {
    CavityField f;
    f.samples.assign(cfg.n_x, cplx{0.0, 0.0});
    f.dx = cfg.dx();
    return f;
}

double intracavity_power(const CavityField& field) {
    double s = 0.0;
    for (const auto& v : field.samples) s += std::norm(v);
    return s * field.dx;
}

double centroid(const CavityField& field) {
    const int n = static_cast<int>(field.samples.size());
    double w = 0.0, sx = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = (j - n / 2) * field.dx;
        const double p = std::norm(field.samples[j]);
        w += p;
        sx += x * p;
    }
    if (w <= 0.0) throw std::invalid_argument("centroid: zero field");
    return sx / w;
}

struct Propagator::Impl {
    fft::Plan plan;
    std::vector<cplx> t1;  // k-space transmission
    std::vector<cplx> t2;  // x-space transmission
    std::vector<double> x;

    explicit Impl(const CavityConfig& cfg) : plan(cfg.n_x), x(grid_x(cfg)) {
        const int N = cfg.n_x;
        const double a = cfg.period();
        t1.resize(N);
        t2.resize(N);

        // Band angle theta = k_j * a. When the window holds an integer number
        // of periods, reduce the frequency index in integer arithmetic so the
        // zone edge lands on theta = +-pi exactly.
        const double periods = cfg.L_x / a;
        const long P = std::lround(periods);
        const bool integer_window =
            std::abs(periods - static_cast<double>(P)) < 1e-9 * periods;
        for (int j = 0; j < N; ++j) {
            const long m = fft::freq_index(j, N);
            double theta;
            if (integer_window) {
                long r = ((m % P) + P) % P;
                if (2 * r > P) r -= P;
                theta = 2.0 * kPi * (static_cast<double>(r) / static_cast<double>(P));
            } else {
                theta = std::remainder(2.0 * kPi * m / periods, 2.0 * kPi);
            }
            const double phi = grating_band_phase(cfg.grating, theta, cfg.A);
            t1[j] = cfg.exact_phase ? std::exp(cplx{0.0, -phi})
                                    : cplx{1.0, -phi};
        }
        for (int j = 0; j < N; ++j) {
            const double phi = mask_phase(cfg.mask, x[j], cfg.L_x, a);
            t2[j] = cfg.exact_phase ? std::exp(cplx{0.0, -phi})
                                    : cplx{1.0, -phi};
        }
    }
};

Propagator::Propagator(const CavityConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    impl_ = std::make_unique<Impl>(cfg_);
}

Propagator::~Propagator() = default;

CavityField Propagator::round_trip(const CavityField& field) const {
    if (static_cast<int>(field.samples.size()) != cfg_.n_x)
        throw std::invalid_argument("round_trip: field size mismatch");
    CavityField out = field;
    impl_->plan.forward(out.samples);
    for (int j = 0; j < cfg_.n_x; ++j) out.samples[j] *= impl_->t1[j];
    impl_->plan.inverse(out.samples);
    for (int j = 0; j < cfg_.n_x; ++j) out.samples[j] *= impl_->t2[j];
    out.m = field.m + 1;
    return out;
}

std::vector<cplx> Propagator::injection_profile(const InjectionSpec& inj) const {
    const double a = cfg_.period();
    std::vector<cplx> G(cfg_.n_x);
    for (int j = 0; j < cfg_.n_x; ++j) {
        const double x = impl_->x[j];
        G[j] = inj.amplitude * std::exp(-x * x / (inj.w * inj.w)) *
               std::exp(cplx{0.0, inj.k0a * x / a});
    }
    return G;
}

CavityField Propagator::driven_round_trip(const CavityField& field,
                                          const InjectionSpec& inj) const {
    if (!(inj.tau > 0.0 && inj.w > 0.0))
        throw std::invalid_argument("driven_round_trip: tau and w must be > 0");
    CavityField out = round_trip(field);
    const double m = static_cast<double>(field.m);
    const double F =
        std::exp(-(m - inj.t0) * (m - inj.t0) / (inj.tau * inj.tau));
    const double sqrtT = std::sqrt(cfg_.T);
    const auto G = injection_profile(inj);
    for (int j = 0; j < cfg_.n_x; ++j)
        out.samples[j] += sqrtT * F * G[j] - (cfg_.T / 2.0) * field.samples[j];
    return out;
}

CavityField round_trip(const CavityField& field, const CavityConfig& cfg) {
    return Propagator(cfg).round_trip(field);
}

CavityField driven_round_trip(const CavityField& field, const CavityConfig& cfg,
                              const InjectionSpec& inj) {
    return Propagator(cfg).driven_round_trip(field, inj);
}

CorrespondenceReport correspondence_check(const CavityConfig& cfg,
                                          const band::DispersionSpec& spec,
                                          const lattice::PotentialProfile& pot,
                                          int n_trips) {
    if (grating_amplitude(cfg.grating) > 0.1)
        throw GratingTooStrongError(
            "correspondence_check: grating amplitude > 0.1");
    CavityConfig ccfg = cfg;
    ccfg.exact_phase = true;
    Propagator prop(ccfg);

    const double a = ccfg.period();
    const long P = std::lround(ccfg.L_x / a);
    if (std::abs(ccfg.L_x / a - static_cast<double>(P)) > 1e-9 ||
        P % 2 != 0 || P < 8 || ccfg.n_x % P != 0)
        throw std::invalid_argument(
            "correspondence_check: window must hold an even integer number of "
            "periods dividing n_x");
    const int stride = static_cast<int>(ccfg.n_x / P);
    const int N_lat = static_cast<int>(P);

    // Tilted Gaussian well inside the window; same profile seeds both sides.
    InjectionSpec probe;
    probe.w = 4.0 * a;
    probe.k0a = kPi / 2.0;
    CavityField psi = zero_field(ccfg);
    psi.samples = prop.injection_profile(probe);
    for (int trip = 0; trip < n_trips; ++trip) psi = prop.round_trip(psi);

    lattice::LatticeState f0;
    f0.origin_label = -N_lat / 2;
    f0.amplitudes.resize(N_lat);
    const auto G = prop.injection_profile(probe);
    for (int n = 0; n < N_lat; ++n) f0.amplitudes[n] = G[n * stride];
    const double inv = 1.0 / std::sqrt(f0.norm2());
    for (auto& v : f0.amplitudes) v *= inv;

    lattice::SplitStepOptions opt;
    opt.dt = 0.01;
    opt.sample_every = 1 << 20;  // endpoints only
    const auto traj = lattice::propagate_splitstep(
        f0, spec, pot, static_cast<double>(n_trips), opt);
    const auto& f_lat = traj.final_state.amplitudes;

    std::vector<cplx> f_cav(N_lat);
    for (int n = 0; n < N_lat; ++n) f_cav[n] = psi.samples[n * stride];
    double nc = 0.0;
    for (const auto& v : f_cav) nc += std::norm(v);
    if (nc <= 0.0)
        throw std::invalid_argument("correspondence_check: empty comb field");
    for (auto& v : f_cav) v /= std::sqrt(nc);

    cplx ip{0.0, 0.0};
    for (int n = 0; n < N_lat; ++n) ip += std::conj(f_cav[n]) * f_lat[n];
    CorrespondenceReport rep;
    rep.overlap = std::abs(ip);
    const cplx align = (rep.overlap > 0.0) ? ip / rep.overlap : cplx{1.0, 0.0};
    for (int n = 0; n < N_lat; ++n)
        rep.max_error =
            std::max(rep.max_error, std::abs(f_cav[n] * align - f_lat[n]));
    return rep;
}

}  // namespace metacrystal::cavity

#include "metacrystal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metacrystal/fft.hpp"
#include "metacrystal/rng.hpp"

namespace metacrystal::lattice {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kBarrierMargin = 3;
}  // namespace

double LatticeState::norm2() const {
    double s = 0.0;
    for (const auto& v : amplitudes) s += std::norm(v);
    return s;
}

void LatticeState::validate() const {
    const int N = size();
    if (N < 8 || N % 2 != 0)
        throw std::invalid_argument("LatticeState: N must be even and >= 8");
    if (!std::isfinite(norm2()))
        throw std::invalid_argument("LatticeState: non-finite amplitudes");
}

LatticeState gaussian_packet(int N, double center, double sigma_sq, double k0a,
                             int origin_label) {
    if (sigma_sq < 1.0)
        throw DegenerateWidthError("gaussian_packet: sigma_sq < 1");
    if (std::abs(k0a) > kPi)
        throw std::invalid_argument("gaussian_packet: |k0a| > pi");
    LatticeState st;
    st.origin_label = origin_label;
    st.amplitudes.resize(N);
    for (int i = 0; i < N; ++i) {
        const double n = st.label(i);
        const double d = n - center;
        st.amplitudes[i] =
            std::exp(-d * d / sigma_sq) * std::exp(cplx{0.0, k0a * n});
    }
    st.validate();
    const double inv = 1.0 / std::sqrt(st.norm2());
    for (auto& v : st.amplitudes) v *= inv;
    return st;
}

PotentialProfile PotentialProfile::none(int N) {
    PotentialProfile p;
    p.values.assign(N, 0.0);
    p.descriptor = "none";
    return p;
}

PotentialProfile PotentialProfile::site_delta(int N, int origin_label, int site,
                                              double U0) {
    PotentialProfile p;
    p.values.assign(N, 0.0);
    const int i = site - origin_label;
    if (i < 0 || i >= N)
        throw std::invalid_argument("site_delta: site outside lattice");
    p.values[i] = U0;
    p.descriptor = "site_delta";
    return p;
}

PotentialProfile PotentialProfile::gaussian_well(int N, int origin_label,
                                                 double U0, double d, double s) {
    PotentialProfile p;
    p.values.resize(N);
    for (int i = 0; i < N; ++i) {
        const double n = origin_label + i;
        p.values[i] = -U0 * std::exp(-(n - d) * (n - d) / (s * s));
    }
    p.descriptor = "gaussian_well";
    return p;
}

PotentialProfile PotentialProfile::uniform_disorder(int N, double half_width,
                                                    std::uint64_t seed) {
    PotentialProfile p;
    p.values.resize(N);
    for (int i = 0; i < N; ++i)
        p.values[i] = rng::uniform_symmetric(seed, static_cast<std::uint64_t>(i),
                                             half_width);
    p.descriptor = "uniform_disorder";
    p.seed = seed;
    return p;
}

band::HoppingSet ring_hoppings(const band::DispersionSpec& spec, int N) {
    if (N < 8 || N % 2 != 0)
        throw std::invalid_argument("ring_hoppings: N must be even and >= 8");
    // Inverse DFT of E(k_j): J_d = (1/N) sum_j E(k_j) e^{-i d a k_j}.
    std::vector<double> Ek(N);
    for (int j = 0; j < N; ++j) {
        const int m = fft::freq_index(j, N);
        const double theta = 2.0 * kPi * (static_cast<double>(m) / N);
        Ek[j] = band::evaluate_phase(spec, theta);
    }
    band::HoppingSet h;
    h.max_range = N / 2;
    h.a = spec.a;
    for (int d = 0; d <= N / 2; ++d) {
        cplx sum{0.0, 0.0};
        for (int j = 0; j < N; ++j) {
            const int m = fft::freq_index(j, N);
            const double phase = -2.0 * kPi * d * (static_cast<double>(m) / N);
            sum += Ek[j] * std::exp(cplx{0.0, phase});
        }
        sum /= static_cast<double>(N);
        // E(k) is real, so the set is Hermitian by construction; scrub the
        // O(eps) imaginary residue at d = 0 and the self-conjugate edge.
        if (d == 0 || d == N / 2) sum = cplx{sum.real(), 0.0};
        if (d == N / 2) sum /= 2.0;  // split between the two aliased offsets
        h.entries[d] = sum;
        if (d > 0) h.entries[-d] = std::conj(sum);
    }
    return h;
}

Matrix build_hamiltonian(const band::HoppingSet& hops,
                         const PotentialProfile& pot, int N) {
    if (!hops.hermitian())
        throw band::NonHermitianError("build_hamiltonian: hops not Hermitian");
    if (static_cast<int>(pot.values.size()) != N)
        throw std::invalid_argument("build_hamiltonian: potential length != N");
    if (hops.max_range > N / 2)
        throw RangeExceedsLatticeError(
            "build_hamiltonian: hopping range exceeds N/2");
    Matrix H = Matrix::Zero(N, N);
    for (int m = 0; m < N; ++m) {
        for (int n = 0; n < N; ++n) {
            int d = (n - m) % N;
            if (d <= -N / 2) d += N;
            if (d > N / 2) d -= N;
            cplx J = hops.at(d);
            if (d == N / 2) J += hops.at(-N / 2);  // both wrap paths alias here
            H(m, n) = J;
        }
        H(m, m) += pot.values[m];
    }
    return H;
}

LatticeState propagate_dense(const LatticeState& state, const Matrix& H,
                             double duration) {
    if (duration < 0.0)
        throw std::invalid_argument("propagate_dense: negative duration");
    const int N = state.size();
    if (H.rows() != N || H.cols() != N)
        throw std::invalid_argument("propagate_dense: dimension mismatch");
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw NonHermitianMatrixError("propagate_dense: H is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Eigen::VectorXcd f(N);
    for (int i = 0; i < N; ++i) f(i) = state.amplitudes[i];
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * f;
    for (int i = 0; i < N; ++i)
        c(i) *= std::exp(cplx{0.0, -es.eigenvalues()(i) * duration});
    f = es.eigenvectors() * c;

    LatticeState out = state;
    out.t = state.t + duration;
    for (int i = 0; i < N; ++i) out.amplitudes[i] = f(i);
    return out;
}

Trajectory propagate_splitstep(const LatticeState& state,
                               const band::DispersionSpec& spec,
                               const PotentialProfile& pot, double duration,
                               const SplitStepOptions& opt) {
    state.validate();
    const int N = state.size();
    if (static_cast<int>(pot.values.size()) != N)
        throw std::invalid_argument("propagate_splitstep: potential length != N");
    if (!(opt.dt > 0.0))
        throw std::invalid_argument("propagate_splitstep: dt must be > 0");
    if (duration < 0.0)
        throw std::invalid_argument("propagate_splitstep: negative duration");

    const long n_steps = std::lround(duration / opt.dt);

    std::vector<cplx> kinetic_phase(N), half_pot_phase(N);
    for (int j = 0; j < N; ++j) {
        const int m = fft::freq_index(j, N);
        const double theta = 2.0 * kPi * (static_cast<double>(m) / N);
        kinetic_phase[j] =
            std::exp(cplx{0.0, -band::evaluate_phase(spec, theta) * opt.dt});
        half_pot_phase[j] = std::exp(cplx{0.0, -pot.values[j] * opt.dt / 2.0});
    }

    fft::Plan plan(N);
    std::vector<cplx> f = state.amplitudes;

    Trajectory traj;
    auto sample = [&](long step) {
        LatticeState snap = state;
        snap.amplitudes = f;
        snap.t = state.t + step * opt.dt;
        traj.times.push_back(snap.t);
        traj.norms.push_back(std::sqrt(snap.norm2()));
        traj.centers_of_mass.push_back(center_of_mass(snap));
        if (opt.keep_snapshots) traj.snapshots.push_back(std::move(snap));
    };

    sample(0);
    for (long s = 1; s <= n_steps; ++s) {
        for (int j = 0; j < N; ++j) f[j] *= half_pot_phase[j];
        plan.forward(f);
        for (int j = 0; j < N; ++j) f[j] *= kinetic_phase[j];
        plan.inverse(f);
        for (int j = 0; j < N; ++j) f[j] *= half_pot_phase[j];
        if (s % opt.sample_every == 0 || s == n_steps) sample(s);
    }

    traj.final_state = state;
    traj.final_state.amplitudes = f;
    traj.final_state.t = state.t + n_steps * opt.dt;
    return traj;
}

double center_of_mass(const LatticeState& state) {
    const double n2 = state.norm2();
    if (n2 <= 0.0) throw ZeroStateError("center_of_mass: zero state");
    double s = 0.0;
    for (int i = 0; i < state.size(); ++i)
        s += state.label(i) * std::norm(state.amplitudes[i]);
    return s / n2;
}

double packet_stddev(const LatticeState& state) {
    const double c = center_of_mass(state);
    const double n2 = state.norm2();
    double s = 0.0;
    for (int i = 0; i < state.size(); ++i) {
        const double d = state.label(i) - c;
        s += d * d * std::norm(state.amplitudes[i]);
    }
    return std::sqrt(s / n2);
}

Partition transmission_reflection(const Trajectory& traj, int barrier_site,
                                  double t_eval) {
    if (traj.snapshots.empty())
        throw NoSnapshotError("transmission_reflection: no snapshots recorded");
    std::size_t best = 0;
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        if (std::abs(traj.snapshots[i].t - t_eval) <
            std::abs(traj.snapshots[best].t - t_eval))
            best = i;
    }
    const LatticeState& st = traj.snapshots[best];
    Partition p;
    for (int i = 0; i < st.size(); ++i) {
        const double w = std::norm(st.amplitudes[i]);
        const int n = st.label(i);
        if (n > barrier_site + kBarrierMargin)
            p.transmitted += w;
        else if (n < barrier_site - kBarrierMargin)
            p.reflected += w;
        else
            p.trapped += w;
    }
    return p;
}

double com_slope(const Trajectory& traj, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t < t0 || t > t1) continue;
        sx += t;
        sy += traj.centers_of_mass[i];
        sxx += t * t;
        sxy += t * traj.centers_of_mass[i];
        ++n;
    }
    if (n < 2) throw std::invalid_argument("com_slope: fewer than two samples");
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace metacrystal::lattice

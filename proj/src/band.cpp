#include "metacrystal/band.hpp"

#include <cmath>
#include <numbers>

namespace metacrystal::band {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kImagTol = 1e-9;
}  // namespace

DispersionSpec DispersionSpec::sinusoidal(double J, double a) {
    DispersionSpec s;
    s.kind = BandKind::Sinusoidal;
    s.J = J;
    s.a = a;
    s.validate();
    return s;
}

DispersionSpec DispersionSpec::sawtooth(double J, double a) {
    DispersionSpec s;
    s.kind = BandKind::Sawtooth;
    s.J = J;
    s.a = a;
    s.validate();
    return s;
}

DispersionSpec DispersionSpec::custom(std::vector<std::pair<int, cplx>> coeffs,
                                      double a) {
    DispersionSpec s;
    s.kind = BandKind::Custom;
    s.J = 0.0;
    s.a = a;
    s.coefficients = std::move(coeffs);
    s.validate();
    return s;
}

void DispersionSpec::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("DispersionSpec: a must be > 0");
    if (kind != BandKind::Custom && J < 0.0)
        throw std::invalid_argument("DispersionSpec: J must be >= 0");
}

cplx HoppingSet::at(int n) const {
    auto it = entries.find(n);
    return it == entries.end() ? cplx{0.0, 0.0} : it->second;
}

bool HoppingSet::hermitian(double tol) const {
    for (const auto& [n, J_n] : entries) {
        if (std::abs(at(-n) - std::conj(J_n)) > tol) return false;
    }
    return true;
}

double fold_phase(double k, double a) {
    return std::remainder(k * a, 2.0 * kPi);  // [-pi, pi]
}

double evaluate(const DispersionSpec& spec, double k) {
    return evaluate_phase(spec, fold_phase(k, spec.a));
}

double evaluate_phase(const DispersionSpec& spec, double th) {
    spec.validate();
    switch (spec.kind) {
        case BandKind::Sinusoidal:
            return -spec.J * std::cos(th);
        case BandKind::Sawtooth:
            // Midpoint value at the zone-edge discontinuity.
            if (std::abs(th) == kPi) return 0.0;
            return spec.J * th / kPi;
        case BandKind::Custom: {
            cplx sum{0.0, 0.0};
            for (const auto& [n, J_n] : spec.coefficients)
                sum += J_n * std::exp(cplx{0.0, n * th});
            if (std::abs(sum.imag()) >= kImagTol)
                throw NonHermitianCustomError(
                    "evaluate: custom partial sum has imaginary residue " +
                    std::to_string(sum.imag()));
            return sum.real();
        }
    }
    return 0.0;
}

HoppingSet hoppings(const DispersionSpec& spec, int M) {
    spec.validate();
    if (M < 1) throw std::invalid_argument("hoppings: M must be >= 1");
    HoppingSet h;
    h.max_range = M;
    h.a = spec.a;
    for (int n = -M; n <= M; ++n) h.entries[n] = cplx{0.0, 0.0};
    switch (spec.kind) {
        case BandKind::Sinusoidal:
            h.entries[1] = cplx{-spec.J / 2.0, 0.0};
            h.entries[-1] = cplx{-spec.J / 2.0, 0.0};
            break;
        case BandKind::Sawtooth:
            // J_n = (-1)^{n+1} J / (pi i n), constructed Hermitian by mirroring.
            for (int n = 1; n <= M; ++n) {
                const double sign = (n % 2 == 1) ? 1.0 : -1.0;
                const cplx J_n{0.0, -sign * spec.J / (kPi * n)};
                h.entries[n] = J_n;
                h.entries[-n] = std::conj(J_n);
            }
            break;
        case BandKind::Custom:
            for (const auto& [n, J_n] : spec.coefficients) {
                if (std::abs(n) <= M) h.entries[n] = J_n;
            }
            break;
    }
    return h;
}

double reconstruct(const HoppingSet& hops, double k) {
    if (!hops.hermitian())
        throw NonHermitianError("reconstruct: hopping set is not Hermitian");
    const double th = fold_phase(k, hops.a);
    cplx sum{0.0, 0.0};
    for (const auto& [n, J_n] : hops.entries)
        sum += J_n * std::exp(cplx{0.0, n * th});
    return sum.real();
}

bool time_reversal_symmetric(const DispersionSpec& spec, int n_samples,
                             double tol) {
    if (n_samples < 8)
        throw std::invalid_argument("time_reversal_symmetric: n_samples >= 8");
    const double dk = 2.0 * kPi / spec.a / n_samples;
    for (int i = 0; i < n_samples; ++i) {
        const double k = -kPi / spec.a + (i + 0.5) * dk;  // fold point excluded
        if (std::abs(evaluate(spec, k) - evaluate(spec, -k)) > tol) return false;
    }
    return true;
}

OneWayReport one_way_certificate(const DispersionSpec& spec, int n_samples) {
    if (n_samples < 16)
        throw std::invalid_argument("one_way_certificate: n_samples >= 16");
    const double dk = 2.0 * kPi / spec.a / n_samples;
    const double fd_step = 1e-6 * kPi / spec.a;
    OneWayReport rep;
    bool first = true;
    for (int i = 0; i < n_samples; ++i) {
        const double k = -kPi / spec.a + (i + 0.5) * dk;
        double v = 0.0;
        switch (spec.kind) {
            case BandKind::Sinusoidal:
                v = spec.J * spec.a * std::sin(k * spec.a);
                break;
            case BandKind::Sawtooth:
                v = spec.J * spec.a / kPi;
                break;
            case BandKind::Custom:
                v = (evaluate(spec, k + fd_step) - evaluate(spec, k - fd_step)) /
                    (2.0 * fd_step);
                break;
        }
        if (first) {
            rep.v_min = rep.v_max = v;
            first = false;
        } else {
            rep.v_min = std::min(rep.v_min, v);
            rep.v_max = std::max(rep.v_max, v);
        }
    }
    rep.one_way = (rep.v_min > 0.0) || (rep.v_max < 0.0);
    return rep;
}

}  // namespace metacrystal::band

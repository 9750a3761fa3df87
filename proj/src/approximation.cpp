#include "nlskg/approximation.hpp"

#include <cmath>

namespace nlskg {

namespace {

constexpr double kResonanceGuard = 1e-12;

// Slow-grid fields entering the ansatz and its analytic time derivative,
// as physical values on the slow grid.
struct SlowFields {
    std::vector<complexd> A, A_T;
    std::vector<complexd> A2, A2_T;
    std::vector<complexd> absA2, absA2_T;
    FourierGrid grid;
};

SlowFields slow_fields(const Envelope& e, const NlsParams& p) {
    SlowFields s;
    s.grid = e.grid;
    s.A = envelope_values(e);
    // d_T A from the amplitude equation, evaluated spectrally.
    SpectralField lin(e.grid, e.a_hat);
    for (int i = 0; i < e.grid.n; ++i) {
        const double K = e.grid.wavenumber(i);
        lin.coeffs[i] *= complexd(0.0, -p.nu1 * K * K);
    }
    s.A_T = inverse_transform_complex(lin);
    const int n = e.grid.n;
    s.A2.resize(n);
    s.A2_T.resize(n);
    s.absA2.resize(n);
    s.absA2_T.resize(n);
    for (int i = 0; i < n; ++i) {
        s.A_T[i] += complexd(0.0, p.nu2) * s.A[i] * std::norm(s.A[i]);
        s.A2[i] = s.A[i] * s.A[i];
        s.A2_T[i] = 2.0 * s.A[i] * s.A_T[i];
        s.absA2[i] = std::norm(s.A[i]);
        s.absA2_T[i] = 2.0 * std::real(std::conj(s.A[i]) * s.A_T[i]);
    }
    return s;
}

std::vector<complexd> slow_dX(const FourierGrid& g, const std::vector<complexd>& f) {
    SpectralField F = transform_complex(g, f);
    for (int i = 0; i < g.n; ++i) F.coeffs[i] *= complexd(0.0, g.wavenumber(i));
    return inverse_transform_complex(F);
}

// d/dt [ F(eps(x - cg t), eps^2 t) E^j ] = (-eps cg F_X + eps^2 F_T - i j w0 F) E^j.
std::vector<complexd> slow_ddt(const FourierGrid& g, const std::vector<complexd>& F,
                               const std::vector<complexd>& F_T, int j, double eps, double cg,
                               double w0) {
    auto F_X = slow_dX(g, F);
    std::vector<complexd> out(g.n);
    for (int i = 0; i < g.n; ++i)
        out[i] = -eps * cg * F_X[i] + eps * eps * F_T[i] - complexd(0.0, j * w0) * F[i];
    return out;
}

// Places the slow field at band j*k0 of the fast grid: slow mode kappa lands
// on fast bin j*carrier_bin + kappa with the group-transport phase
// exp(-i (2 pi kappa / L) cg t) and the carrier phase exp(-i j w0 t).
// Slow modes falling outside the fast grid are dropped (their weight is at
// the spectral floor of the envelope).
void place_band(SpectralField& dest, const FourierGrid& slow,
                const std::vector<complexd>& values, int j, int carrier_bin, double cg,
                double w0, double t, complexd scale) {
    SpectralField sh = transform_complex(slow, values);
    const FourierGrid& fast = dest.grid;
    const complexd carrier_phase = std::polar(1.0, -j * w0 * t);
    for (int i = 0; i < slow.n; ++i) {
        const int kappa = slow.signed_index(i);
        const int target = j * carrier_bin + kappa;
        if (!fast.mode_in_range(target)) continue;
        const double eK = 2.0 * std::numbers::pi * kappa / fast.length;  // = eps * K
        dest.mode(target) += scale * sh.coeffs[i] * std::polar(1.0, -eK * cg * t) * carrier_phase;
    }
}

// placed + Hermitian mirror, i.e. the field plus its complex conjugate.
void add_conjugate_mirror(SpectralField& dest, const SpectralField& placed) {
    const int n = dest.grid.n;
    for (int i = 0; i < n; ++i) dest.coeffs[i] += placed.coeffs[i];
    for (int i = 0; i < n; ++i) {
        const int j = dest.grid.signed_index(i);
        if (!dest.grid.mode_in_range(-j)) continue;
        dest.mode(-j) += std::conj(placed.coeffs[i]);
    }
}

int carrier_bin_of(const AnsatzBundle& b) {
    const double k0 = b.coeffs.carrier.k0;
    const double raw = k0 / b.fast.dk();
    const int bin = static_cast<int>(std::lround(raw));
    if (std::abs(raw - bin) > 1e-9)
        throw GridMismatchError("ansatz: carrier k0 is not representable on the fast grid");
    return bin;
}

void check_envelope_current(const AnsatzBundle& b, double t) {
    const double want = b.eps * b.eps * t;
    if (std::abs(b.envelope.T - want) > 1e-9 * std::max(1.0, std::abs(want)))
        throw StalenessError("ansatz: envelope is at T = " + std::to_string(b.envelope.T) +
                             " but t requires T = " + std::to_string(want));
}

// Assembles either the ansatz itself (derivative = false) or its analytic
// time derivative (derivative = true); both have the same band structure.
std::pair<SpectralField, SpectralField> assemble(const AnsatzBundle& b, double t,
                                                 bool derivative) {
    check_envelope_current(b, t);
    const CarrierData& c = b.coeffs.carrier;
    const int jc = carrier_bin_of(b);
    const SlowFields sf = slow_fields(b.envelope, b.coeffs.nls());
    const FourierGrid& slow = sf.grid;
    const double eps = b.eps;

    auto term = [&](const std::vector<complexd>& F, const std::vector<complexd>& F_T, int j) {
        return derivative ? slow_ddt(slow, F, F_T, j, eps, c.cg, c.omega0) : F;
    };

    SpectralField slot1(b.fast), slot2(b.fast);

    {  // eps A E + c.c. in the first slot
        SpectralField placed(b.fast);
        place_band(placed, slow, term(sf.A, sf.A_T, 1), 1, jc, c.cg, c.omega0, t, eps);
        add_conjugate_mirror(slot1, placed);
    }
    if (b.order == AnsatzOrder::second) {
        const double e2 = eps * eps;
        {  // second harmonics, both slots
            SpectralField placed(b.fast);
            place_band(placed, slow, term(sf.A2, sf.A2_T, 2), 2, jc, c.cg, c.omega0, t,
                       e2 * b.coeffs.a21);
            add_conjugate_mirror(slot1, placed);
        }
        {
            SpectralField placed(b.fast);
            place_band(placed, slow, term(sf.A2, sf.A2_T, 2), 2, jc, c.cg, c.omega0, t,
                       e2 * b.coeffs.a22);
            add_conjugate_mirror(slot2, placed);
        }
        // mean flow: |A|^2 is real, so the single band-0 placement is already
        // Hermitian and carries no conjugate partner
        if (b.coeffs.a01 != 0.0)
            place_band(slot1, slow, term(sf.absA2, sf.absA2_T, 0), 0, jc, c.cg, c.omega0, t,
                       e2 * b.coeffs.a01);
        if (b.coeffs.a02 != 0.0)
            place_band(slot2, slow, term(sf.absA2, sf.absA2_T, 0), 0, jc, c.cg, c.omega0, t,
                       e2 * b.coeffs.a02);
    }
    if (b.cutoff_enabled) {
        slot1 = apply_band_cutoff(slot1, c.k0, b.cutoff_delta, b.max_band);
        slot2 = apply_band_cutoff(slot2, c.k0, b.cutoff_delta, b.max_band);
    }
    // zero-mode policy: the k = 0 bin carries no data anywhere in the lab
    slot1.coeffs[0] = complexd(0.0);
    slot2.coeffs[0] = complexd(0.0);
    return {std::move(slot1), std::move(slot2)};
}

}  // namespace

CoefficientSet derive_coefficients(double k0) {
    CoefficientSet cs;
    cs.carrier = carrier(k0);
    cs.nu1 = 0.5 * cs.carrier.omega2;
    const double w0 = cs.carrier.omega0;
    const double w2k = omega(2.0 * k0);
    cs.gamma21 = -0.5 * rho(2.0 * k0);
    cs.gamma22 = +0.5 * rho(2.0 * k0);
    const double den21 = -2.0 * w0 + w2k;
    const double den22 = -2.0 * w0 - w2k;
    if (std::abs(den21) < kResonanceGuard || std::abs(den22) < kResonanceGuard)
        throw ResonanceError("derive_coefficients: resonant second-harmonic denominator");
    cs.a21 = cs.gamma21 / den21;
    cs.a22 = cs.gamma22 / den22;
    // The mean-flow forcing carries a factor rho(k) -> 0 as k -> 0, so the
    // E^0 relations force A_0l = 0 (certified by the residual-band suite).
    cs.a01 = 0.0;
    cs.a02 = 0.0;
    cs.nu2 = -rho(k0) * (cs.a21 + cs.a22 + cs.a01 + cs.a02);
    return cs;
}

AnsatzBundle make_ansatz_bundle(AnsatzOrder order, double eps, const Envelope& envelope,
                                const CoefficientSet& coeffs, const FourierGrid& fast,
                                double cutoff_delta) {
    if (!(eps > 0.0) || eps >= 0.5) throw DomainError("ansatz: eps must be in (0, 0.5)");
    if (!(cutoff_delta > 0.0) || cutoff_delta >= 0.5 * coeffs.carrier.k0)
        throw DomainError("ansatz: cutoff_delta must be in (0, k0/2)");
    AnsatzBundle b;
    b.order = order;
    b.eps = eps;
    b.coeffs = coeffs;
    b.envelope = envelope;
    b.cutoff_delta = cutoff_delta;
    b.fast = fast;
    b.cutoff_enabled = (order == AnsatzOrder::second);
    return b;
}

DiagonalState build_ansatz(const AnsatzBundle& b, double t) {
    auto [slot1, slot2] = assemble(b, t, /*derivative=*/false);
    return DiagonalState{std::move(slot1), std::move(slot2), t};
}

std::pair<SpectralField, SpectralField> ansatz_time_derivative(const AnsatzBundle& b, double t) {
    return assemble(b, t, /*derivative=*/true);
}

std::vector<char> band_mask(const FourierGrid& g, double k0, double delta, int max_band) {
    std::vector<char> mask(g.n, 0);
    for (int i = 0; i < g.n; ++i) {
        const double k = g.wavenumber(i);
        for (int j = -max_band; j <= max_band; ++j) {
            if (std::abs(k - j * k0) <= delta) {
                mask[i] = 1;
                break;
            }
        }
    }
    return mask;
}

SpectralField apply_band_cutoff(const SpectralField& F, double k0, double delta, int max_band) {
    if (!(delta > 0.0) || delta >= 0.5 * k0)
        throw DomainError("apply_band_cutoff: need 0 < delta < k0/2");
    const auto mask = band_mask(F.grid, k0, delta, max_band);
    SpectralField out = F;
    for (int i = 0; i < F.grid.n; ++i)
        if (!mask[i]) out.coeffs[i] = complexd(0.0);
    return out;
}

DiagonalState apply_band_cutoff(const DiagonalState& d, double k0, double delta, int max_band) {
    return DiagonalState{apply_band_cutoff(d.um1_hat, k0, delta, max_band),
                         apply_band_cutoff(d.up1_hat, k0, delta, max_band), d.t};
}

SpectralField band_restrict(const SpectralField& F, double k0, int j, double half_width) {
    SpectralField out(F.grid);
    for (int i = 0; i < F.grid.n; ++i) {
        const double k = F.grid.wavenumber(i);
        if (k >= j * k0 - half_width && k < j * k0 + half_width) out.coeffs[i] = F.coeffs[i];
    }
    return out;
}

ResidualPair compute_residual(const AnsatzBundle& b, double t) {
    DiagonalState psi = build_ansatz(b, t);
    auto [dpsi1, dpsi2] = ansatz_time_derivative(b, t);
    auto [rhs1, rhs2] = rhs_diagonal(psi);
    ResidualPair res{SpectralField(b.fast), SpectralField(b.fast), t};
    for (int i = 0; i < b.fast.n; ++i) {
        res.res_m1.coeffs[i] = rhs1.coeffs[i] - dpsi1.coeffs[i];
        res.res_p1.coeffs[i] = rhs2.coeffs[i] - dpsi2.coeffs[i];
    }
    return res;
}

double psi_time_derivative_check(const AnsatzBundle& b) {
    const double t = b.envelope.T / (b.eps * b.eps);
    const CarrierData& c = b.coeffs.carrier;
    const int jc = carrier_bin_of(b);
    const SlowFields sf = slow_fields(b.envelope, b.coeffs.nls());

    SpectralField psi1(b.fast), dpsi1(b.fast);
    place_band(psi1, sf.grid, sf.A, 1, jc, c.cg, c.omega0, t, 1.0);
    place_band(dpsi1, sf.grid, slow_ddt(sf.grid, sf.A, sf.A_T, 1, b.eps, c.cg, c.omega0), 1, jc,
               c.cg, c.omega0, t, 1.0);
    if (b.cutoff_enabled) {
        psi1 = apply_band_cutoff(psi1, c.k0, b.cutoff_delta, b.max_band);
        dpsi1 = apply_band_cutoff(dpsi1, c.k0, b.cutoff_delta, b.max_band);
    }
    SpectralField mismatch(b.fast);
    for (int i = 0; i < b.fast.n; ++i) {
        const double k = b.fast.wavenumber(i);
        mismatch.coeffs[i] = dpsi1.coeffs[i] + complexd(0.0, omega(k)) * psi1.coeffs[i];
    }
    return weighted_l1_norm(mismatch, 6.0);
}

}  // namespace nlskg

#include "nlskg/nls_solver.hpp"

#include <cmath>

namespace nlskg {

Envelope envelope_from_values(const FourierGrid& g, const std::vector<complexd>& values,
                              double T) {
    Envelope e(g);
    e.a_hat = transform_complex(g, values).coeffs;
    e.T = T;
    return e;
}

std::vector<complexd> envelope_values(const Envelope& e) {
    return inverse_transform_complex(SpectralField(e.grid, e.a_hat));
}

Envelope sech_envelope(const FourierGrid& g) {
    std::vector<complexd> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = 1.0 / std::cosh(g.x(i));
    return envelope_from_values(g, v);
}

Envelope gaussian_envelope(const FourierGrid& g, double sigma) {
    std::vector<complexd> v(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double X = g.x(i);
        v[i] = std::exp(-X * X / (2.0 * sigma * sigma));
    }
    return envelope_from_values(g, v);
}

Envelope nls_step(const Envelope& e, const NlsParams& p, double dT) {
    if (!(dT > 0.0)) throw ConfigError("nls_step: dT must be positive");
    auto values = envelope_values(e);
    for (auto& a : values) a *= std::polar(1.0, 0.5 * dT * p.nu2 * std::norm(a));
    SpectralField F = transform_complex(e.grid, values);
    for (int i = 0; i < e.grid.n; ++i) {
        const double K = e.grid.wavenumber(i);
        F.coeffs[i] *= std::polar(1.0, -p.nu1 * K * K * dT);
    }
    values = inverse_transform_complex(F);
    for (auto& a : values) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw BlowUpError("nls_step: non-finite amplitude", e.T);
        a *= std::polar(1.0, 0.5 * dT * p.nu2 * std::norm(a));
    }
    Envelope out = envelope_from_values(e.grid, values, e.T + dT);
    return out;
}

Envelope nls_evolve(Envelope e, const NlsParams& p, double target_T, double dT) {
    if (target_T < e.T) throw ConfigError("nls_evolve: target before current time");
    const double span = target_T - e.T;
    if (span == 0.0) return e;
    const int steps = std::max(1, static_cast<int>(std::ceil(span / dT - 1e-12)));
    const double h = span / steps;
    for (int s = 0; s < steps; ++s) e = nls_step(e, p, h);
    e.T = target_T;  // guard against rounding accumulation
    return e;
}

double mass(const Envelope& e) {
    double acc = 0.0;
    for (const auto& a : e.a_hat) acc += std::norm(a);
    return e.grid.length * acc;
}

double momentum(const Envelope& e) {
    double acc = 0.0;
    for (int i = 0; i < e.grid.n; ++i) acc += e.grid.wavenumber(i) * std::norm(e.a_hat[i]);
    return acc;
}

complexd Soliton::operator()(double X, double T) const {
    const double amp = eta * std::sqrt(2.0 * params.nu1 / params.nu2);
    return amp / std::cosh(eta * X) * std::polar(1.0, params.nu1 * eta * eta * T);
}

Envelope Soliton::sample(const FourierGrid& g, double T) const {
    std::vector<complexd> v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = (*this)(g.x(i), T);
    return envelope_from_values(g, v, T);
}

Soliton soliton(const NlsParams& p, double eta) {
    if (!(eta > 0.0)) throw DomainError("soliton: eta must be positive");
    if (!(p.nu1 * p.nu2 > 0.0))
        throw UnsupportedRegimeError("soliton: requires focusing parameters (nu1*nu2 > 0)");
    return Soliton{p, eta};
}

std::vector<complexd> evaluate_on_fast_grid(const Envelope& e, const FourierGrid& fast,
                                            double eps, double cg, double t) {
    if (std::abs(e.grid.length - eps * fast.length) > 1e-9 * e.grid.length)
        throw GridMismatchError("evaluate_on_fast_grid: L_X != eps * L_fast");
    if (e.grid.n > fast.n) throw GridMismatchError("evaluate_on_fast_grid: slow grid finer than fast");
    // Slow mode kappa has K = 2 pi kappa / L_X; on the fast grid it sits at
    // bin kappa. Shift by exp(-i K eps cg t) and upsample by zero padding.
    SpectralField F(fast);
    for (int i = 0; i < e.grid.n; ++i) {
        const int kappa = e.grid.signed_index(i);
        if (!fast.mode_in_range(kappa)) continue;
        const double K = e.grid.wavenumber(i);
        F.mode(kappa) = e.a_hat[i] * std::polar(1.0, -K * eps * cg * t);
    }
    return inverse_transform_complex(F);
}

}  // namespace nlskg

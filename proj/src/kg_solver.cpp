#include "nlskg/kg_solver.hpp"

#include <cmath>

#include "nlskg/dispersion.hpp"

namespace nlskg {

namespace {

constexpr double kBlowUpThreshold = 1e6;

void check_state(const SpectralField& a, const SpectralField& b, double t) {
    for (const auto& c : a.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > kBlowUpThreshold)
            throw BlowUpError("solution left trust region at t = " + std::to_string(t), t);
    for (const auto& c : b.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > kBlowUpThreshold)
            throw BlowUpError("solution left trust region at t = " + std::to_string(t), t);
    require_zero_mean(a);
    require_zero_mean(b);
}

}  // namespace

DiagonalState diagonalize(const KgState& s) {
    if (s.u_hat.grid != s.w_hat.grid) throw GridMismatchError("diagonalize: grids differ");
    require_zero_mean(s.u_hat);
    require_zero_mean(s.w_hat);
    const FourierGrid& g = s.u_hat.grid;
    DiagonalState d{SpectralField(g), SpectralField(g), s.t};
    for (int i = 0; i < g.n; ++i) {
        const double k = g.wavenumber(i);
        // v = w / (-i omega); |omega| >= 1 so there is no small divisor.
        const complexd v = (i == 0) ? complexd(0.0)
                                    : s.w_hat.coeffs[i] / complexd(0.0, -omega(k));
        d.um1_hat.coeffs[i] = 0.5 * (s.u_hat.coeffs[i] + v);
        d.up1_hat.coeffs[i] = 0.5 * (s.u_hat.coeffs[i] - v);
    }
    return d;
}

KgState undiagonalize(const DiagonalState& d) {
    if (d.um1_hat.grid != d.up1_hat.grid) throw GridMismatchError("undiagonalize: grids differ");
    require_zero_mean(d.um1_hat);
    require_zero_mean(d.up1_hat);
    const FourierGrid& g = d.um1_hat.grid;
    KgState s{SpectralField(g), SpectralField(g), d.t};
    for (int i = 0; i < g.n; ++i) {
        const double k = g.wavenumber(i);
        const complexd v = d.um1_hat.coeffs[i] - d.up1_hat.coeffs[i];
        s.u_hat.coeffs[i] = d.um1_hat.coeffs[i] + d.up1_hat.coeffs[i];
        s.w_hat.coeffs[i] = (i == 0) ? complexd(0.0) : complexd(0.0, -omega(k)) * v;
    }
    return s;
}

std::pair<SpectralField, SpectralField> rhs_diagonal(const DiagonalState& d) {
    const FourierGrid& g = d.um1_hat.grid;
    SpectralField sum(g);
    for (int i = 0; i < g.n; ++i) sum.coeffs[i] = d.um1_hat.coeffs[i] + d.up1_hat.coeffs[i];
    SpectralField conv = dealiased_product(sum, sum);
    SpectralField dm1(g), dp1(g);
    for (int i = 0; i < g.n; ++i) {
        const double k = g.wavenumber(i);
        const complexd nl = complexd(0.0, 0.5 * rho(k)) * conv.coeffs[i];
        dm1.coeffs[i] = complexd(0.0, -omega(k)) * d.um1_hat.coeffs[i] - nl;
        dp1.coeffs[i] = complexd(0.0, omega(k)) * d.up1_hat.coeffs[i] + nl;
    }
    return {std::move(dm1), std::move(dp1)};
}

DiagonalStepper::DiagonalStepper(const FourierGrid& grid, const StepperConfig& cfg)
    : grid_(grid), cfg_(cfg) {
    cfg_.validate();
    const int n = grid.n;
    half_m1_.resize(n);
    half_p1_.resize(n);
    rho_half_.resize(n);
    dealias_keep_.resize(n);
    const int jmax = dealias_limit(grid);
    for (int i = 0; i < n; ++i) {
        const double k = grid.wavenumber(i);
        const double w = omega(k);
        half_m1_[i] = std::polar(1.0, -w * cfg_.dt * 0.5);
        half_p1_[i] = std::conj(half_m1_[i]);
        rho_half_[i] = 0.5 * rho(k);
        dealias_keep_[i] = std::abs(grid.signed_index(i)) <= jmax ? 1 : 0;
    }
}

// Dealiased transform of (u_{-1} + u_{+1})^2, written into out.
void DiagonalStepper::nonlinearity(const std::vector<complexd>& um1,
                                   const std::vector<complexd>& up1,
                                   std::vector<complexd>& out) const {
    const int n = grid_.n;
    if (cfg_.linear_only) {
        out.assign(n, complexd(0.0));
        return;
    }
    SpectralField sum(grid_);
    for (int i = 0; i < n; ++i)
        sum.coeffs[i] = dealias_keep_[i] ? um1[i] + up1[i] : complexd(0.0);
    auto phys = inverse_transform_complex(sum);
    for (auto& v : phys) v *= v;
    SpectralField sq = transform_complex(grid_, phys);
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = dealias_keep_[i] ? sq.coeffs[i] : complexd(0.0);
}

DiagonalState DiagonalStepper::step(const DiagonalState& d) const {
    if (d.um1_hat.grid != grid_) throw GridMismatchError("step: state grid differs");
    const int n = grid_.n;
    const double dt = cfg_.dt;

    if (cfg_.scheme == Scheme::strang_split) {
        // Half linear phase, exact nonlinear step (u is frozen under the pure
        // nonlinear flow since the two derivatives cancel), half linear phase.
        DiagonalState out{SpectralField(grid_), SpectralField(grid_), d.t + dt};
        std::vector<complexd> m1(n), p1(n), conv;
        for (int i = 0; i < n; ++i) {
            m1[i] = half_m1_[i] * d.um1_hat.coeffs[i];
            p1[i] = half_p1_[i] * d.up1_hat.coeffs[i];
        }
        nonlinearity(m1, p1, conv);
        for (int i = 0; i < n; ++i) {
            const complexd kick = complexd(0.0, rho_half_[i] * dt) * conv[i];
            out.um1_hat.coeffs[i] = half_m1_[i] * (m1[i] - kick);
            out.up1_hat.coeffs[i] = half_p1_[i] * (p1[i] + kick);
        }
        return out;
    }

    // Lawson-RK4: with E the half-step linear propagator,
    //   k1 = N(y0), k2 = N(E(y0 + dt/2 k1)), k3 = N(E y0 + dt/2 k2),
    //   k4 = N(E^2 y0 + dt E k3),
    //   y1 = E^2 y0 + dt/6 (E^2 k1 + 2 E (k2 + k3) + k4).
    const auto& m0 = d.um1_hat.coeffs;
    const auto& p0 = d.up1_hat.coeffs;
    std::vector<complexd> c1, c2, c3, c4;
    std::vector<complexd> am(n), ap(n);

    nonlinearity(m0, p0, c1);
    for (int i = 0; i < n; ++i) {
        const complexd k1 = complexd(0.0, rho_half_[i]) * c1[i];
        am[i] = half_m1_[i] * (m0[i] - 0.5 * dt * k1);
        ap[i] = half_p1_[i] * (p0[i] + 0.5 * dt * k1);
    }
    nonlinearity(am, ap, c2);
    for (int i = 0; i < n; ++i) {
        const complexd k2 = complexd(0.0, rho_half_[i]) * c2[i];
        am[i] = half_m1_[i] * m0[i] - 0.5 * dt * k2;
        ap[i] = half_p1_[i] * p0[i] + 0.5 * dt * k2;
    }
    nonlinearity(am, ap, c3);
    for (int i = 0; i < n; ++i) {
        const complexd k3 = complexd(0.0, rho_half_[i]) * c3[i];
        const complexd e2m = half_m1_[i] * half_m1_[i];
        const complexd e2p = half_p1_[i] * half_p1_[i];
        am[i] = e2m * m0[i] - dt * half_m1_[i] * k3;
        ap[i] = e2p * p0[i] + dt * half_p1_[i] * k3;
    }
    nonlinearity(am, ap, c4);

    DiagonalState out{SpectralField(grid_), SpectralField(grid_), d.t + dt};
    for (int i = 0; i < n; ++i) {
        const complexd irho(0.0, rho_half_[i]);
        const complexd k1 = irho * c1[i], k2 = irho * c2[i], k3 = irho * c3[i], k4 = irho * c4[i];
        const complexd e1m = half_m1_[i], e1p = half_p1_[i];
        const complexd e2m = e1m * e1m, e2p = e1p * e1p;
        out.um1_hat.coeffs[i] =
            e2m * m0[i] - (dt / 6.0) * (e2m * k1 + 2.0 * e1m * (k2 + k3) + k4);
        out.up1_hat.coeffs[i] =
            e2p * p0[i] + (dt / 6.0) * (e2p * k1 + 2.0 * e1p * (k2 + k3) + k4);
    }
    return out;
}

DiagonalState step(const DiagonalState& d, const StepperConfig& cfg) {
    return DiagonalStepper(d.um1_hat.grid, cfg).step(d);
}

KgState step_second_order(const KgState& s, const StepperConfig& cfg) {
    cfg.validate();
    const FourierGrid& g = s.u_hat.grid;
    const int n = g.n;
    const double dt = cfg.dt;
    const int jmax = dealias_limit(g);

    // Rotation over tau: (u, w) -> (u cos + w sin/W, -u W sin + w cos), W = sqrt(1+k^2).
    struct Rot {
        double c, s, W;
    };
    std::vector<Rot> half(n);
    std::vector<double> k2(n);
    std::vector<char> keep(n);
    for (int i = 0; i < n; ++i) {
        const double k = g.wavenumber(i);
        const double W = std::sqrt(1.0 + k * k);
        half[i] = {std::cos(0.5 * W * dt), std::sin(0.5 * W * dt), W};
        k2[i] = k * k;
        keep[i] = std::abs(g.signed_index(i)) <= jmax ? 1 : 0;
    }
    auto rotate = [&](std::vector<complexd>& u, std::vector<complexd>& w, int times) {
        for (int i = 0; i < n; ++i) {
            complexd uu = u[i], ww = w[i];
            for (int r = 0; r < times; ++r) {
                const complexd nu = half[i].c * uu + (half[i].s / half[i].W) * ww;
                const complexd nw = -half[i].W * half[i].s * uu + half[i].c * ww;
                uu = nu;
                ww = nw;
            }
            u[i] = uu;
            w[i] = ww;
        }
    };
    // Nonlinear force on w: -k^2 * (u*u), dealiased.
    auto force = [&](const std::vector<complexd>& u, std::vector<complexd>& out) {
        if (cfg.linear_only) {
            out.assign(n, complexd(0.0));
            return;
        }
        SpectralField uf(g);
        for (int i = 0; i < n; ++i) uf.coeffs[i] = keep[i] ? u[i] : complexd(0.0);
        auto phys = inverse_transform_complex(uf);
        for (auto& v : phys) v *= v;
        SpectralField sq = transform_complex(g, phys);
        out.resize(n);
        for (int i = 0; i < n; ++i) out[i] = keep[i] ? -k2[i] * sq.coeffs[i] : complexd(0.0);
    };

    std::vector<complexd> u0 = s.u_hat.coeffs, w0 = s.w_hat.coeffs;
    std::vector<complexd> f1, f2, f3, f4;
    std::vector<complexd> au(n), aw(n);

    force(u0, f1);
    for (int i = 0; i < n; ++i) {
        au[i] = u0[i];
        aw[i] = w0[i] + 0.5 * dt * f1[i];
    }
    rotate(au, aw, 1);
    force(au, f2);
    {
        std::vector<complexd> bu = u0, bw = w0;
        rotate(bu, bw, 1);
        for (int i = 0; i < n; ++i) {
            au[i] = bu[i];
            aw[i] = bw[i] + 0.5 * dt * f2[i];
        }
    }
    force(au, f3);
    {
        std::vector<complexd> bu = u0, bw = w0;
        rotate(bu, bw, 2);
        std::vector<complexd> cu(n, complexd(0.0)), cw = f3;
        rotate(cu, cw, 1);
        for (int i = 0; i < n; ++i) {
            au[i] = bu[i] + dt * cu[i];
            aw[i] = bw[i] + dt * cw[i];
        }
    }
    force(au, f4);

    // Assemble: y1 = E2 y0 + dt/6 (E2 (0,f1) + 2 E (0,f2) + 2 E (0,f3) + (0,f4)).
    std::vector<complexd> r1u(n, complexd(0.0)), r1w = f1;
    rotate(r1u, r1w, 2);
    std::vector<complexd> r2u(n, complexd(0.0)), r2w(n);
    for (int i = 0; i < n; ++i) r2w[i] = f2[i] + f3[i];
    rotate(r2u, r2w, 1);
    rotate(u0, w0, 2);

    KgState out{SpectralField(g), SpectralField(g), s.t + dt};
    for (int i = 0; i < n; ++i) {
        out.u_hat.coeffs[i] = u0[i] + (dt / 6.0) * (r1u[i] + 2.0 * r2u[i]);
        out.w_hat.coeffs[i] = w0[i] + (dt / 6.0) * (r1w[i] + 2.0 * r2w[i] + f4[i]);
    }
    return out;
}

double hamiltonian(const KgState& s) {
    require_zero_mean(s.u_hat);
    require_zero_mean(s.w_hat);
    const FourierGrid& g = s.u_hat.grid;
    double quad = 0.0;
    for (int i = 1; i < g.n; ++i) {
        const double k = g.wavenumber(i);
        const double p2 = std::norm(s.w_hat.coeffs[i]) / (k * k);
        const double iu2 = std::norm(s.u_hat.coeffs[i]) / (k * k);
        quad += 0.5 * (p2 + std::norm(s.u_hat.coeffs[i]) + iu2);
    }
    quad *= g.length;
    const RealField u = inverse_transform(s.u_hat, 1e-8);
    double cubic = 0.0;
    for (double v : u.values) cubic += v * v * v;
    cubic *= g.length / g.n / 3.0;
    return quad + cubic;
}

TrajectorySummary simulate(DiagonalState d, const StepperConfig& cfg, const Observer& observe) {
    cfg.validate();
    require_zero_mean(d.um1_hat);
    require_zero_mean(d.up1_hat);
    DiagonalStepper stepper(d.um1_hat.grid, cfg);
    TrajectorySummary summary;
    const int steps = static_cast<int>(std::floor(cfg.t_end / cfg.dt + 1e-9));
    if (observe) observe(d);
    summary.observations = 1;
    for (int s = 1; s <= steps; ++s) {
        d = stepper.step(d);
        check_state(d.um1_hat, d.up1_hat, d.t);
        if (s % cfg.observer_stride == 0 && observe) {
            observe(d);
            ++summary.observations;
        }
    }
    summary.steps = steps;
    summary.t_final = d.t;
    return summary;
}

}  // namespace nlskg

#include "nlskg/energy.hpp"

#include <cmath>

#include "nlskg/dispersion.hpp"

namespace nlskg {

namespace {

constexpr double kDenominatorGuard = 1e-6;

double guarded(double den) {
    if (std::abs(den) < kDenominatorGuard)
        throw ResonanceError("normal-form denominator below guard: " + std::to_string(den));
    return den;
}

std::vector<int> support_bins(const PsiData& psi) {
    std::vector<int> bins;
    for (int i = 0; i < psi.psi_hat.grid.n; ++i)
        if (psi.chi_mask[i]) bins.push_back(i);
    return bins;
}

// Kernel sum out(k_a) = sum_d kernel(k_a, k_d, k_a - k_d) psi(k_d) f(k_a - k_d),
// restricted to the psi support; the difference index must stay on the grid.
template <typename Kernel>
SpectralField kernel_sum(const PsiData& psi, const SpectralField& f, Kernel&& kernel) {
    const FourierGrid& g = psi.psi_hat.grid;
    if (f.grid != g) throw GridMismatchError("kernel_sum: grids differ");
    const auto bins = support_bins(psi);
    SpectralField out(g);
    for (int a = 0; a < g.n; ++a) {
        const int ja = g.signed_index(a);
        const double k = g.wavenumber(a);
        complexd acc(0.0);
        for (int d : bins) {
            const int jb = ja - g.signed_index(d);
            if (!g.mode_in_range(jb)) continue;
            const double km = g.wavenumber(d);
            const double m = k - km;
            acc += kernel(k, km, m) * psi.psi_hat.coeffs[d] * f.coeffs[g.bin_of(jb)];
        }
        out.coeffs[a] = acc;
    }
    return out;
}

double integral(const std::vector<double>& a) {
    double acc = 0.0;
    for (double v : a) acc += v;
    return acc;
}

std::vector<double> phys(const SpectralField& F) {
    const auto v = inverse_transform_complex(F);
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

std::vector<double> phys_derivative(const SpectralField& F, int order) {
    SpectralField D = F;
    for (int i = 0; i < F.grid.n; ++i) {
        const complexd ik(0.0, F.grid.wavenumber(i));
        D.coeffs[i] *= std::pow(ik, order);
    }
    return phys(D);
}

}  // namespace

ErrorPair extract_error(const DiagonalState& sim, const DiagonalState& ansatz, double eps) {
    if (sim.um1_hat.grid != ansatz.um1_hat.grid)
        throw GridMismatchError("extract_error: grids differ");
    if (std::abs(sim.t - ansatz.t) > 1e-9 * std::max(1.0, std::abs(sim.t)))
        throw GridMismatchError("extract_error: states at different times");
    const double scale = std::pow(eps, -2.5);
    ErrorPair err{SpectralField(sim.um1_hat.grid), SpectralField(sim.um1_hat.grid), eps, sim.t};
    for (int i = 0; i < sim.um1_hat.grid.n; ++i) {
        err.r_m1.coeffs[i] = scale * (sim.um1_hat.coeffs[i] - ansatz.um1_hat.coeffs[i]);
        err.r_p1.coeffs[i] = scale * (sim.up1_hat.coeffs[i] - ansatz.up1_hat.coeffs[i]);
    }
    return err;
}

PsiData make_psi(const DiagonalState& ansatz, double eps) {
    PsiData psi{SpectralField(ansatz.um1_hat.grid), {}};
    const int n = ansatz.um1_hat.grid.n;
    psi.chi_mask.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        psi.psi_hat.coeffs[i] = (ansatz.um1_hat.coeffs[i] + ansatz.up1_hat.coeffs[i]) / eps;
        psi.chi_mask[i] = psi.psi_hat.coeffs[i] != complexd(0.0) ? 1 : 0;
    }
    return psi;
}

double n_kernel(int j1, int j2, double k, double km, double m) {
    return -j1 * rho(k) / guarded(-j1 * omega(k) - omega(km) + j2 * omega(m));
}

complexd s_kernel(int j2, int j1, double k, double km, double m) {
    const double den = guarded(-j2 * omega(k) - omega(km) + j1 * omega(m));
    const double quotient = std::abs(k - m) < 1e-10 ? rho_prime(m) : (rho(k) - rho(m)) / (k - m);
    return -j1 * quotient / (complexd(0.0, 1.0) * den);
}

complexd g_multiplier(int j1, int j2, double k) {
    if (j1 == j2) return 1.0 / (complexd(0.0, -1.0) * guarded(omega(k) + j1 * k));
    return complexd(0.5, 0.0);
}

SpectralField apply_N(const PsiData& psi, const SpectralField& f, int j1, int j2) {
    return kernel_sum(psi, f,
                      [&](double k, double km, double m) {
                          return complexd(n_kernel(j1, j2, k, km, m), 0.0);
                      });
}

SpectralField apply_G(const PsiData& psi, const SpectralField& h, int j1, int j2) {
    if (h.grid != psi.psi_hat.grid) throw GridMismatchError("apply_G: grids differ");
    SpectralField out(h.grid);
    for (int i = 0; i < h.grid.n; ++i) {
        if (!psi.chi_mask[i]) continue;
        out.coeffs[i] = g_multiplier(j1, j2, h.grid.wavenumber(i)) * h.coeffs[i];
    }
    return out;
}

SpectralField apply_S(const PsiData& psi, const SpectralField& h, const SpectralField& f,
                      int j2, int j1) {
    // S_{j2 j1}(dx h, f): the i(k-m) of dx h cancels the 1/((k-m) i) of the
    // displayed kernel, leaving a smooth difference quotient.
    PsiData hdata{h, psi.chi_mask};
    return kernel_sum(hdata, f, [&](double k, double km, double m) {
        const double den = guarded(-j2 * omega(k) - omega(km) + j1 * omega(m));
        return complexd(-j1 * (rho(k) - rho(m)) / den, 0.0);
    });
}

double check_normal_form_identity(const PsiData& psi, const SpectralField& f, int j1, int j2) {
    const FourierGrid& g = f.grid;
    SpectralField lhs = apply_N(psi, f, j1, j2);
    for (int i = 0; i < g.n; ++i)
        lhs.coeffs[i] *= complexd(0.0, -j1 * omega(g.wavenumber(i)));

    PsiData psi_w = psi;
    for (int i = 0; i < g.n; ++i)
        psi_w.psi_hat.coeffs[i] *= complexd(0.0, omega(g.wavenumber(i)));
    const SpectralField n_wpsi = apply_N(psi_w, f, j1, j2);

    SpectralField f_w = f;
    for (int i = 0; i < g.n; ++i) f_w.coeffs[i] *= complexd(0.0, omega(g.wavenumber(i)));
    const SpectralField n_wf = apply_N(psi, f_w, j1, j2);

    SpectralField rhs = dealiased_product(psi.psi_hat, f);
    for (int i = 0; i < g.n; ++i)
        rhs.coeffs[i] *= complexd(0.0, -j1 * rho(g.wavenumber(i)));

    double num = 0.0, scale = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const complexd l = lhs.coeffs[i] - n_wpsi.coeffs[i] + double(j2) * n_wf.coeffs[i];
        num += std::norm(l - rhs.coeffs[i]);
        scale += std::norm(l) + std::norm(rhs.coeffs[i]);
    }
    return std::sqrt(num) / std::max(std::sqrt(scale), 1e-300);
}

double check_adjoint_identity(const PsiData& psi, const SpectralField& f,
                              const SpectralField& g, int j1, int j2) {
    const double lhs = std::real(l2_inner(f, apply_N(psi, g, j1, j2)));
    const double r1 =
        -(double(j1) / j2) * std::real(l2_inner(apply_N(psi, f, j2, j1), g));
    const double r2 = std::real(l2_inner(apply_S(psi, psi.psi_hat, f, j2, j1), g));
    const double scale = std::abs(lhs) + std::abs(r1) + std::abs(r2);
    return std::abs(lhs - (r1 + r2)) / std::max(scale, 1e-300);
}

std::pair<double, double> check_parts_identities(const SpectralField& a_m1,
                                                 const SpectralField& a_p1,
                                                 const SpectralField& f_m1,
                                                 const SpectralField& f_p1) {
    const FourierGrid& g = a_m1.grid;
    const double w = g.length / g.n;

    const auto am = phys(a_m1), ap = phys(a_p1);
    const auto fm = phys(f_m1), fp = phys(f_p1);
    const auto am_x = phys_derivative(a_m1, 1), ap_x = phys_derivative(a_p1, 1);
    const auto fm_x = phys_derivative(f_m1, 1), fp_x = phys_derivative(f_p1, 1);

    // (50) for both slots: int a f f' + 1/2 int a' f^2 = 0.
    double d50 = 0.0, s50 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double tp = ap[i] * fp[i] * fp_x[i] + 0.5 * ap_x[i] * fp[i] * fp[i];
        const double tm = am[i] * fm[i] * fm_x[i] + 0.5 * am_x[i] * fm[i] * fm[i];
        d50 += w * (tp + tm);
        s50 += w * (std::abs(ap[i] * fp[i] * fp_x[i]) + std::abs(am[i] * fm[i] * fm_x[i]));
    }
    d50 = std::abs(d50) / std::max(s50, 1e-300);

    // (51): cross terms against the leading rearrangement plus the exact
    // remainder from the partial integrations.
    double lhs = 0.0, lead = 0.0, rem = 0.0, scale = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double cross = ap[i] * fp[i] * fm_x[i] + am[i] * fm[i] * fp_x[i];
        lhs += w * cross;
        scale += w * std::abs(cross);
        lead += w * 0.5 * (am[i] - ap[i]) * (fp[i] + fm[i]) * (fp_x[i] - fm_x[i]);
        rem += w * (0.25 * (am_x[i] - ap_x[i]) * (fp[i] * fp[i] - fm[i] * fm[i]) -
                    0.5 * (ap_x[i] + am_x[i]) * fp[i] * fm[i]);
    }
    const double d51 = std::abs(lhs - lead - rem) / std::max(scale, 1e-300);
    return {d50, d51};
}

EnergyBreakdown energy(const ErrorPair& err, const PsiData& psi, int s) {
    if (s < 0) throw DomainError("energy: s must be non-negative");
    const FourierGrid& g = err.r_m1.grid;
    if (psi.psi_hat.grid != g) throw GridMismatchError("energy: grids differ");
    const double eps = err.eps;

    const SpectralField* r[2] = {&err.r_m1, &err.r_p1};
    const int j_of[2] = {-1, +1};
    // N_{j1 j2}(psi, R_{j2}) indexed [j1][j2] with 0 -> -1, 1 -> +1.
    SpectralField nfield[2][2];
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            nfield[i1][i2] = apply_N(psi, *r[i2], j_of[i1], j_of[i2]);

    EnergyBreakdown out;
    out.s = s;
    out.e_ell.assign(s + 1, 0.0);
    out.h_ell.assign(s, 0.0);

    for (int ell = 0; ell <= s; ++ell) {
        double e = 0.0;
        for (int i1 = 0; i1 < 2; ++i1) {
            double quad = 0.0, corr = 0.0;
            for (int i = 0; i < g.n; ++i) {
                const double k2l = std::pow(g.wavenumber(i) * g.wavenumber(i), ell);
                quad += k2l * std::norm(r[i1]->coeffs[i]);
                double c = 0.0;
                for (int i2 = 0; i2 < 2; ++i2)
                    c += std::real(std::conj(r[i1]->coeffs[i]) * nfield[i1][i2].coeffs[i]);
                corr += k2l * c;
            }
            e += 0.5 * g.length * quad + eps * g.length * corr;
        }
        out.e_ell[ell] = e;
    }

    // h_ell in physical space
    const auto psi_phys = phys(psi.psi_hat);
    const auto psi_xx = phys_derivative(psi.psi_hat, 2);
    SpectralField sum_r(g);
    for (int i = 0; i < g.n; ++i) sum_r.coeffs[i] = err.r_m1.coeffs[i] + err.r_p1.coeffs[i];
    const auto s_phys = phys(sum_r);
    const double e32 = std::pow(eps, 1.5), e12 = std::sqrt(eps);
    const double w = g.length / g.n;
    for (int ell = 1; ell <= s; ++ell) {
        const auto ds = phys_derivative(sum_r, ell);
        double h = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double weight = ((2.0 * ell + 1.0) * psi_xx[i] - psi_phys[i]) *
                                      (psi_phys[i] + e32 * s_phys[i]) +
                                  e12 * s_phys[i];
            h += weight * ds[i] * ds[i];
        }
        out.h_ell[ell - 1] = w * h;
    }

    out.e_total = integral(out.e_ell);
    out.e_modified = out.e_total + 0.5 * eps * eps * integral(out.h_ell);
    return out;
}

EnergyTrace energy_trace(const std::vector<DiagonalState>& checkpoints,
                         const AnsatzProvider& ansatz_at, double eps, int s) {
    EnergyTrace trace;
    if (checkpoints.size() < 3) throw ConfigError("energy_trace: need at least 3 checkpoints");
    std::vector<EnergyTracePoint> pts(checkpoints.size());
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        const DiagonalState& sim = checkpoints[i];
        const DiagonalState ans = ansatz_at(sim.t);
        const ErrorPair err = extract_error(sim, ans, eps);
        const PsiData psi = make_psi(ans, eps);
        const EnergyBreakdown eb = energy(err, psi, s);
        pts[i].t = sim.t;
        pts[i].e_s = eb.e_total;
        pts[i].e_mod = eb.e_modified;
        trace.sup_e_s = std::max(trace.sup_e_s, eb.e_total);
        trace.sup_e_mod = std::max(trace.sup_e_mod, eb.e_modified);
        trace.sup_gap = std::max(trace.sup_gap, std::abs(eb.e_modified - eb.e_total));
    }
    for (size_t i = 0; i < pts.size(); ++i) {
        const size_t lo = i == 0 ? 0 : i - 1;
        const size_t hi = i + 1 == pts.size() ? i : i + 1;
        pts[i].de_dt = (pts[hi].e_mod - pts[lo].e_mod) / (pts[hi].t - pts[lo].t);
        const double em = pts[i].e_mod;
        pts[i].ratio = pts[i].de_dt /
                       (eps * eps * (em + std::sqrt(eps) * std::pow(std::max(em, 0.0), 1.5) + 1.0));
        if (i > 0 && i + 1 < pts.size())
            trace.sup_abs_ratio = std::max(trace.sup_abs_ratio, std::abs(pts[i].ratio));
    }
    trace.points = std::move(pts);
    return trace;
}

}  // namespace nlskg

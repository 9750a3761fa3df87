#include <cmath>

#include "doctest.h"
#include "nlskg/approximation.hpp"
#include "nlskg/harness.hpp"

using namespace nlskg;

namespace {

struct Lab {
    double eps;
    FourierGrid fast;
    FourierGrid slow;
    Envelope env;
    CoefficientSet coeffs;

    explicit Lab(double eps_, double k0 = 1.0) : eps(eps_) {
        ExperimentConfig cfg;
        cfg.k0 = k0;
        cfg.points_per_wavelength = 64;
        fast = fast_grid_for(cfg, eps);
        slow = slow_grid_for(cfg, fast, eps);
        env = sech_envelope(slow);
        coeffs = derive_coefficients(k0);
    }

    AnsatzBundle bundle(AnsatzOrder order) const {
        return make_ansatz_bundle(order, eps, env, coeffs, fast, 0.25);
    }
};

// L2 norm of the residual restricted to the band around j*k0 (both slots,
// or the u_{-1} slot only).
double band_residual(const AnsatzBundle& b, int j, bool m1_slot_only = false) {
    const ResidualPair res = compute_residual(b, 0.0);
    const double hw = 0.5 * b.coeffs.carrier.k0;
    const double m1 = l2_norm(band_restrict(res.res_m1, b.coeffs.carrier.k0, j, hw));
    if (m1_slot_only) return m1;
    return std::hypot(m1, l2_norm(band_restrict(res.res_p1, b.coeffs.carrier.k0, j, hw)));
}

double slope2(double v_coarse, double v_fine) { return std::log2(v_coarse / v_fine); }

}  // namespace

TEST_CASE("derived coefficients: closed forms and algebraic relations") {
    const CoefficientSet c = derive_coefficients(1.0);
    CHECK(c.nu1 == doctest::Approx(0.1767766952966369).epsilon(1e-14));
    CHECK(c.gamma21 == doctest::Approx(-0.8944271909999159).epsilon(1e-14));
    CHECK(c.gamma22 == doctest::Approx(+0.8944271909999159).epsilon(1e-14));
    CHECK(c.a21 == doctest::Approx(1.5099407093782342).epsilon(1e-13));
    CHECK(c.a22 == doctest::Approx(-0.17660737604490115).epsilon(1e-13));
    CHECK(c.a01 == 0.0);
    CHECK(c.a02 == 0.0);
    CHECK(c.nu2 == doctest::Approx(-0.9428090415820632).epsilon(1e-13));
    // nu2 = -rho(k0) rho(2k0) omega(2k0) / 3 for any carrier
    for (double k0 : {0.5, 1.0, 2.0}) {
        const CoefficientSet d = derive_coefficients(k0);
        CHECK(d.nu2 ==
              doctest::Approx(-rho(k0) * rho(2 * k0) * omega(2 * k0) / 3.0).epsilon(1e-13));
        const double w0 = d.carrier.omega0, w2 = omega(2 * k0);
        CHECK(d.a21 * (-2 * w0 + w2) == doctest::Approx(d.gamma21).epsilon(1e-14));
        CHECK(d.a22 * (-2 * w0 - w2) == doctest::Approx(d.gamma22).epsilon(1e-14));
        CHECK(d.nu1 > 0.0);
    }
}

TEST_CASE("second-harmonic band oracle certifies gamma_2l") {
    // with the derived amplitudes the eps^2 E^2 band drops by one power
    Lab coarse(0.1), fine(0.05);
    const double on_c = band_residual(coarse.bundle(AnsatzOrder::second), 2);
    const double on_f = band_residual(fine.bundle(AnsatzOrder::second), 2);

    auto zeroed = [](Lab& lab) {
        AnsatzBundle b = lab.bundle(AnsatzOrder::second);
        b.coeffs.a21 = 0.0;
        b.coeffs.a22 = 0.0;
        return b;
    };
    const double off_c = band_residual(zeroed(coarse), 2);
    const double off_f = band_residual(zeroed(fine), 2);

    CHECK(on_c < off_c);
    CHECK(on_f < off_f);
    CHECK(slope2(on_c, on_f) - slope2(off_c, off_f) >= 1.0);
}

TEST_CASE("mean-flow band oracle: the zero value is certified") {
    // rho(0) = 0 kills the E^0 forcing; a nonzero candidate makes the band
    // residual worse by a full power of eps
    Lab coarse(0.1), fine(0.05);
    const double on_c = band_residual(coarse.bundle(AnsatzOrder::second), 0);
    const double on_f = band_residual(fine.bundle(AnsatzOrder::second), 0);

    auto candidate = [](Lab& lab) {
        AnsatzBundle b = lab.bundle(AnsatzOrder::second);
        b.coeffs.a01 = 1.0;
        b.coeffs.a02 = 1.0;
        return b;
    };
    const double off_c = band_residual(candidate(coarse), 0);
    const double off_f = band_residual(candidate(fine), 0);

    CHECK(on_c < off_c);
    CHECK(on_f < off_f);
    CHECK(slope2(on_c, on_f) - slope2(off_c, off_f) >= 1.0);
}

TEST_CASE("carrier-band oracle certifies nu2") {
    Lab coarse(0.1), fine(0.05);
    const double on_c = band_residual(coarse.bundle(AnsatzOrder::second), 1, true);
    const double on_f = band_residual(fine.bundle(AnsatzOrder::second), 1, true);

    auto zeroed = [](Lab& lab) {
        AnsatzBundle b = lab.bundle(AnsatzOrder::second);
        b.coeffs.nu2 = 0.0;
        return b;
    };
    const double off_c = band_residual(zeroed(coarse), 1, true);
    const double off_f = band_residual(zeroed(fine), 1, true);

    CHECK(on_c < off_c);
    CHECK(on_f < off_f);
    CHECK(slope2(on_c, on_f) - slope2(off_c, off_f) >= 1.0);

    // scan over a bracket: the band residual squared is a parabola in nu2
    // whose vertex certifies the derived value
    Lab lab(0.05);
    const double nu2_true = lab.coeffs.nu2;
    std::vector<double> xs, ys;
    for (int i = -5; i <= 5; ++i) {
        AnsatzBundle b = lab.bundle(AnsatzOrder::second);
        b.coeffs.nu2 = nu2_true + 0.1 * i;
        xs.push_back(b.coeffs.nu2);
        const double r = band_residual(b, 1, true);
        ys.push_back(r * r);
    }
    // least-squares parabola vertex
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i], y = ys[i];
        s0 += 1; s1 += x; s2 += x * x; s3 += x * x * x; s4 += x * x * x * x;
        t0 += y; t1 += x * y; t2 += x * x * y;
    }
    const double det = s4 * (s2 * s0 - s1 * s1) - s3 * (s3 * s0 - s1 * s2) +
                       s2 * (s3 * s1 - s2 * s2);
    const double det_a = t2 * (s2 * s0 - s1 * s1) - s3 * (t1 * s0 - s1 * t0) +
                         s2 * (t1 * s1 - s2 * t0);
    const double det_b = s4 * (t1 * s0 - t0 * s1) - t2 * (s3 * s0 - s1 * s2) +
                         s2 * (s3 * t0 - t1 * s2);
    const double vertex = -0.5 * (det_b / det) / (det_a / det);
    CHECK(std::abs(vertex - nu2_true) < 0.01);
}

TEST_CASE("ansatz construction basics") {
    Lab lab(0.1);
    {  // zero envelope gives the zero ansatz
        Envelope z(lab.slow);
        const AnsatzBundle b =
            make_ansatz_bundle(AnsatzOrder::second, lab.eps, z, lab.coeffs, lab.fast, 0.25);
        const DiagonalState d = build_ansatz(b, 0.0);
        for (const auto& c : d.um1_hat.coeffs) CHECK(std::abs(c) == 0.0);
        for (const auto& c : d.up1_hat.coeffs) CHECK(std::abs(c) == 0.0);
    }
    {  // first order at t = 0: u_{-1} = 2 eps Re(A(eps x) e^{i k0 x}),
       // up to the zero-mode policy (the k=0 bin is held at zero)
        const DiagonalState d = build_ansatz(lab.bundle(AnsatzOrder::first), 0.0);
        const RealField u = inverse_transform(d.um1_hat, 1e-9);
        const auto av = envelope_values(lab.env);
        const int stride = lab.fast.n / lab.slow.n;
        std::vector<double> expect(lab.fast.n);
        double mean = 0.0;
        for (int i = 0; i < lab.fast.n; ++i) {
            const int lo = (i / stride) % lab.slow.n;
            // reuse slow samples only where they exist; full-grid mean needs
            // every point, so build the analytic field from the envelope FFT
            (void)lo;
        }
        // analytic field via the envelope's own interpolation
        const auto a_fast = evaluate_on_fast_grid(lab.env, lab.fast, lab.eps, 0.0, 0.0);
        for (int i = 0; i < lab.fast.n; ++i) {
            expect[i] = 2.0 * lab.eps * std::real(a_fast[i] * std::polar(1.0, lab.fast.x(i)));
            mean += expect[i];
        }
        mean /= lab.fast.n;
        for (int m = 0; m < lab.slow.n; m += 7) {
            const double x = lab.fast.x(m * stride);
            const double direct = 2.0 * lab.eps * std::real(av[m] * std::polar(1.0, x));
            CHECK(std::abs(direct - expect[m * stride]) < 1e-12);  // interpolation exact
            CHECK(std::abs(u.values[m * stride] - (expect[m * stride] - mean)) < 1e-10);
        }
        for (const auto& c : d.up1_hat.coeffs) CHECK(std::abs(c) == 0.0);
    }
    {  // realness of both slots at a generic time
        Envelope env = nls_evolve(lab.env, lab.coeffs.nls(), 0.02, 0.005);
        AnsatzBundle b =
            make_ansatz_bundle(AnsatzOrder::second, lab.eps, env, lab.coeffs, lab.fast, 0.25);
        const DiagonalState d = build_ansatz(b, 0.02 / (lab.eps * lab.eps));
        CHECK(hermitian_defect(d.um1_hat) < 1e-12);
        CHECK(hermitian_defect(d.up1_hat) < 1e-12);
    }
    {  // stale envelope is rejected
        CHECK_THROWS_AS((void)build_ansatz(lab.bundle(AnsatzOrder::second), 3.0),
                        StalenessError);
    }
    {  // order gap has the 3/2 scaling
        Lab fine(0.05);
        auto gap = [](const Lab& l) {
            const DiagonalState a = build_ansatz(l.bundle(AnsatzOrder::second), 0.0);
            const DiagonalState b = build_ansatz(l.bundle(AnsatzOrder::first), 0.0);
            SpectralField d1(l.fast), d2(l.fast);
            for (int i = 0; i < l.fast.n; ++i) {
                d1.coeffs[i] = a.um1_hat.coeffs[i] - b.um1_hat.coeffs[i];
                d2.coeffs[i] = a.up1_hat.coeffs[i] - b.up1_hat.coeffs[i];
            }
            return std::hypot(sobolev_norm(d1, 6.0), sobolev_norm(d2, 6.0));
        };
        const double s = slope2(gap(lab), gap(fine));
        CHECK(s > 1.4);
        CHECK(s < 1.6);
    }
}

TEST_CASE("band cutoff: idempotence, containment, guard, smallness") {
    Lab lab(0.1);
    AnsatzBundle uncut = lab.bundle(AnsatzOrder::second);
    uncut.cutoff_enabled = false;
    const DiagonalState raw = build_ansatz(uncut, 0.0);
    const DiagonalState cut = apply_band_cutoff(raw, 1.0, 0.25, 2);
    const DiagonalState cut2 = apply_band_cutoff(cut, 1.0, 0.25, 2);
    const auto mask = band_mask(lab.fast, 1.0, 0.25, 2);
    for (int i = 0; i < lab.fast.n; ++i) {
        CHECK(cut.um1_hat.coeffs[i] == cut2.um1_hat.coeffs[i]);  // idempotent, bit-exact
        if (!mask[i]) {
            CHECK(cut.um1_hat.coeffs[i] == complexd(0.0));
            CHECK(cut.up1_hat.coeffs[i] == complexd(0.0));
        }
    }
    CHECK_THROWS_AS((void)apply_band_cutoff(raw, 1.0, 0.5, 2), DomainError);
    CHECK_THROWS_AS((void)apply_band_cutoff(raw, 1.0, 0.0, 2), DomainError);

    // the cutoff changes the smooth ansatz superpolynomially little
    auto change = [](double eps) {
        Lab l(eps);
        AnsatzBundle b = l.bundle(AnsatzOrder::second);
        b.cutoff_enabled = false;
        const DiagonalState a = build_ansatz(b, 0.0);
        const DiagonalState c = apply_band_cutoff(a, 1.0, 0.25, 2);
        SpectralField d1(l.fast), d2(l.fast);
        for (int i = 0; i < l.fast.n; ++i) {
            d1.coeffs[i] = a.um1_hat.coeffs[i] - c.um1_hat.coeffs[i];
            d2.coeffs[i] = a.up1_hat.coeffs[i] - c.up1_hat.coeffs[i];
        }
        return std::hypot(sobolev_norm(d1, 6.0), sobolev_norm(d2, 6.0));
    };
    const double c1 = change(0.2), c2 = change(0.1), c3 = change(0.05);
    CHECK(slope2(c1, c2) >= 2.0);
    CHECK(slope2(c2, c3) >= 2.0);
}

TEST_CASE("residual: zero envelope, dispersion-exact carrier") {
    Lab lab(0.1);
    {
        Envelope z(lab.slow);
        const AnsatzBundle b =
            make_ansatz_bundle(AnsatzOrder::second, lab.eps, z, lab.coeffs, lab.fast, 0.25);
        const ResidualPair res = compute_residual(b, 0.0);
        for (const auto& c : res.res_m1.coeffs) CHECK(std::abs(c) == 0.0);
        for (const auto& c : res.res_p1.coeffs) CHECK(std::abs(c) == 0.0);
    }
    {
        // constant envelope at infinitesimal amplitude: the carrier band sees
        // only the dispersion relation, which holds exactly at k0
        const double eps = 1e-6;
        std::vector<complexd> ones(lab.slow.n, complexd(1.0));
        const Envelope flat = envelope_from_values(lab.slow, ones);
        const AnsatzBundle b =
            make_ansatz_bundle(AnsatzOrder::first, eps, flat, lab.coeffs, lab.fast, 0.25);
        const ResidualPair res = compute_residual(b, 0.0);
        CHECK(l2_norm(band_restrict(res.res_m1, 1.0, 1, 0.5)) < 1e-12);
        CHECK(l2_norm(band_restrict(res.res_m1, 1.0, -1, 0.5)) < 1e-12);
    }
}

TEST_CASE("residual order of the cutoff second-order ansatz") {
    // full H^6 norm over a four-point sweep; the fitted exponent sits in the
    // [2.4, 5.0] window (about 2.5 for the second-order hierarchy)
    std::vector<std::pair<double, double>> pts;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        Lab lab(eps);
        const ResidualPair res = compute_residual(lab.bundle(AnsatzOrder::second), 0.0);
        pts.emplace_back(eps,
                         std::hypot(sobolev_norm(res.res_m1, 6.0), sobolev_norm(res.res_p1, 6.0)));
    }
    const ScalingFit fit = fit_power_law(pts);
    CHECK(fit.slope >= 2.4);
    CHECK(fit.slope <= 5.0);
}

TEST_CASE("psi time-derivative check") {
    {  // sweep order >= 1.9 on the first-order bundle
        std::vector<std::pair<double, double>> pts;
        for (double eps : {0.2, 0.1, 0.05}) {
            Lab lab(eps);
            pts.emplace_back(eps, psi_time_derivative_check(lab.bundle(AnsatzOrder::first)));
        }
        CHECK(fit_power_law(pts).slope >= 1.9);
    }
    {  // halving the band width cannot grow the cutoff check by more than 2x
        Lab lab(0.05);
        AnsatzBundle wide = lab.bundle(AnsatzOrder::second);
        AnsatzBundle narrow =
            make_ansatz_bundle(AnsatzOrder::second, lab.eps, lab.env, lab.coeffs, lab.fast, 0.125);
        const double vw = psi_time_derivative_check(wide);
        const double vn = psi_time_derivative_check(narrow);
        CHECK(vn <= 2.0 * vw);
    }
    {  // constant envelope with the cubic phase disabled: exact carrier
        Lab lab(0.1);
        std::vector<complexd> ones(lab.slow.n, complexd(1.0));
        const Envelope flat = envelope_from_values(lab.slow, ones);
        CoefficientSet cs = lab.coeffs;
        cs.nu2 = 0.0;
        const AnsatzBundle b =
            make_ansatz_bundle(AnsatzOrder::second, lab.eps, flat, cs, lab.fast, 0.25);
        CHECK(psi_time_derivative_check(b) < 1e-12);
    }
}

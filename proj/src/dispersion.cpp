#include "nlskg/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace nlskg {

double omega(double k) { return (k >= 0.0 ? 1.0 : -1.0) * std::sqrt(1.0 + k * k); }

double rho(double k) { return (k >= 0.0 ? 1.0 : -1.0) * k * k / std::sqrt(1.0 + k * k); }

double omega_prime(double k) { return std::abs(k) / std::sqrt(1.0 + k * k); }

double rho_prime(double k) {
    const double s = k >= 0.0 ? 1.0 : -1.0;
    const double w = 1.0 + k * k;
    return s * k * (2.0 + k * k) / (w * std::sqrt(w));
}

double omega_branch(double k, int branch) {
    if (k == 0.0) return branch >= 0 ? 1.0 : -1.0;
    return omega(k);
}

CarrierData carrier(double k0) {
    if (!(k0 > 0.0)) throw DomainError("carrier: k0 must be positive");
    CarrierData c;
    c.k0 = k0;
    const double w = std::sqrt(1.0 + k0 * k0);
    c.omega0 = w;
    c.cg = k0 / w;
    c.omega2 = 1.0 / (w * w * w);
    return c;
}

NonresonanceScan nonresonance_constant(double k0, double k1, int grid_density,
                                       double k_max_override) {
    if (!(k1 > 0.0)) throw DomainError("nonresonance_constant: k1 must be positive");
    if (grid_density < 100) throw DomainError("nonresonance_constant: density must be >= 100");
    const double k_max = k_max_override > 0.0 ? k_max_override : std::max(10.0 * k1, 50.0);
    const double h = 1.0 / grid_density;
    const long nk = std::lround(k_max / h);
    const long np = std::lround(std::ceil(k1 / h - 1e-12));

    // omega on the combined lattice {i*h : |i| <= nk + np}; index offset nk+np.
    const long noff = nk + np;
    std::vector<double> w(2 * noff + 1);
    for (long i = -noff; i <= noff; ++i) w[i + noff] = omega(i * h);

    NonresonanceScan best;
    best.min_gap = std::numeric_limits<double>::infinity();
    best.k_max = k_max;
    best.density = grid_density;

    auto consider = [&](double wk, double wp, double wd, long ik, long ip) {
        // all four sign pairs (j1, j2)
        const double cands[4] = {std::abs(-wk - wp + wd), std::abs(-wk - wp - wd),
                                 std::abs(wk - wp + wd), std::abs(wk - wp - wd)};
        static const int j1s[4] = {1, 1, -1, -1};
        static const int j2s[4] = {1, -1, 1, -1};
        for (int c = 0; c < 4; ++c) {
            if (cands[c] < best.min_gap) {
                best.min_gap = cands[c];
                best.k_at = ik * h;
                best.p_at = ip * h;
                best.j1 = j1s[c];
                best.j2 = j2s[c];
            }
        }
    };

    // Interior points: no argument at the sign discontinuity.
    for (long ip = -np; ip <= np; ++ip) {
        if (ip == 0) continue;
        const double wp = w[ip + noff];
        const double* wrow = w.data() + noff - ip;
        double local = best.min_gap;
        long local_ik = 0;
        for (long ik = -nk; ik <= nk; ++ik) {
            if (ik == 0 || ik == ip) continue;
            const double wk = w[ik + noff];
            const double wd = wrow[ik];
            const double m1 = std::min(std::abs(-wk - wp + wd), std::abs(-wk - wp - wd));
            const double m2 = std::min(std::abs(wk - wp + wd), std::abs(wk - wp - wd));
            const double m = std::min(m1, m2);
            if (m < local) {
                local = m;
                local_ik = ik;
            }
        }
        if (local < best.min_gap) consider(w[local_ik + noff], wp, w[local_ik - ip + noff], local_ik, ip);
    }

    // Discontinuity lines, with both one-sided branches at each zero argument.
    for (long ip = -np; ip <= np; ++ip) {  // k = 0
        if (ip == 0) {  // triple zero: independent branches
            for (int bk = -1; bk <= 1; bk += 2)
                for (int bp = -1; bp <= 1; bp += 2)
                    for (int bd = -1; bd <= 1; bd += 2) consider(bk, bp, bd, 0, 0);
            continue;
        }
        const double wp = w[ip + noff];
        const double wd = w[-ip + noff];
        for (int bk = -1; bk <= 1; bk += 2) consider(bk, wp, wd, 0, ip);
    }
    for (long ik = -nk; ik <= nk; ++ik) {  // p = 0 and k = p
        if (ik != 0) {
            const double wk = w[ik + noff];
            for (int bp = -1; bp <= 1; bp += 2) consider(wk, bp, wk, ik, 0);  // p = 0, k-p = k
            if (std::abs(ik) <= np)
                for (int bd = -1; bd <= 1; bd += 2) consider(wk, wk, bd, ik, ik);  // k = p
        }
    }
    (void)k0;  // grid anchoring at integer multiples of 1/density covers k0
    return best;
}

std::vector<std::pair<int, double>> harmonic_nonresonance(double k0, int m_max) {
    if (!(k0 > 0.0)) throw DomainError("harmonic_nonresonance: k0 must be positive");
    if (m_max < 2) throw DomainError("harmonic_nonresonance: m_max must be >= 2");
    std::vector<std::pair<int, double>> gaps;
    for (int m = 2; m <= m_max; ++m) {
        const double a = std::abs(omega(m * k0) - m * omega(k0));
        const double b = std::abs(omega(m * k0) + m * omega(k0));
        gaps.emplace_back(m, std::min(a, b));
    }
    return gaps;
}

}  // namespace nlskg

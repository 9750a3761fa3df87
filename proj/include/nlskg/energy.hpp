#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nlskg/kg_solver.hpp"
#include "nlskg/spectral.hpp"

namespace nlskg {

// Scaled error fields: (u_j^sim - eps psi_j) / eps^{5/2}.
struct ErrorPair {
    SpectralField r_m1;
    SpectralField r_p1;
    double eps = 0.0;
    double t = 0.0;
};

// The combined real field psi = psi_{-1} + psi_1 + eps psi_{q-1} + eps psi_{q1}
// (the sum of both diagonal slots of the ansatz divided by eps) together with
// the indicator of its spectral support.
struct PsiData {
    SpectralField psi_hat;
    std::vector<char> chi_mask;
};

struct EnergyBreakdown {
    std::vector<double> e_ell;  // E_0 .. E_s
    std::vector<double> h_ell;  // h_1 .. h_s
    double e_total = 0.0;       // sum E_ell
    double e_modified = 0.0;    // e_total + eps^2/2 * sum h_ell
    int s = 0;
};

ErrorPair extract_error(const DiagonalState& sim, const DiagonalState& ansatz, double eps);
PsiData make_psi(const DiagonalState& ansatz, double eps);

// Normal-form kernel n_{j1 j2}(k, k-m, m) = -j1 rho(k) chi / (-j1 w(k) - w(k-m) + j2 w(m)).
// chi is supplied by the caller (1 inside the psi band).
double n_kernel(int j1, int j2, double k, double km, double m);

// Kernel of S_{j2 j1}(dx h, .) with the dx-h factor folded in:
// -j1 (rho(k) - rho(m)) / (-j2 w(k) - w(k-m) + j1 w(m)); the displayed kernel
// s(k, k-m, m) itself carries 1/((k-m) i), evaluated by the difference
// quotient with rho'(m) at the removable point k = m.
complexd s_kernel(int j2, int j1, double k, double km, double m);

// G_{jj} multiplier chi(k)/(-i (w(k) + j k)) and G_{j,-j} = chi(k)/2.
complexd g_multiplier(int j1, int j2, double k);

// Band-limited kernel sums; cost O(n * |supp psi|). Denominators below the
// guard raise ResonanceError (unreachable for correctly configured bands).
SpectralField apply_N(const PsiData& psi, const SpectralField& f, int j1, int j2);
SpectralField apply_G(const PsiData& psi, const SpectralField& h, int j1, int j2);
SpectralField apply_S(const PsiData& psi, const SpectralField& h, const SpectralField& f,
                      int j2, int j1);

// Relative discrepancy of
//   -j1 i w N(psi,f) - N(i w psi, f) + j2 N(psi, i w f) = -j1 i rho (psi f).
double check_normal_form_identity(const PsiData& psi, const SpectralField& f, int j1, int j2);

// Relative discrepancy of
//   int f N_{j1j2}(h,g) = -(j1/j2) int N_{j2j1}(h,f) g + int S_{j2j1}(dx h, f) g.
double check_adjoint_identity(const PsiData& psi, const SpectralField& f,
                              const SpectralField& g, int j1, int j2);

// First: quadrature defect of int a f f' dx = -1/2 int a' f^2 dx (per slot j=+1).
// Second: defect of the two-slot rearrangement against its exact remainder
//   sum_j int a_j f_j f_{-j}' = 1/2 int (a_{-1}-a_1)(f_1+f_{-1}) d_x(f_1-f_{-1})
//        + 1/4 int d_x(a_{-1}-a_1) (f_1^2 - f_{-1}^2) - 1/2 sum_j int a_j' f_j f_{-j}.
std::pair<double, double> check_parts_identities(const SpectralField& a_m1,
                                                 const SpectralField& a_p1,
                                                 const SpectralField& f_m1,
                                                 const SpectralField& f_p1);

// E_ell, h_ell, and the totals E_s and E~_s = E_s + eps^2/2 sum h_ell.
EnergyBreakdown energy(const ErrorPair& err, const PsiData& psi, int s);

struct EnergyTracePoint {
    double t = 0.0;
    double e_s = 0.0;
    double e_mod = 0.0;
    double de_dt = 0.0;  // centered difference of e_mod
    double ratio = 0.0;  // de_dt / (eps^2 (E~ + eps^{1/2} E~^{3/2} + 1))
};

struct EnergyTrace {
    std::vector<EnergyTracePoint> points;
    double sup_e_s = 0.0;
    double sup_e_mod = 0.0;
    double sup_abs_ratio = 0.0;
    double sup_gap = 0.0;  // sup |E~ - E|
};

using AnsatzProvider = std::function<DiagonalState(double)>;

EnergyTrace energy_trace(const std::vector<DiagonalState>& checkpoints,
                         const AnsatzProvider& ansatz_at, double eps, int s);

}  // namespace nlskg

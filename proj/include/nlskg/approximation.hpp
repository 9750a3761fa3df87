#pragma once

#include "nlskg/dispersion.hpp"
#include "nlskg/kg_solver.hpp"
#include "nlskg/nls_solver.hpp"
#include "nlskg/spectral.hpp"

namespace nlskg {

// Modulation coefficients for carrier k0. The second-harmonic amplitudes are
// a2l * A^2 and the mean-flow amplitudes a0l * |A|^2; they satisfy
//   a21 (-2 w0 + w(2k0)) = gamma21,   a22 (-2 w0 - w(2k0)) = gamma22,
// and nu2 = -rho(k0) (a21 + a22 + a01 + a02).
struct CoefficientSet {
    CarrierData carrier;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double gamma21 = 0.0;
    double gamma22 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;
    double a01 = 0.0;
    double a02 = 0.0;

    NlsParams nls() const { return {nu1, nu2, carrier.k0}; }
};

// Reads the quadratic-coupling coefficients off the diagonalized system:
// gamma21 = -rho(2k0)/2, gamma22 = +rho(2k0)/2, the mean-flow forcing
// vanishes with rho(0), and eliminating the harmonics from the carrier-band
// cubic balance gives nu2 = -rho(k0) rho(2k0) w(2k0) / 3.
CoefficientSet derive_coefficients(double k0);

enum class AnsatzOrder { first, second };

// Everything needed to evaluate the modulation ansatz at a time t with
// T = eps^2 t: first order is the carrier band alone; second order adds the
// harmonic and mean-flow corrections and (by default) the Fourier-band
// cutoff of half-width cutoff_delta around j*k0, |j| <= 2.
struct AnsatzBundle {
    AnsatzOrder order = AnsatzOrder::first;
    double eps = 0.0;
    CoefficientSet coeffs;
    Envelope envelope;
    double cutoff_delta = 0.0;
    FourierGrid fast;
    bool cutoff_enabled = false;
    int max_band = 2;
};

AnsatzBundle make_ansatz_bundle(AnsatzOrder order, double eps, const Envelope& envelope,
                                const CoefficientSet& coeffs, const FourierGrid& fast,
                                double cutoff_delta);

// The ansatz as a diagonal state (throws StalenessError unless the bundle's
// envelope is at T = eps^2 t).
DiagonalState build_ansatz(const AnsatzBundle& b, double t);

// Analytic d/dt of the ansatz: carrier phases contribute -i j w0, the slow
// first argument -eps cg d_X, and d_T A is substituted from the NLS equation.
std::pair<SpectralField, SpectralField> ansatz_time_derivative(const AnsatzBundle& b, double t);

std::vector<char> band_mask(const FourierGrid& g, double k0, double delta, int max_band);
SpectralField apply_band_cutoff(const SpectralField& F, double k0, double delta, int max_band);
DiagonalState apply_band_cutoff(const DiagonalState& d, double k0, double delta, int max_band);

// Restriction to [j k0 - half_width, j k0 + half_width).
SpectralField band_restrict(const SpectralField& F, double k0, int j, double half_width);

struct ResidualPair {
    SpectralField res_m1;
    SpectralField res_p1;
    double t = 0.0;
};

// Res = -d/dt(ansatz) + Lambda(ansatz) + B(ansatz, ansatz), all terms on the
// cutoff ansatz; the time derivative is analytic, never finite-differenced.
ResidualPair compute_residual(const AnsatzBundle& b, double t);

// || d/dt psi_1 + i w psi_1 ||_{L^1(6)} for the carrier-band component
// psi_1 = A E (without the eps scaling).
double psi_time_derivative_check(const AnsatzBundle& b);

}  // namespace nlskg

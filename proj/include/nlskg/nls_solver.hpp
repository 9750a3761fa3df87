#pragma once

#include <vector>

#include "nlskg/dispersion.hpp"
#include "nlskg/spectral.hpp"

namespace nlskg {

struct NlsParams {
    double nu1 = 0.0;  // omega''(k0)/2
    double nu2 = 0.0;
    double k0 = 0.0;
};

// Complex amplitude A on the slow grid (length L_X = eps * L_fast). The
// coefficients are a general complex field; no Hermitian symmetry.
struct Envelope {
    FourierGrid grid;
    std::vector<complexd> a_hat;
    double T = 0.0;

    Envelope() = default;
    explicit Envelope(const FourierGrid& g) : grid(g), a_hat(g.n, complexd(0.0)) {}
};

Envelope envelope_from_values(const FourierGrid& g, const std::vector<complexd>& values,
                              double T = 0.0);
std::vector<complexd> envelope_values(const Envelope& e);

Envelope sech_envelope(const FourierGrid& g);
Envelope gaussian_envelope(const FourierGrid& g, double sigma = 1.0);

// One Strang step of dA/dT = i nu1 A_XX + i nu2 A |A|^2: exact nonlinear
// phase rotation (half), exact linear multiplier (full), nonlinear (half).
// Both substeps preserve the discrete mass L_X sum |a|^2.
Envelope nls_step(const Envelope& e, const NlsParams& p, double dT);

// Evolves to target_T in steps of at most dT.
Envelope nls_evolve(Envelope e, const NlsParams& p, double target_T, double dT);

double mass(const Envelope& e);      // L_X * sum |a|^2
double momentum(const Envelope& e);  // sum K |a|^2

// Closed-form sech soliton A(X,T) = eta sqrt(2 nu1/nu2) sech(eta X) exp(i nu1 eta^2 T);
// requires the focusing sign nu1*nu2 > 0.
struct Soliton {
    NlsParams params;
    double eta = 0.0;
    complexd operator()(double X, double T) const;
    Envelope sample(const FourierGrid& g, double T) const;
};

Soliton soliton(const NlsParams& p, double eta);

// A(eps(x - cg t)) at every fast collocation point: exact Fourier
// interpolation with the phase shift exp(-i K eps cg t) on the slow modes.
std::vector<complexd> evaluate_on_fast_grid(const Envelope& e, const FourierGrid& fast,
                                            double eps, double cg, double t);

}  // namespace nlskg

#pragma once

#include <functional>
#include <string>

#include "nlskg/grid.hpp"
#include "nlskg/rng.hpp"

namespace nlskg {

// A Fourier multiplier, evaluated per wavenumber. The zero-mode convention
// for sign-discontinuous symbols is sign(0) = +1; experiments keep c_0 = 0
// so the convention never carries data.
struct Symbol {
    std::function<complexd(double)> evaluator;
    std::string name;

    complexd operator()(double k) const { return evaluator(k); }
};

Symbol omega_symbol();        // sign(k) sqrt(1+k^2)
Symbol rho_symbol();          // sign(k) k^2 / sqrt(1+k^2)
Symbol hilbert_symbol();      // -i sign(k)
Symbol sqrt_1k2_symbol();     // sqrt(1+k^2)
Symbol derivative_symbol(int order);  // (ik)^order

// DFT of the collocation values; round trip with inverse_transform is the
// identity to rounding, and Parseval holds in the quadrature norms below.
SpectralField transform(const RealField& f);
RealField inverse_transform(const SpectralField& F, double symmetry_tol = 1e-12);

// Inverse transform without the Hermitian-symmetry check, for complex fields.
std::vector<complexd> inverse_transform_complex(const SpectralField& F);
SpectralField transform_complex(const FourierGrid& g, const std::vector<complexd>& values);

SpectralField apply_multiplier(const SpectralField& F, const Symbol& s);

// Pointwise product computed alias-free by the 2/3 rule: modes |j| > n/3 are
// zeroed in the inputs and in the result, so what remains is the exact
// convolution of the retained modes.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);
int dealias_limit(const FourierGrid& g);  // largest retained |j|

// sqrt( L * sum_j (1+k_j^2)^s |c_j|^2 ), the quadrature H^s norm.
double sobolev_norm(const SpectralField& F, double s);

// sum_j (1+k_j^2)^{s/2} |c_j|; the Riemann sum of the weighted L^1 norm of
// the coefficient density (bin width and density normalization cancel).
double weighted_l1_norm(const SpectralField& F, double s);

// L * sum_j conj(a_j) b_j; real part is the L^2(0..L) inner product of the
// underlying fields when both are real.
complexd l2_inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& a);

double linf_norm(const SpectralField& a);     // max |field| in physical space
double hermitian_defect(const SpectralField& F);  // max |c_{-j} - conj(c_j)|
bool is_hermitian(const SpectralField& F, double tol = 1e-12);
void require_finite(const SpectralField& F);
void require_zero_mean(const SpectralField& F, double tol = 1e-12);

SpectralField random_band_limited(const FourierGrid& g, int max_mode, SplitMix64& rng,
                                  bool zero_mean = true);

}  // namespace nlskg

#pragma once

#include <utility>
#include <vector>

#include "nlskg/errors.hpp"

namespace nlskg {

// Scalar dispersion quantities for omega(k) = sign(k) sqrt(1+k^2) and
// rho(k) = sign(k) k^2/sqrt(1+k^2), with the sign(0) = +1 convention.
double omega(double k);
double rho(double k);
double omega_prime(double k);
double rho_prime(double k);
// One-sided values at the sign discontinuity; branch = +1 or -1 selects the
// sign used where the argument vanishes.
double omega_branch(double k, int branch);

struct CarrierData {
    double k0 = 0.0;
    double omega0 = 0.0;  // omega(k0)
    double cg = 0.0;      // omega'(k0)
    double omega2 = 0.0;  // omega''(k0)
};

CarrierData carrier(double k0);

struct NonresonanceScan {
    double min_gap = 0.0;
    double k_at = 0.0;
    double p_at = 0.0;
    int j1 = 0;
    int j2 = 0;
    double k_max = 0.0;
    double density = 0.0;
};

// Minimum of |-j1 w(k) - w(p) + j2 w(k-p)| over a uniform grid of
// k in [-K_max, K_max], p in [-k1, k1] and all four sign pairs, evaluating
// both one-sided branches wherever an argument crosses zero. Grid points at
// multiples of 1/grid_density include 0, +-k0, and +-k1 exactly when these
// are multiples of the spacing.
NonresonanceScan nonresonance_constant(double k0, double k1, int grid_density,
                                       double k_max_override = 0.0);

// gap_m = min(|w(m k0) - m w(k0)|, |w(m k0) + m w(k0)|) for m = 2..m_max.
std::vector<std::pair<int, double>> harmonic_nonresonance(double k0, int m_max);

}  // namespace nlskg

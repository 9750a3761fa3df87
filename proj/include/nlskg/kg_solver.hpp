#pragma once

#include <functional>
#include <utility>

#include "nlskg/spectral.hpp"

namespace nlskg {

// State of the second-order formulation: position u and velocity w = du/dt.
struct KgState {
    SpectralField u_hat;
    SpectralField w_hat;
    double t = 0.0;
};

// State of the diagonalized first-order system (u_{-1}, u_{+1}); each slot is
// an individually real field, and u = u_{-1} + u_{+1}.
struct DiagonalState {
    SpectralField um1_hat;
    SpectralField up1_hat;
    double t = 0.0;

    const FourierGrid& grid() const { return um1_hat.grid; }
};

enum class Scheme { lawson_rk4, strang_split };

struct StepperConfig {
    double dt = 0.05;
    Scheme scheme = Scheme::lawson_rk4;
    double t_end = 0.0;
    int observer_stride = 1;
    bool linear_only = false;  // drop the quadratic term (exact propagation)

    void validate() const {
        if (!(dt > 0.0) || dt > 0.25) throw ConfigError("StepperConfig: need 0 < dt <= 0.25");
        if (t_end < 0.0) throw ConfigError("StepperConfig: t_end must be >= 0");
        if (observer_stride < 1) throw ConfigError("StepperConfig: stride must be >= 1");
    }
};

// v_hat = w_hat / (-i omega), then the half-sum/half-difference pair.
DiagonalState diagonalize(const KgState& s);
KgState undiagonalize(const DiagonalState& d);

// Time derivatives (-iw u_{-1} - i rho F / 2, +iw u_{+1} + i rho F / 2) with
// F the dealiased square of u_{-1} + u_{+1}.
std::pair<SpectralField, SpectralField> rhs_diagonal(const DiagonalState& d);

// Precomputed per-grid stepper for the diagonal system. Lawson-RK4 treats the
// linear phases exactly; strang_split alternates exact linear half-steps with
// the exactly solvable frozen-u nonlinear step.
class DiagonalStepper {
  public:
    DiagonalStepper(const FourierGrid& grid, const StepperConfig& cfg);
    DiagonalState step(const DiagonalState& d) const;
    double dt() const { return cfg_.dt; }

  private:
    void nonlinearity(const std::vector<complexd>& um1, const std::vector<complexd>& up1,
                      std::vector<complexd>& out) const;

    FourierGrid grid_;
    StepperConfig cfg_;
    std::vector<complexd> half_m1_, half_p1_;  // exp(-/+ i w dt/2)
    std::vector<double> rho_half_;             // rho(k)/2
    std::vector<char> dealias_keep_;
};

DiagonalState step(const DiagonalState& d, const StepperConfig& cfg);

// Lawson-RK4 on (u, w) with the exact per-mode rotation of the linear block
// as integrating factor.
KgState step_second_order(const KgState& s, const StepperConfig& cfg);

// Conserved functional of the flow: integral of
//   p^2/2 + u^2/2 + (dx^{-1} u)^2/2 + u^3/3,   p = dx^{-1} w.
double hamiltonian(const KgState& s);

struct TrajectorySummary {
    int steps = 0;
    int observations = 0;
    double t_final = 0.0;
};

using Observer = std::function<void(const DiagonalState&)>;

// Steps d to cfg.t_end, invoking the observer at t = 0 and after every
// observer_stride steps. Throws BlowUpError (with the time) on NaN or on
// coefficients beyond the trust threshold.
TrajectorySummary simulate(DiagonalState d, const StepperConfig& cfg, const Observer& observe);

}  // namespace nlskg

#include "nlskg/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace nlskg {

namespace {

// Cached FFTW plans per size. Data is copied through plan-owned aligned
// buffers; planning uses FFTW_ESTIMATE so the algorithm choice (and thus
// rounding) is reproducible run to run.
class FftEngine {
  public:
    static FftEngine& instance() {
        static FftEngine engine;
        return engine;
    }

    void forward(std::vector<complexd>& data) { execute(data, /*sign=*/FFTW_FORWARD); }
    void backward(std::vector<complexd>& data) { execute(data, /*sign=*/FFTW_BACKWARD); }

  private:
    struct Plans {
        fftw_complex* buf = nullptr;
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
        ~Plans() {
            if (fwd) fftw_destroy_plan(fwd);
            if (bwd) fftw_destroy_plan(bwd);
            if (buf) fftw_free(buf);
        }
    };

    void execute(std::vector<complexd>& data, int sign) {
        const int n = static_cast<int>(data.size());
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it == plans_.end()) {
            auto p = std::make_unique<Plans>();
            p->buf = fftw_alloc_complex(n);
            p->fwd = fftw_plan_dft_1d(n, p->buf, p->buf, FFTW_FORWARD, FFTW_ESTIMATE);
            p->bwd = fftw_plan_dft_1d(n, p->buf, p->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
            it = plans_.emplace(n, std::move(p)).first;
        }
        Plans& p = *it->second;
        std::copy_n(reinterpret_cast<const double*>(data.data()), 2 * n,
                    reinterpret_cast<double*>(p.buf));
        fftw_execute(sign == FFTW_FORWARD ? p.fwd : p.bwd);
        std::copy_n(reinterpret_cast<const double*>(p.buf), 2 * n,
                    reinterpret_cast<double*>(data.data()));
    }

    std::mutex mutex_;
    std::map<int, std::unique_ptr<Plans>> plans_;
};

double sign_pos(double k) { return k >= 0.0 ? 1.0 : -1.0; }

}  // namespace

Symbol omega_symbol() {
    return {[](double k) { return complexd(sign_pos(k) * std::sqrt(1.0 + k * k)); }, "omega"};
}

Symbol rho_symbol() {
    return {[](double k) { return complexd(sign_pos(k) * k * k / std::sqrt(1.0 + k * k)); },
            "rho"};
}

Symbol hilbert_symbol() {
    return {[](double k) { return complexd(0.0, -sign_pos(k)); }, "hilbert"};
}

Symbol sqrt_1k2_symbol() {
    return {[](double k) { return complexd(std::sqrt(1.0 + k * k)); }, "sqrt(1-dxx)"};
}

Symbol derivative_symbol(int order) {
    return {[order](double k) { return std::pow(complexd(0.0, k), order); },
            "d" + std::to_string(order)};
}

SpectralField transform(const RealField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) throw InvalidFieldError("transform: non-finite value");
    const int n = f.grid.n;
    std::vector<complexd> data(f.values.begin(), f.values.end());
    FftEngine::instance().forward(data);
    // x_0 = -L/2 shifts each mode by exp(i k_j L/2) = (-1)^j.
    SpectralField F(f.grid);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const double phase = (i % 2 == 0) ? 1.0 : -1.0;
        F.coeffs[i] = data[i] * (phase * inv_n);
    }
    return F;
}

RealField inverse_transform(const SpectralField& F, double symmetry_tol) {
    require_finite(F);
    if (!is_hermitian(F, symmetry_tol))
        throw SymmetryError("inverse_transform: field is not Hermitian-symmetric");
    const auto values = inverse_transform_complex(F);
    RealField f(F.grid);
    for (int i = 0; i < F.grid.n; ++i) f.values[i] = values[i].real();
    return f;
}

std::vector<complexd> inverse_transform_complex(const SpectralField& F) {
    const int n = F.grid.n;
    std::vector<complexd> data(n);
    for (int i = 0; i < n; ++i) {
        const double phase = (i % 2 == 0) ? 1.0 : -1.0;
        data[i] = F.coeffs[i] * phase;
    }
    FftEngine::instance().backward(data);
    return data;
}

SpectralField transform_complex(const FourierGrid& g, const std::vector<complexd>& values) {
    if (static_cast<int>(values.size()) != g.n)
        throw GridMismatchError("transform_complex: size mismatch");
    std::vector<complexd> data = values;
    FftEngine::instance().forward(data);
    SpectralField F(g);
    const double inv_n = 1.0 / g.n;
    for (int i = 0; i < g.n; ++i) {
        const double phase = (i % 2 == 0) ? 1.0 : -1.0;
        F.coeffs[i] = data[i] * (phase * inv_n);
    }
    return F;
}

SpectralField apply_multiplier(const SpectralField& F, const Symbol& s) {
    require_finite(F);
    SpectralField out(F.grid);
    for (int i = 0; i < F.grid.n; ++i) out.coeffs[i] = s(F.grid.wavenumber(i)) * F.coeffs[i];
    return out;
}

int dealias_limit(const FourierGrid& g) { return g.n / 3; }

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
    if (f.grid != g.grid) throw GridMismatchError("dealiased_product: grids differ");
    const int n = f.grid.n;
    const int jmax = dealias_limit(f.grid);
    SpectralField fa = f, ga = g;
    for (int i = 0; i < n; ++i) {
        if (std::abs(f.grid.signed_index(i)) > jmax) {
            fa.coeffs[i] = 0.0;
            ga.coeffs[i] = 0.0;
        }
    }
    auto fv = inverse_transform_complex(fa);
    const auto gv = inverse_transform_complex(ga);
    for (int i = 0; i < n; ++i) fv[i] *= gv[i];
    SpectralField out = transform_complex(f.grid, fv);
    for (int i = 0; i < n; ++i)
        if (std::abs(f.grid.signed_index(i)) > jmax) out.coeffs[i] = 0.0;
    return out;
}

double sobolev_norm(const SpectralField& F, double s) {
    if (s < 0.0) throw DomainError("sobolev_norm: s must be non-negative");
    double acc = 0.0;
    for (int i = 0; i < F.grid.n; ++i) {
        const double k = F.grid.wavenumber(i);
        acc += std::pow(1.0 + k * k, s) * std::norm(F.coeffs[i]);
    }
    return std::sqrt(F.grid.length * acc);
}

double weighted_l1_norm(const SpectralField& F, double s) {
    if (s < 0.0) throw DomainError("weighted_l1_norm: s must be non-negative");
    double acc = 0.0;
    for (int i = 0; i < F.grid.n; ++i) {
        const double k = F.grid.wavenumber(i);
        acc += std::pow(1.0 + k * k, 0.5 * s) * std::abs(F.coeffs[i]);
    }
    return acc;
}

complexd l2_inner(const SpectralField& a, const SpectralField& b) {
    if (a.grid != b.grid) throw GridMismatchError("l2_inner: grids differ");
    complexd acc(0.0);
    for (int i = 0; i < a.grid.n; ++i) acc += std::conj(a.coeffs[i]) * b.coeffs[i];
    return a.grid.length * acc;
}

double l2_norm(const SpectralField& a) { return sobolev_norm(a, 0.0); }

double linf_norm(const SpectralField& a) {
    const auto values = inverse_transform_complex(a);
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

double hermitian_defect(const SpectralField& F) {
    const int n = F.grid.n;
    double defect = std::abs(F.coeffs[n / 2].imag());  // unpaired mode -n/2
    for (int i = 1; i < n / 2; ++i)
        defect = std::max(defect, std::abs(F.coeffs[i] - std::conj(F.coeffs[n - i])));
    defect = std::max(defect, std::abs(F.coeffs[0].imag()));
    return defect;
}

bool is_hermitian(const SpectralField& F, double tol) {
    double scale = 0.0;
    for (const auto& c : F.coeffs) scale = std::max(scale, std::abs(c));
    return hermitian_defect(F) <= tol * std::max(scale, 1.0);
}

void require_finite(const SpectralField& F) {
    for (const auto& c : F.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidFieldError("non-finite spectral coefficient");
}

void require_zero_mean(const SpectralField& F, double tol) {
    if (std::abs(F.coeffs[0]) > tol)
        throw ZeroModeError("field has nonzero mean: |c_0| = " + std::to_string(std::abs(F.coeffs[0])));
}

SpectralField random_band_limited(const FourierGrid& g, int max_mode, SplitMix64& rng,
                                  bool zero_mean) {
    SpectralField F(g);
    if (max_mode >= g.n / 2) throw DomainError("random_band_limited: band exceeds grid");
    for (int j = 1; j <= max_mode; ++j) {
        const complexd c(rng.symmetric(), rng.symmetric());
        F.mode(j) = c;
        F.mode(-j) = std::conj(c);
    }
    if (!zero_mean) F.mode(0) = complexd(rng.symmetric(), 0.0);
    return F;
}

}  // namespace nlskg

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nlskg/errors.hpp"

namespace nlskg {

using complexd = std::complex<double>;

// Uniform periodic grid on [-L/2, L/2) with n collocation points.
// Spectral data is stored in FFT bin order: bin i holds the signed mode
// j = i for i < n/2 and j = i - n otherwise, at wavenumber k_j = 2*pi*j/L.
struct FourierGrid {
    int n = 0;
    double length = 0.0;

    FourierGrid() = default;
    FourierGrid(int n_, double length_) : n(n_), length(length_) {
        if (n < 8 || n % 2 != 0) throw DomainError("FourierGrid: n must be even and >= 8");
        if (!(length > 0.0)) throw DomainError("FourierGrid: length must be positive");
    }

    // Domain of m carrier wavelengths, so k0 = 2*pi*m/L sits on the grid
    // bit-exactly at bin m.
    static FourierGrid for_carrier(double k0, int wavelengths, int points_per_wavelength) {
        if (!(k0 > 0.0)) throw DomainError("for_carrier: k0 must be positive");
        if (wavelengths < 1) throw DomainError("for_carrier: wavelengths must be >= 1");
        return FourierGrid(wavelengths * points_per_wavelength,
                           2.0 * std::numbers::pi * wavelengths / k0);
    }

    double dk() const { return 2.0 * std::numbers::pi / length; }
    double dx() const { return length / n; }
    double x(int m) const { return -0.5 * length + m * dx(); }

    int signed_index(int bin) const { return bin < n / 2 ? bin : bin - n; }
    int bin_of(int j) const { return j >= 0 ? j : j + n; }
    double wavenumber(int bin) const { return dk() * signed_index(bin); }
    bool mode_in_range(int j) const { return j >= -n / 2 && j < n / 2; }

    bool operator==(const FourierGrid& o) const { return n == o.n && length == o.length; }
    bool operator!=(const FourierGrid& o) const { return !(*this == o); }
};

struct RealField {
    FourierGrid grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const FourierGrid& g) : grid(g), values(g.n, 0.0) {}
    RealField(const FourierGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != g.n)
            throw InvalidFieldError("RealField: value count does not match grid");
    }
};

// Complex Fourier coefficients c_j with u(x) = sum_j c_j exp(i k_j x).
// A real field satisfies c_{-j} = conj(c_j).
struct SpectralField {
    FourierGrid grid;
    std::vector<complexd> coeffs;

    SpectralField() = default;
    explicit SpectralField(const FourierGrid& g) : grid(g), coeffs(g.n, complexd(0.0)) {}
    SpectralField(const FourierGrid& g, std::vector<complexd> c) : grid(g), coeffs(std::move(c)) {
        if (static_cast<int>(coeffs.size()) != g.n)
            throw InvalidFieldError("SpectralField: coefficient count does not match grid");
    }

    complexd& mode(int j) { return coeffs[grid.bin_of(j)]; }
    const complexd& mode(int j) const { return coeffs[grid.bin_of(j)]; }

    int size() const { return grid.n; }
};

}  // namespace nlskg

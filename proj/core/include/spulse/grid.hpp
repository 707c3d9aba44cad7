#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace spulse {

using cplx = std::complex<double>;

/// 64-byte aligned storage so FFTW can use its SIMD codelets on every buffer.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t count) {
        return static_cast<T*>(::operator new(count * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RVec = std::vector<double, AlignedAllocator<double>>;

/// Uniform periodic grid on [-L/2, L/2) with n a power of two.
///
/// Spectral arrays use FFT storage order: slot j holds the wavenumber
/// k = j for j < n/2 and k = j - n otherwise, so slot n/2 is the lone
/// Nyquist mode k = -n/2.
class Grid {
public:
    Grid(std::size_t n, double length);

    std::size_t n() const { return n_; }
    double length() const { return length_; }
    double dx() const { return dx_; }
    double dxi() const { return dxi_; }

    double x(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * dx_; }
    std::ptrdiff_t mode(std::size_t slot) const {
        return slot < n_ / 2 ? static_cast<std::ptrdiff_t>(slot)
                             : static_cast<std::ptrdiff_t>(slot) - static_cast<std::ptrdiff_t>(n_);
    }
    double xi(std::size_t slot) const { return dxi_ * static_cast<double>(mode(slot)); }
    std::size_t slot(std::ptrdiff_t k) const;
    std::size_t nyquist_slot() const { return n_ / 2; }

    RVec nodes() const;
    RVec frequencies() const;

    bool operator==(const Grid& other) const {
        return n_ == other.n_ && length_ == other.length_;
    }

private:
    std::size_t n_;
    double length_;
    double dx_;
    double dxi_;
};

enum class Kind { real, complex };

/// Samples f(x_j). A real-tagged field stores zero imaginary parts.
class Field {
public:
    Field(Grid grid, CVec values, Kind kind);

    static Field zeros(const Grid& grid, Kind kind = Kind::real);
    static Field from_real(const Grid& grid, const std::vector<double>& values);

    template <class F>
    static Field sample(const Grid& grid, F&& f, Kind kind) {
        CVec v(grid.n());
        for (std::size_t j = 0; j < grid.n(); ++j) v[j] = cplx(f(grid.x(j)));
        return Field(grid, std::move(v), kind);
    }

    const Grid& grid() const { return grid_; }
    const CVec& values() const { return values_; }
    Kind kind() const { return kind_; }
    bool is_real() const { return kind_ == Kind::real; }
    std::size_t size() const { return values_.size(); }
    cplx operator[](std::size_t j) const { return values_[j]; }

    std::vector<double> real_values() const;

private:
    Grid grid_;
    CVec values_;
    Kind kind_;
};

/// Continuum-normalized Fourier coefficients in FFT storage order.
class SpectralField {
public:
    SpectralField(Grid grid, CVec coeffs, Kind kind);

    const Grid& grid() const { return grid_; }
    const CVec& coeffs() const { return coeffs_; }
    Kind kind() const { return kind_; }
    cplx operator[](std::size_t slot) const { return coeffs_[slot]; }

private:
    Grid grid_;
    CVec coeffs_;
    Kind kind_;
};

/// Imaginary parts up to this fraction of max |f| are accepted as round-off
/// when a field is tagged real.
inline constexpr double kRealTolerance = 1e-10;

} // namespace spulse

#include "spulse/grid.hpp"

#include "spulse/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace spulse {

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
    if (n < 2 || !std::has_single_bit(n))
        throw InvalidArgument("grid size must be a power of two >= 2, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("grid length must be positive and finite");
    dx_ = length_ / static_cast<double>(n_);
    dxi_ = 2.0 * std::numbers::pi / length_;
}

std::size_t Grid::slot(std::ptrdiff_t k) const {
    const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
    if (k < -half || k >= half) throw InvalidArgument("wavenumber outside the grid's band");
    return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<std::ptrdiff_t>(n_));
}

RVec Grid::nodes() const {
    RVec out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
    return out;
}

RVec Grid::frequencies() const {
    RVec out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = xi(j);
    return out;
}

Field::Field(Grid grid, CVec values, Kind kind)
    : grid_(grid), values_(std::move(values)), kind_(kind) {
    if (values_.size() != grid_.n())
        throw InvalidArgument("field length " + std::to_string(values_.size()) +
                              " does not match grid size " + std::to_string(grid_.n()));
    if (kind_ == Kind::real) {
        double scale = 0.0, worst = 0.0;
        for (const auto& v : values_) {
            scale = std::max(scale, std::abs(v));
            worst = std::max(worst, std::abs(v.imag()));
        }
        if (worst > kRealTolerance * std::max(scale, 1e-300) && worst > 0.0)
            throw InvalidArgument("field tagged real has imaginary part " + std::to_string(worst));
        for (auto& v : values_) v = cplx(v.real(), 0.0);
    }
}

Field Field::zeros(const Grid& grid, Kind kind) { return Field(grid, CVec(grid.n()), kind); }

Field Field::from_real(const Grid& grid, const std::vector<double>& values) {
    CVec v(values.begin(), values.end());
    return Field(grid, std::move(v), Kind::real);
}

std::vector<double> Field::real_values() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](cplx c) { return c.real(); });
    return out;
}

SpectralField::SpectralField(Grid grid, CVec coeffs, Kind kind)
    : grid_(grid), coeffs_(std::move(coeffs)), kind_(kind) {
    if (coeffs_.size() != grid_.n()) throw InvalidArgument("coefficient count does not match grid size");
}

} // namespace spulse

#pragma once

#include <array>
#include <cstddef>

#include "pilotwave/common.hpp"

namespace pilotwave {

// Uniform 1D or 2D grid. Axis 0 is the slow (row) index, axis 1 the fast one;
// a 1D grid uses axis 0 only. Coordinates are origin + i*spacing.
class Grid {
public:
    static Grid line(std::size_t n, double origin, double spacing) {
        return Grid(1, {n, 1}, {origin, 0.0}, {spacing, 1.0});
    }

    // Symmetric 1D grid covering [-half_extent, half_extent).
    static Grid line_centered(std::size_t n, double half_extent) {
        const double spacing = 2.0 * half_extent / static_cast<double>(n);
        return line(n, -half_extent, spacing);
    }

    static Grid plane(std::size_t n0, std::size_t n1, double origin0,
                      double origin1, double spacing0, double spacing1) {
        return Grid(2, {n0, n1}, {origin0, origin1}, {spacing0, spacing1});
    }

    static Grid plane_centered(std::size_t n0, std::size_t n1, double half0,
                               double half1) {
        return plane(n0, n1, -half0, -half1, 2.0 * half0 / n0, 2.0 * half1 / n1);
    }

    int dims() const { return dims_; }
    std::size_t npoints(int axis) const { return n_[axis]; }
    std::size_t size() const { return n_[0] * n_[1]; }
    double origin(int axis) const { return origin_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double extent(int axis) const { return spacing_[axis] * static_cast<double>(n_[axis]); }

    double coord(int axis, std::size_t i) const {
        return origin_[axis] + spacing_[axis] * static_cast<double>(i);
    }

    double cell_volume() const {
        return dims_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
    }

    std::size_t index(std::size_t i0, std::size_t i1 = 0) const {
        return i0 * n_[1] + i1;
    }

    bool same_as(const Grid& o) const {
        return dims_ == o.dims_ && n_ == o.n_ && origin_ == o.origin_ &&
               spacing_ == o.spacing_;
    }

    // Spectral wavenumber of bin j on `axis` (standard FFT ordering).
    double wavenumber(int axis, std::size_t j) const {
        const double dk = 2.0 * M_PI / extent(axis);
        const std::size_t n = n_[axis];
        const double jj = (j < n / 2) ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        return dk * jj;
    }

private:
    Grid(int dims, std::array<std::size_t, 2> n, std::array<double, 2> origin,
         std::array<double, 2> spacing)
        : dims_(dims), n_(n), origin_(origin), spacing_(spacing) {
        for (int a = 0; a < dims_; ++a) {
            if (n_[a] < 8)
                throw ValidationError("grid needs at least 8 points per axis");
            if (!(spacing_[a] > 0.0))
                throw ValidationError("grid spacing must be positive");
        }
    }

    int dims_;
    std::array<std::size_t, 2> n_;
    std::array<double, 2> origin_;
    std::array<double, 2> spacing_;
};

} // namespace pilotwave

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowmap {

/// Uniform fully periodic 3-D grid. Node x_i = i*hx for i in [0, nx);
/// the point x = lx wraps back to node 0. Index layout is x-fastest:
/// index = i + nx*(j + ny*k).
struct Grid3 {
    int nx = 0, ny = 0, nz = 0;
    double lx = 0.0, ly = 0.0, lz = 0.0;

    Grid3() = default;

    Grid3(int nx_, int ny_, int nz_, double lx_, double ly_, double lz_)
        : nx(nx_), ny(ny_), nz(nz_), lx(lx_), ly(ly_), lz(lz_) {
        if (nx < 4 || ny < 4 || nz < 4) {
            throw std::invalid_argument("Grid3: central stencils need at least 4 nodes per axis, got " +
                                        std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                                        std::to_string(nz));
        }
        if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0)) {
            throw std::invalid_argument("Grid3: domain lengths must be positive");
        }
    }

    std::size_t size() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
    }

    int n(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    double extent(int axis) const { return axis == 0 ? lx : axis == 1 ? ly : lz; }
    double h(int axis) const { return extent(axis) / n(axis); }

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double hz() const { return lz / nz; }

    double x(int i) const { return i * hx(); }
    double y(int j) const { return j * hy(); }
    double z(int k) const { return k * hz(); }

    bool operator==(const Grid3&) const = default;
};

} // namespace flowmap

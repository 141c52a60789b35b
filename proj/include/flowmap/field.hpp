#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "flowmap/grid.hpp"

namespace flowmap {

/// One real value per grid node, x-fastest layout.
struct ScalarGridField {
    Grid3 grid;
    std::vector<double> values;

    ScalarGridField() = default;
    explicit ScalarGridField(const Grid3& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }
};

/// Three real values per grid node (components along x, y, z).
struct VectorGridField {
    Grid3 grid;
    std::array<std::vector<double>, 3> comp;

    VectorGridField() = default;
    explicit VectorGridField(const Grid3& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }

    std::vector<double>& operator[](int axis) { return comp[axis]; }
    const std::vector<double>& operator[](int axis) const { return comp[axis]; }
};

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(const VectorGridField& v) {
    return std::max({max_abs(v.comp[0]), max_abs(v.comp[1]), max_abs(v.comp[2])});
}

/// A steady flow state on a periodic grid: velocity (u,v,w), pressure,
/// temperature, and the global Reynolds and Prandtl numbers.
struct FlowSnapshot {
    Grid3 grid;
    VectorGridField velocity;
    ScalarGridField pressure;
    ScalarGridField temperature;
    double re = 0.0;
    double pr = 0.0;
};

namespace detail {

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace detail

/// Structural and finiteness checks; throws std::invalid_argument on violation.
inline void validate_snapshot(const FlowSnapshot& s) {
    const std::size_t n = s.grid.size();
    for (int a = 0; a < 3; ++a) {
        if (s.velocity.comp[a].size() != n)
            throw std::invalid_argument("FlowSnapshot: velocity component size does not match grid");
    }
    if (s.pressure.values.size() != n || s.temperature.values.size() != n)
        throw std::invalid_argument("FlowSnapshot: scalar field size does not match grid");
    if (!(s.re > 0.0) || !(s.pr > 0.0))
        throw std::invalid_argument("FlowSnapshot: re and pr must be positive");
    for (int a = 0; a < 3; ++a)
        if (!detail::all_finite(s.velocity.comp[a]))
            throw std::invalid_argument("FlowSnapshot: non-finite velocity entry");
    if (!detail::all_finite(s.pressure.values) || !detail::all_finite(s.temperature.values))
        throw std::invalid_argument("FlowSnapshot: non-finite scalar entry");
}

} // namespace flowmap

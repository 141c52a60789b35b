#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flowmap/field.hpp"

namespace flowmap {

namespace detail {

inline void check_field(const Grid3& g, const std::vector<double>& f) {
    if (f.size() != g.size())
        throw std::invalid_argument("grid field: value count does not match grid");
}

/// First derivative along one axis: (f[i+1] - f[i-1]) / (2h), periodic wrap.
inline std::vector<double> central_diff1(const Grid3& g, const std::vector<double>& f, int axis) {
    check_field(g, f);
    std::vector<double> out(g.size());
    const int n[3] = {g.nx, g.ny, g.nz};
    const double inv2h = 1.0 / (2.0 * g.h(axis));
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                int p[3] = {i, j, k};
                int m[3] = {i, j, k};
                p[axis] = (p[axis] + 1 == n[axis]) ? 0 : p[axis] + 1;
                m[axis] = (m[axis] == 0) ? n[axis] - 1 : m[axis] - 1;
                out[g.index(i, j, k)] =
                    (f[g.index(p[0], p[1], p[2])] - f[g.index(m[0], m[1], m[2])]) * inv2h;
            }
        }
    }
    return out;
}

/// Second derivative along one axis: (f[i+1] - 2 f[i] + f[i-1]) / h^2, periodic wrap.
inline std::vector<double> central_diff2(const Grid3& g, const std::vector<double>& f, int axis) {
    check_field(g, f);
    std::vector<double> out(g.size());
    const int n[3] = {g.nx, g.ny, g.nz};
    const double invh2 = 1.0 / (g.h(axis) * g.h(axis));
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                int p[3] = {i, j, k};
                int m[3] = {i, j, k};
                p[axis] = (p[axis] + 1 == n[axis]) ? 0 : p[axis] + 1;
                m[axis] = (m[axis] == 0) ? n[axis] - 1 : m[axis] - 1;
                const std::size_t c = g.index(i, j, k);
                out[c] = (f[g.index(p[0], p[1], p[2])] - 2.0 * f[c] +
                          f[g.index(m[0], m[1], m[2])]) * invh2;
            }
        }
    }
    return out;
}

} // namespace detail

/// Central-difference gradient of a scalar field.
inline VectorGridField gradient(const ScalarGridField& f) {
    VectorGridField out(f.grid);
    for (int a = 0; a < 3; ++a) out.comp[a] = detail::central_diff1(f.grid, f.values, a);
    return out;
}

/// Central-difference divergence of a vector field.
inline ScalarGridField divergence(const VectorGridField& v) {
    ScalarGridField out(v.grid);
    for (int a = 0; a < 3; ++a) {
        const auto d = detail::central_diff1(v.grid, v.comp[a], a);
        for (std::size_t q = 0; q < out.values.size(); ++q) out.values[q] += d[q];
    }
    return out;
}

/// Central-difference curl of a vector field.
inline VectorGridField curl(const VectorGridField& v) {
    VectorGridField out(v.grid);
    const auto d = [&](int c, int axis) { return detail::central_diff1(v.grid, v.comp[c], axis); };
    const auto sub = [](std::vector<double> a, const std::vector<double>& b) {
        for (std::size_t q = 0; q < a.size(); ++q) a[q] -= b[q];
        return a;
    };
    out.comp[0] = sub(d(2, 1), d(1, 2)); // dw/dy - dv/dz
    out.comp[1] = sub(d(0, 2), d(2, 0)); // du/dz - dw/dx
    out.comp[2] = sub(d(1, 0), d(0, 1)); // dv/dx - du/dy
    return out;
}

/// Second-order Laplacian of a scalar field.
inline ScalarGridField laplacian(const ScalarGridField& f) {
    ScalarGridField out(f.grid);
    for (int a = 0; a < 3; ++a) {
        const auto d = detail::central_diff2(f.grid, f.values, a);
        for (std::size_t q = 0; q < out.values.size(); ++q) out.values[q] += d[q];
    }
    return out;
}

/// Componentwise Laplacian of a vector field.
inline VectorGridField laplacian(const VectorGridField& v) {
    VectorGridField out(v.grid);
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            const auto d = detail::central_diff2(v.grid, v.comp[c], a);
            for (std::size_t q = 0; q < out.comp[c].size(); ++q) out.comp[c][q] += d[q];
        }
    }
    return out;
}

/// Convective term (v . grad) v with central differences.
inline VectorGridField convective_term(const VectorGridField& v) {
    VectorGridField out(v.grid);
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            const auto d = detail::central_diff1(v.grid, v.comp[c], a);
            for (std::size_t q = 0; q < out.comp[c].size(); ++q)
                out.comp[c][q] += v.comp[a][q] * d[q];
        }
    }
    return out;
}

/// Steady momentum residual R = (v . grad) v + grad p - (1/Re) lap v.
inline VectorGridField momentum_residual(const FlowSnapshot& s) {
    validate_snapshot(s);
    if (s.re == 0.0) throw std::invalid_argument("momentum_residual: re must be nonzero");
    VectorGridField r = convective_term(s.velocity);
    const VectorGridField gp = gradient(s.pressure);
    const VectorGridField lv = laplacian(s.velocity);
    const double inv_re = 1.0 / s.re;
    for (int c = 0; c < 3; ++c)
        for (std::size_t q = 0; q < r.comp[c].size(); ++q)
            r.comp[c][q] += gp.comp[c][q] - inv_re * lv.comp[c][q];
    return r;
}

/// Local dimensionless turbulence-intensity proxy: re * |velocity| * (hx/lx).
inline ScalarGridField local_re_feature(const FlowSnapshot& s) {
    validate_snapshot(s);
    ScalarGridField out(s.grid);
    const double scale = s.re * (s.grid.hx() / s.grid.lx);
    for (std::size_t q = 0; q < out.values.size(); ++q) {
        const double u = s.velocity.comp[0][q];
        const double v = s.velocity.comp[1][q];
        const double w = s.velocity.comp[2][q];
        out.values[q] = scale * std::sqrt(u * u + v * v + w * w);
    }
    return out;
}

} // namespace flowmap

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "flowmap/errors.hpp"
#include "flowmap/nsops.hpp"
#include "flowmap/rng.hpp"

namespace flowmap {

namespace detail {

inline void require_physical(double re, double pr) {
    if (!(re > 0.0) || !std::isfinite(re)) throw std::invalid_argument("snapshot: re must be positive");
    if (!(pr > 0.0) || !std::isfinite(pr)) throw std::invalid_argument("snapshot: pr must be positive");
}

/// Phase angle 2*pi*i/n along one axis; exact integer periodicity.
inline double axis_angle(int i, int n) { return 2.0 * std::numbers::pi * i / n; }

} // namespace detail

/// Taylor-Green vortex. Analytically solenoidal when lx == ly (u and v carry
/// the same wavenumber); w is identically zero.
inline FlowSnapshot taylor_green_snapshot(const Grid3& grid, double re, double pr) {
    detail::require_physical(re, pr);
    FlowSnapshot s{grid, VectorGridField(grid), ScalarGridField(grid), ScalarGridField(grid), re, pr};
    for (int k = 0; k < grid.nz; ++k) {
        const double az = detail::axis_angle(k, grid.nz);
        for (int j = 0; j < grid.ny; ++j) {
            const double ay = detail::axis_angle(j, grid.ny);
            for (int i = 0; i < grid.nx; ++i) {
                const double ax = detail::axis_angle(i, grid.nx);
                const std::size_t q = grid.index(i, j, k);
                s.velocity.comp[0][q] = std::cos(ax) * std::sin(ay);
                s.velocity.comp[1][q] = -std::sin(ax) * std::cos(ay);
                s.velocity.comp[2][q] = 0.0;
                s.pressure.values[q] = -0.25 * (std::cos(2.0 * ax) + std::cos(2.0 * ay));
                s.temperature.values[q] = std::cos(ax) * std::cos(ay) * std::cos(az);
            }
        }
    }
    return s;
}

/// Arnold-Beltrami-Childress flow on the 2*pi-periodic cube. Beltrami:
/// curl(velocity) equals velocity, so the convective term is exactly a
/// gradient and p = -|velocity|^2 / 2 balances it.
inline FlowSnapshot abc_snapshot(const Grid3& grid, double a, double b, double c, double re, double pr) {
    detail::require_physical(re, pr);
    const double two_pi = 2.0 * std::numbers::pi;
    for (double l : {grid.lx, grid.ly, grid.lz}) {
        if (std::abs(l / two_pi - 1.0) > 1e-12)
            throw std::invalid_argument("abc_snapshot: domain must be the 2*pi cube");
    }
    FlowSnapshot s{grid, VectorGridField(grid), ScalarGridField(grid), ScalarGridField(grid), re, pr};
    for (int k = 0; k < grid.nz; ++k) {
        const double az = detail::axis_angle(k, grid.nz);
        for (int j = 0; j < grid.ny; ++j) {
            const double ay = detail::axis_angle(j, grid.ny);
            for (int i = 0; i < grid.nx; ++i) {
                const double ax = detail::axis_angle(i, grid.nx);
                const std::size_t q = grid.index(i, j, k);
                const double u = a * std::sin(az) + c * std::cos(ay);
                const double v = b * std::sin(ax) + a * std::cos(az);
                const double w = c * std::sin(ay) + b * std::cos(ax);
                s.velocity.comp[0][q] = u;
                s.velocity.comp[1][q] = v;
                s.velocity.comp[2][q] = w;
                s.pressure.values[q] = -0.5 * (u * u + v * v + w * w);
                s.temperature.values[q] = std::cos(ax) * std::cos(ay) * std::cos(az);
            }
        }
    }
    return s;
}

namespace detail {

struct FourierMode {
    int kx, ky, kz;
    double amp, phase;
};

// Wavenumbers stay in {-1, 0, 1} so the default tier-1 capacity can track
// the field; larger spectra make the surrogate task hopeless at 10 units.
inline constexpr int kMaxWaveNumber = 1;

inline FourierMode draw_mode(SplitMix64& rng) {
    constexpr auto span = static_cast<std::uint64_t>(2 * kMaxWaveNumber + 1);
    FourierMode m;
    m.kx = static_cast<int>(rng.next_below(span)) - kMaxWaveNumber;
    m.ky = static_cast<int>(rng.next_below(span)) - kMaxWaveNumber;
    m.kz = static_cast<int>(rng.next_below(span)) - kMaxWaveNumber;
    m.amp = rng.uniform(-1.0, 1.0);
    m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return m;
}

inline double eval_mode(const FourierMode& m, int i, int j, int k, const Grid3& g) {
    const double angle = 2.0 * std::numbers::pi *
                         (static_cast<double>(m.kx) * i / g.nx +
                          static_cast<double>(m.ky) * j / g.ny +
                          static_cast<double>(m.kz) * k / g.nz);
    return m.amp * std::cos(angle + m.phase);
}

} // namespace detail

/// Seeded random solenoidal field: sample a smooth random vector potential
/// (two low-wavenumber Fourier modes per component) and take its discrete
/// curl, so the discrete divergence vanishes to rounding. Pressure and
/// temperature each get a single random mode.
inline FlowSnapshot random_solenoidal_snapshot(const Grid3& grid, std::uint64_t seed, double amplitude,
                                               double re, double pr) {
    detail::require_physical(re, pr);
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("random_solenoidal_snapshot: amplitude must be non-negative");

    constexpr int kModesPerComponent = 2;
    SplitMix64 rng(seed);

    VectorGridField potential(grid);
    for (int c = 0; c < 3; ++c) {
        detail::FourierMode modes[kModesPerComponent];
        for (auto& m : modes) m = detail::draw_mode(rng);
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    double v = 0.0;
                    for (const auto& m : modes) v += detail::eval_mode(m, i, j, k, grid);
                    potential.comp[c][grid.index(i, j, k)] = amplitude * v;
                }
    }

    FlowSnapshot s{grid, curl(potential), ScalarGridField(grid), ScalarGridField(grid), re, pr};
    const detail::FourierMode p_mode = detail::draw_mode(rng);
    const detail::FourierMode t_mode = detail::draw_mode(rng);
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t q = grid.index(i, j, k);
                s.pressure.values[q] = amplitude * detail::eval_mode(p_mode, i, j, k, grid);
                s.temperature.values[q] = amplitude * detail::eval_mode(t_mode, i, j, k, grid);
            }
    return s;
}

namespace detail {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& token, const std::string& path, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0')
        throw ParseError(path + ":" + std::to_string(line) + ": expected a number, got '" + token + "'");
    if (!std::isfinite(v))
        throw ParseError(path + ":" + std::to_string(line) + ": non-finite value '" + token + "'");
    return v;
}

} // namespace detail

/// Write a snapshot in the .vfld text format:
///   #vfld 1
///   #grid nx ny nz lx ly lz
///   #phys re pr
///   nx*ny*nz lines "u v w p T", x-fastest, 17 significant digits.
inline void save_snapshot(const FlowSnapshot& s, const std::string& path) {
    validate_snapshot(s);
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "#vfld 1\n";
    out << "#grid " << s.grid.nx << ' ' << s.grid.ny << ' ' << s.grid.nz << ' '
        << detail::fmt17(s.grid.lx) << ' ' << detail::fmt17(s.grid.ly) << ' '
        << detail::fmt17(s.grid.lz) << '\n';
    out << "#phys " << detail::fmt17(s.re) << ' ' << detail::fmt17(s.pr) << '\n';
    for (std::size_t q = 0; q < s.grid.size(); ++q) {
        out << detail::fmt17(s.velocity.comp[0][q]) << ' ' << detail::fmt17(s.velocity.comp[1][q])
            << ' ' << detail::fmt17(s.velocity.comp[2][q]) << ' ' << detail::fmt17(s.pressure.values[q])
            << ' ' << detail::fmt17(s.temperature.values[q]) << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

inline FlowSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line != "#vfld 1")
        throw ParseError(path + ":1: expected header '#vfld 1'");

    ++lineno;
    if (!std::getline(in, line))
        throw ParseError(path + ":2: missing '#grid' line");
    std::istringstream grid_line(line);
    std::string tag;
    int nx = 0, ny = 0, nz = 0;
    double lx = 0, ly = 0, lz = 0;
    if (!(grid_line >> tag >> nx >> ny >> nz >> lx >> ly >> lz) || tag != "#grid")
        throw ParseError(path + ":2: malformed '#grid' line");
    Grid3 grid;
    try {
        grid = Grid3(nx, ny, nz, lx, ly, lz);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ":2: " + e.what());
    }

    ++lineno;
    if (!std::getline(in, line))
        throw ParseError(path + ":3: missing '#phys' line");
    std::istringstream phys_line(line);
    double re = 0, pr = 0;
    if (!(phys_line >> tag >> re >> pr) || tag != "#phys")
        throw ParseError(path + ":3: malformed '#phys' line");

    FlowSnapshot s{grid, VectorGridField(grid), ScalarGridField(grid), ScalarGridField(grid), re, pr};
    const std::size_t expected = grid.size();
    std::size_t q = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (q == expected)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(expected) + " data rows, found more");
        std::istringstream row(line);
        std::string tok;
        double vals[5];
        for (int c = 0; c < 5; ++c) {
            if (!(row >> tok))
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected 5 values per row");
            vals[c] = detail::parse_double(tok, path, lineno);
        }
        if (row >> tok)
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing content '" + tok + "'");
        s.velocity.comp[0][q] = vals[0];
        s.velocity.comp[1][q] = vals[1];
        s.velocity.comp[2][q] = vals[2];
        s.pressure.values[q] = vals[3];
        s.temperature.values[q] = vals[4];
        ++q;
    }
    if (q != expected)
        throw ParseError(path + ": expected " + std::to_string(expected) + " data rows, found " +
                         std::to_string(q));
    try {
        validate_snapshot(s);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
    return s;
}

} // namespace flowmap

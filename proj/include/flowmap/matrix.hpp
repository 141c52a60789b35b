#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace flowmap {

/// Minimal row-major matrix used for lattice views (hit maps, component
/// planes) and image export.
template <typename T>
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Mat&) const = default;
};

using MatD = Mat<double>;
using MatI = Mat<long long>;

inline MatD to_double(const MatI& m) {
    MatD out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = static_cast<double>(m.data[i]);
    return out;
}

} // namespace flowmap

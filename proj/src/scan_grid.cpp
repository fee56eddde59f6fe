#include "doa/scan_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace doa {

ScanGrid::ScanGrid(double step) : step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("ScanGrid: step must be positive");
    }
    const double ratio = 180.0 / step;
    const double count = std::round(ratio);
    if (std::abs(ratio - count) > 1e-9 * ratio || count < 2.0) {
        throw std::invalid_argument("ScanGrid: 180 / step must be an integer >= 2");
    }
    const auto points = static_cast<std::size_t>(count) - 1;
    angles_.reserve(points);
    for (std::size_t n = 1; n <= points; ++n) {
        angles_.push_back(static_cast<double>(n) * step);
    }
}

} // namespace doa

#pragma once

#include <span>
#include <vector>

namespace doa {

/// Candidate angles theta_n = n * step for n = 1 .. 180/step - 1. The
/// endpoints 0 and 180 degrees are excluded.
class ScanGrid {
public:
    /// Throws std::invalid_argument unless 180 / step is a positive integer >= 2.
    explicit ScanGrid(double step = 0.5);

    [[nodiscard]] double                  step() const { return step_; }
    [[nodiscard]] std::span<const double> angles() const { return angles_; }
    [[nodiscard]] std::size_t             size() const { return angles_.size(); }
    [[nodiscard]] double                  operator[](std::size_t n) const { return angles_[n]; }

private:
    double              step_;
    std::vector<double> angles_;
};

} // namespace doa

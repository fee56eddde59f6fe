#include "doa/spectrum_search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace doa {

std::vector<std::size_t> find_peak_indices(const SpectrumResult& spectrum, int q) {
    const std::size_t n = spectrum.size();
    if (q < 1 || static_cast<std::size_t>(q) > n) {
        throw std::invalid_argument("find_peaks: q must lie in [1, grid size]");
    }
    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!spectrum.valid[k] || !spectrum.valid[k - 1] || !spectrum.valid[k + 1]) {
            continue;
        }
        const double p = spectrum.power[k];
        if (p > spectrum.power[k - 1] && p > spectrum.power[k + 1]) {
            peaks.push_back(k);
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](std::size_t l, std::size_t r) { return spectrum.power[l] > spectrum.power[r]; });
    if (peaks.size() > static_cast<std::size_t>(q)) {
        peaks.resize(static_cast<std::size_t>(q));
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

std::vector<double> find_peaks(const SpectrumResult& spectrum, int q) {
    std::vector<double> out;
    for (std::size_t k : find_peak_indices(spectrum, q)) {
        out.push_back(spectrum.angles[k]);
    }
    return out;
}

Complex RootingPolynomial::evaluate(Complex z) const {
    // Horner on z^{M-1} Q(z), then divide out the shift.
    const int m1  = order();
    Complex   acc = 0.0;
    for (int p = 2 * m1; p >= 0; --p) {
        acc = acc * z + coefficient(m1 - p);
    }
    return acc / std::pow(z, m1);
}

Complex RootingPolynomial::evaluate_angle(double theta_deg, double spacing_ratio) const {
    const double phase = -2.0 * std::numbers::pi * spacing_ratio * std::cos(theta_deg * std::numbers::pi / 180.0);
    return evaluate(std::polar(1.0, phase));
}

RootingPolynomial rooting_polynomial_from(const CMatrix& c) {
    if (c.rows() != c.cols() || c.rows() < 1) {
        throw std::invalid_argument("rooting polynomial: C must be square and non-empty");
    }
    const Index m = c.rows();
    RootingPolynomial poly;
    poly.C = c;
    poly.coefficients.assign(static_cast<std::size_t>(2 * m - 1), Complex{0.0, 0.0});
    for (Index row = 0; row < m; ++row) {
        for (Index col = 0; col < m; ++col) {
            poly.coefficients[static_cast<std::size_t>(row - col + m - 1)] += c(row, col);
        }
    }
    return poly;
}

RootingPolynomial build_rooting_polynomial(const CMatrix& t, const CMatrix& r_bar_inv) {
    if (r_bar_inv.rows() != r_bar_inv.cols() || t.cols() != r_bar_inv.rows()) {
        throw std::invalid_argument("build_rooting_polynomial: dimension mismatch");
    }
    CMatrix c = t * r_bar_inv * t.adjoint();
    make_hermitian(c);
    return rooting_polynomial_from(c);
}

std::vector<Complex> polynomial_roots(const std::vector<Complex>& ascending) {
    double scale = 0.0;
    for (const Complex& v : ascending) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        return {};
    }
    std::size_t degree = ascending.size() - 1;
    while (degree > 0 && std::abs(ascending[degree]) <= 1e-14 * scale) {
        --degree;
    }
    if (degree == 0) {
        return {};
    }
    const auto d = static_cast<Index>(degree);
    CMatrix    companion = CMatrix::Zero(d, d);
    const Complex lead   = ascending[degree];
    for (Index k = 0; k < d; ++k) {
        companion(0, k) = -ascending[degree - 1 - static_cast<std::size_t>(k)] / lead;
    }
    companion.diagonal(-1).setOnes();
    const Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
    if (es.info() != Eigen::Success) {
        throw NumericalFault("polynomial_roots: eigenvalue iteration did not converge");
    }
    const CVector& values = es.eigenvalues();
    return {values.data(), values.data() + values.size()};
}

std::vector<Complex> rooting_roots(const RootingPolynomial& poly) {
    const int            m1 = poly.order();
    std::vector<Complex> ascending(static_cast<std::size_t>(2 * m1 + 1));
    for (int p = 0; p <= 2 * m1; ++p) {
        ascending[static_cast<std::size_t>(p)] = poly.coefficient(m1 - p);
    }
    return polynomial_roots(ascending);
}

std::vector<RootCandidate> root_candidates(const RootingPolynomial& poly, double spacing_ratio) {
    constexpr double kInsideTolerance = 1e-9;
    constexpr double kSameDoa         = 1e-4; // degrees
    std::vector<RootCandidate> all;
    for (const Complex& z : rooting_roots(poly)) {
        const double radius = std::abs(z);
        if (radius > 1.0 + kInsideTolerance || radius == 0.0) {
            continue;
        }
        const double u = -std::arg(z) / (2.0 * std::numbers::pi * spacing_ratio);
        if (std::abs(u) > 1.0) {
            continue;
        }
        all.push_back({z, std::acos(u) * 180.0 / std::numbers::pi, std::abs(radius - 1.0)});
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const RootCandidate& l, const RootCandidate& r) { return l.distance < r.distance; });
    std::vector<RootCandidate> out;
    for (const RootCandidate& c : all) {
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const RootCandidate& o) { return std::abs(o.doa - c.doa) < kSameDoa; });
        if (!seen) {
            out.push_back(c);
        }
    }
    return out;
}

RootedDoas roots_to_doas(const RootingPolynomial& poly, int q, double spacing_ratio) {
    if (q < 1) {
        throw std::invalid_argument("roots_to_doas: q must be positive");
    }
    const std::vector<RootCandidate> candidates = root_candidates(poly, spacing_ratio);
    RootedDoas out;
    for (std::size_t k = 0; k < candidates.size() && out.doas.size() < static_cast<std::size_t>(q); ++k) {
        out.doas.push_back(candidates[k].doa);
    }
    out.shortfall = out.doas.size() < static_cast<std::size_t>(q);
    std::sort(out.doas.begin(), out.doas.end());
    return out;
}

std::vector<double> refine_peaks(const SpectrumResult& coarse, double max_shift, double spacing_ratio, int q) {
    if (coarse.states.size() != coarse.size()) {
        throw std::invalid_argument("refine_peaks: spectrum was computed without per-angle states");
    }
    std::vector<double> out;
    for (std::size_t k : find_peak_indices(coarse, q)) {
        const double      peak  = coarse.angles[k];
        const AngleState& state = coarse.states[k];
        double            best  = peak;
        double            gap   = max_shift;
        for (const RootCandidate& c : root_candidates(build_rooting_polynomial(state.T, state.K), spacing_ratio)) {
            const double d = std::abs(c.doa - peak);
            if (d <= gap) {
                gap  = d;
                best = c.doa;
            }
        }
        out.push_back(best);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> rooted_refine(const SnapshotMatrix& data, const ScanGrid& coarse_grid, JioOptions options, int q) {
    options.keep_states = true;
    return refine_peaks(jio_family_spectrum(data, coarse_grid, options), coarse_grid.step(),
                        data.geometry.spacing_ratio, q);
}

} // namespace doa

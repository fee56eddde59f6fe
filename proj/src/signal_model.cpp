#include "doa/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace doa {

void ArrayGeometry::validate() const {
    if (num_sensors < 1) {
        throw std::invalid_argument("array geometry: num_sensors must be >= 1");
    }
    if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio)) {
        throw std::invalid_argument("array geometry: spacing_ratio must be positive");
    }
}

void SourceScenario::validate(const ArrayGeometry& geometry) const {
    geometry.validate();
    if (doas.empty()) {
        throw std::invalid_argument("scenario: at least one source is required");
    }
    if (num_sources() > geometry.num_sensors) {
        throw std::invalid_argument("scenario: more sources than sensors (q > M)");
    }
    for (std::size_t k = 0; k < doas.size(); ++k) {
        if (!(doas[k] > 0.0 && doas[k] < 180.0)) {
            throw std::domain_error("scenario: DOA " + std::to_string(doas[k]) + " outside (0, 180)");
        }
        for (std::size_t l = 0; l < k; ++l) {
            if (doas[k] == doas[l]) {
                throw std::invalid_argument("scenario: DOAs must be distinct");
            }
        }
    }
    if (!(source_power >= 0.0) || !(noise_power >= 0.0)) {
        throw std::invalid_argument("scenario: powers must be non-negative");
    }
    if (!(correlation >= 0.0 && correlation <= 1.0)) {
        throw std::domain_error("scenario: correlation must lie in [0, 1]");
    }
    if (correlation > 0.0) {
        if (modulation != Modulation::Gaussian) {
            throw std::invalid_argument("scenario: correlated sources require Gaussian modulation");
        }
        if (num_sources() < 2) {
            throw std::invalid_argument("scenario: correlation needs at least two sources");
        }
    }
    if (num_snapshots < 1) {
        throw std::invalid_argument("scenario: num_snapshots must be >= 1");
    }
}

CVector steering_vector(const ArrayGeometry& geometry, double theta_deg) {
    if (!(theta_deg > 0.0 && theta_deg < 180.0)) {
        throw std::domain_error("steering_vector: angle " + std::to_string(theta_deg) + " outside (0, 180)");
    }
    const double phase_step = -2.0 * std::numbers::pi * geometry.spacing_ratio * std::cos(theta_deg * std::numbers::pi / 180.0);
    CVector a(geometry.num_sensors);
    a(0) = Complex(1.0, 0.0);
    for (int m = 1; m < geometry.num_sensors; ++m) {
        a(m) = std::polar(1.0, phase_step * m);
    }
    return a;
}

CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> thetas_deg) {
    CMatrix A(geometry.num_sensors, static_cast<Index>(thetas_deg.size()));
    for (std::size_t k = 0; k < thetas_deg.size(); ++k) {
        A.col(static_cast<Index>(k)) = steering_vector(geometry, thetas_deg[k]);
    }
    return A;
}

RMatrix generate_sources(const SourceScenario& scenario, Rng& rng) {
    if (!(scenario.correlation >= 0.0 && scenario.correlation <= 1.0)) {
        throw std::domain_error("generate_sources: correlation must lie in [0, 1]");
    }
    if (scenario.correlation > 0.0 && scenario.modulation != Modulation::Gaussian) {
        throw std::invalid_argument("generate_sources: correlated sources require Gaussian modulation");
    }
    if (scenario.correlation > 0.0 && scenario.num_sources() < 2) {
        throw std::invalid_argument("generate_sources: correlation needs at least two sources");
    }

    const Index  q     = scenario.num_sources();
    const Index  n     = scenario.num_snapshots;
    const double sigma = std::sqrt(scenario.source_power);
    RMatrix      s(q, n);

    if (scenario.modulation == Modulation::Bpsk) {
        std::bernoulli_distribution bit(0.5);
        for (Index i = 0; i < n; ++i) {
            for (Index k = 0; k < q; ++k) {
                s(k, i) = bit(rng) ? sigma : -sigma;
            }
        }
        return s;
    }

    std::normal_distribution<double> normal(0.0, sigma);
    const double tau  = scenario.correlation;
    const double rest = std::sqrt(std::max(0.0, 1.0 - tau * tau));
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < q; ++k) {
            s(k, i) = normal(rng);
        }
        if (tau > 0.0) {
            // s(1, i) plays the role of the independent s3 draw.
            s(1, i) = tau * s(0, i) + rest * s(1, i);
        }
    }
    return s;
}

SnapshotMatrix generate_snapshots(const SourceScenario& scenario, const ArrayGeometry& geometry, Rng& rng) {
    scenario.validate(geometry);

    const CMatrix A = steering_matrix(geometry, scenario.doas);
    const RMatrix s = generate_sources(scenario, rng);

    SnapshotMatrix out{A * s.cast<Complex>(), geometry};

    if (scenario.noise_power > 0.0) {
        std::normal_distribution<double> normal(0.0, std::sqrt(scenario.noise_power / 2.0));
        for (Index i = 0; i < out.data.cols(); ++i) {
            for (Index m = 0; m < out.data.rows(); ++m) {
                const double re = normal(rng);
                const double im = normal(rng);
                out.data(m, i) += Complex(re, im);
            }
        }
    }
    return out;
}

} // namespace doa

#include "doa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace doa {

Matching match_estimates(std::span<const double> estimates, std::span<const double> truths) {
    std::vector<double> est(estimates.begin(), estimates.end());
    std::vector<double> tru(truths.begin(), truths.end());
    std::sort(est.begin(), est.end());
    std::sort(tru.begin(), tru.end());

    Matching m;
    m.paired.assign(tru.size(), std::numeric_limits<double>::quiet_NaN());
    m.distinct.assign(tru.size(), false);
    if (est.empty()) {
        return m;
    }
    if (est.size() == tru.size()) {
        m.paired = est;
        m.distinct.assign(tru.size(), true);
        return m;
    }

    std::vector<bool> used(est.size(), false);
    std::size_t       pairs = std::min(est.size(), tru.size());
    for (std::size_t p = 0; p < pairs; ++p) {
        double      best = std::numeric_limits<double>::infinity();
        std::size_t bt = 0, be = 0;
        for (std::size_t t = 0; t < tru.size(); ++t) {
            if (m.distinct[t]) {
                continue;
            }
            for (std::size_t e = 0; e < est.size(); ++e) {
                const double d = std::abs(est[e] - tru[t]);
                if (!used[e] && d < best) {
                    best = d;
                    bt   = t;
                    be   = e;
                }
            }
        }
        m.paired[bt]   = est[be];
        m.distinct[bt] = true;
        used[be]       = true;
    }
    for (std::size_t t = 0; t < tru.size(); ++t) {
        if (!m.distinct[t]) {
            m.paired[t] = *std::min_element(est.begin(), est.end(), [&](double l, double r) {
                return std::abs(l - tru[t]) < std::abs(r - tru[t]);
            });
        }
    }
    return m;
}

namespace {

double half_min_separation(std::vector<double> truths) {
    std::sort(truths.begin(), truths.end());
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < truths.size(); ++k) {
        sep = std::min(sep, truths[k] - truths[k - 1]);
    }
    return 0.5 * sep;
}

} // namespace

bool resolution_event(std::span<const double> estimates, std::span<const double> truths) {
    return score_trial(estimates, truths).resolved;
}

TrialOutcome score_trial(std::span<const double> estimates, std::span<const double> truths) {
    if (truths.empty()) {
        throw std::invalid_argument("score_trial: no truths");
    }
    TrialOutcome out;
    out.estimates.assign(estimates.begin(), estimates.end());
    out.truths.assign(truths.begin(), truths.end());
    std::sort(out.estimates.begin(), out.estimates.end());
    std::sort(out.truths.begin(), out.truths.end());

    const Matching m      = match_estimates(out.estimates, out.truths);
    const double   radius = half_min_separation(out.truths);
    bool           inside = true;
    for (std::size_t t = 0; t < out.truths.size(); ++t) {
        const double err = std::isnan(m.paired[t]) ? kMissingEstimateError : std::abs(m.paired[t] - out.truths[t]);
        out.squared_error_sum += err * err;
        out.num_matched += m.distinct[t] ? 1 : 0;
        inside = inside && err < radius;
    }
    out.resolved = inside && out.estimates.size() >= out.truths.size();
    return out;
}

double rmse_db(std::span<const TrialOutcome> outcomes, bool resolved_only) {
    if (outcomes.empty()) {
        throw std::invalid_argument("rmse_db: no outcomes");
    }
    double sum   = 0.0;
    double terms = 0.0;
    for (const TrialOutcome& o : outcomes) {
        if (resolved_only && !o.resolved) {
            continue;
        }
        sum += o.squared_error_sum;
        terms += static_cast<double>(o.truths.size());
    }
    if (terms == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double mse = sum / terms;
    return mse > 0.0 ? std::max(kRmseFloorDb, 10.0 * std::log10(mse)) : kRmseFloorDb;
}

double CrbResult::mean_db() const {
    if (!bounded || variances.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    double sum = 0.0;
    for (double v : variances) {
        sum += v;
    }
    return 10.0 * std::log10(sum / static_cast<double>(variances.size()));
}

CrbResult stochastic_crb(const SourceScenario& scenario, const ArrayGeometry& geometry) {
    geometry.validate();
    const int   q = scenario.num_sources();
    const Index m = geometry.num_sensors;
    if (q < 1 || q >= m) {
        throw std::invalid_argument("stochastic_crb: need 1 <= q < M");
    }
    if (scenario.num_snapshots < 1 || !(scenario.noise_power > 0.0)) {
        throw std::invalid_argument("stochastic_crb: need N >= 1 and positive noise power");
    }

    const CMatrix a = steering_matrix(geometry, scenario.doas);
    CMatrix       d(m, q);
    for (int k = 0; k < q; ++k) {
        const double theta = scenario.doas[static_cast<std::size_t>(k)] * std::numbers::pi / 180.0;
        for (Index e = 0; e < m; ++e) {
            const double scale = 2.0 * std::numbers::pi * geometry.spacing_ratio * static_cast<double>(e) * std::sin(theta);
            d(e, k)            = a(e, k) * Complex{0.0, scale};
        }
    }

    CMatrix rs = scenario.source_power * CMatrix::Identity(q, q);
    if (q >= 2 && scenario.correlation > 0.0) {
        rs(0, 1) = rs(1, 0) = scenario.correlation * scenario.source_power;
    }
    CMatrix r = a * rs * a.adjoint();
    r.diagonal().array() += scenario.noise_power;

    const CMatrix ah_a  = a.adjoint() * a;
    const CMatrix projector =
        CMatrix::Identity(m, m) - a * ah_a.ldlt().solve(a.adjoint()); // complement of span(A)
    const CMatrix left  = d.adjoint() * projector * d;
    const CMatrix right = rs * a.adjoint() * r.ldlt().solve(a) * rs;
    const RMatrix fisher = left.cwiseProduct(right.transpose()).real();

    CrbResult  out;
    const auto scale = scenario.noise_power / (2.0 * scenario.num_snapshots);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(fisher);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e14) {
        out.bounded = false;
        out.variances.assign(static_cast<std::size_t>(q), std::numeric_limits<double>::infinity());
        return out;
    }
    const RMatrix inv      = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    const double  to_deg2  = std::pow(180.0 / std::numbers::pi, 2);
    for (int k = 0; k < q; ++k) {
        out.variances.push_back(scale * inv(k, k) * to_deg2);
    }
    return out;
}

} // namespace doa

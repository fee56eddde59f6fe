#include "doa/covariance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace doa {

double hermitian_defect(const CMatrix& a) {
    const double scale = a.norm();
    if (scale == 0.0) {
        return 0.0;
    }
    return (a - a.adjoint()).norm() / scale;
}

void make_hermitian(CMatrix& a) {
    const CMatrix h = 0.5 * (a + a.adjoint());
    a = h;
}

CovarianceState CovarianceState::zero(Index dim, double forgetting) {
    return {CMatrix::Zero(dim, dim), forgetting, 0};
}

void CovarianceState::update(const CVector& x) {
    if (x.size() != R.rows()) {
        throw std::invalid_argument("covariance_update: dimension mismatch");
    }
    R *= forgetting;
    R.noalias() += x * x.adjoint();
    ++count;
}

CovarianceState covariance_update(CovarianceState state, const CVector& x) {
    state.update(x);
    return state;
}

CMatrix weighted_covariance(const CMatrix& data, double forgetting, double initial) {
    CovarianceState state{initial * CMatrix::Identity(data.rows(), data.rows()), forgetting, 0};
    for (Index i = 0; i < data.cols(); ++i) {
        state.update(data.col(i));
    }
    return state.R;
}

double Loading::resolve(const CMatrix& r) const {
    switch (mode) {
    case Mode::None: return 0.0;
    case Mode::Fixed: return gamma;
    case Mode::Auto: return r.rows() > 0 ? 1e-3 * r.trace().real() / static_cast<double>(r.rows()) : 0.0;
    }
    return 0.0;
}

namespace {

CMatrix from_eigen(const Eigen::SelfAdjointEigenSolver<CMatrix>& es, const RVector& inv_values) {
    const CMatrix& v = es.eigenvectors();
    CMatrix out = v * inv_values.cast<Complex>().asDiagonal() * v.adjoint();
    make_hermitian(out);
    return out;
}

} // namespace

RegularizedInverse regularized_inverse(const CMatrix& r, double loading) {
    if (r.rows() != r.cols()) {
        throw std::invalid_argument("regularized_inverse: matrix is not square");
    }
    if (hermitian_defect(r) > kHermitianTolerance) {
        throw std::invalid_argument("regularized_inverse: matrix is not Hermitian");
    }
    if (loading < 0.0) {
        throw std::invalid_argument("regularized_inverse: negative loading");
    }

    const Index n = r.rows();
    CMatrix loaded = r;
    loaded.diagonal().array() += loading;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(loaded);
    const RVector& values = es.eigenvalues(); // ascending
    const double   lo     = values.size() ? values(0) : 0.0;
    const double   hi     = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;

    if (lo > 0.0 && hi / lo < kMaxConditionNumber) {
        return {from_eigen(es, values.cwiseInverse()), loaded, loading, false};
    }

    // Pseudoinverse of the unloaded matrix.
    if (loading != 0.0) {
        es.compute(r);
    }
    const RVector& raw = es.eigenvalues();
    const double   top = raw.size() ? raw.cwiseAbs().maxCoeff() : 0.0;
    const double   tol = top * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    RVector        inv(raw.size());
    for (Index k = 0; k < raw.size(); ++k) {
        inv(k) = std::abs(raw(k)) > tol ? 1.0 / raw(k) : 0.0;
    }
    return {from_eigen(es, inv), r, 0.0, true};
}

RegularizedInverse regularized_inverse(const CMatrix& r, Loading loading) {
    return regularized_inverse(r, loading.resolve(r));
}

CMatrix exchange_matrix(Index size) {
    return CMatrix::Identity(size, size).rowwise().reverse();
}

CMatrix fba_smooth(const CMatrix& r) {
    if (r.rows() != r.cols()) {
        throw std::invalid_argument("fba_smooth: matrix is not square");
    }
    CMatrix out = 0.5 * (r + backward(r));
    make_hermitian(out);
    return out;
}

InverseState InverseState::init(Index dim, double delta, double forgetting) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("InverseState: delta must be positive");
    }
    if (!(forgetting > 0.0 && forgetting <= 1.0)) {
        throw std::invalid_argument("InverseState: forgetting factor must lie in (0, 1]");
    }
    return {delta * CMatrix::Identity(dim, dim), forgetting, delta, 0};
}

CVector InverseState::update(const CVector& x) {
    if (x.size() != Phi.rows()) {
        throw std::invalid_argument("rls_inverse_update: dimension mismatch");
    }
    const double  inv_alpha = 1.0 / forgetting;
    const CVector phi_x     = Phi * x;
    const double  denom     = 1.0 + inv_alpha * x.dot(phi_x).real();
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw NumericalFault("rls_inverse_update: non-positive denominator");
    }
    CVector gain = (inv_alpha / denom) * phi_x;

    CMatrix next = inv_alpha * (Phi - gain * phi_x.adjoint());
    make_hermitian(next);
    if (!next.allFinite()) {
        throw NumericalFault("rls_inverse_update: non-finite update");
    }
    Phi = std::move(next);
    ++count;
    return gain;
}

RlsStep rls_inverse_update(const InverseState& state, const CVector& x) {
    InverseState next = state;
    CVector      gain = next.update(x);
    return {std::move(gain), std::move(next)};
}

FbaInverse fba_inverse_full(const CMatrix& phi) {
    if (phi.rows() != phi.cols()) {
        throw std::invalid_argument("fba_inverse_full: matrix is not square");
    }
    const CMatrix inner = phi.conjugate() + phi.reverse();
    Eigen::LLT<CMatrix> llt(inner);
    if (llt.info() == Eigen::Success) {
        const CMatrix phi_pi = phi.rowwise().reverse(); // Phi Pi
        CMatrix out = 2.0 * (phi - phi_pi * llt.solve(phi_pi.adjoint()));
        make_hermitian(out);
        if (out.allFinite()) {
            return {std::move(out), false};
        }
    }
    const CMatrix r = regularized_inverse(phi, 0.0).inverse;
    return {regularized_inverse(fba_smooth(r), 0.0).inverse, true};
}

FbaInverse fba_inverse_reduced(const CMatrix& phi_bar, const CMatrix& t, const CMatrix& phi) {
    if (phi_bar.rows() != phi_bar.cols() || phi.rows() != phi.cols()) {
        throw std::invalid_argument("fba_inverse_reduced: matrices must be square");
    }
    if (t.rows() != phi.rows() || t.cols() != phi_bar.rows()) {
        throw std::invalid_argument("fba_inverse_reduced: dimension mismatch");
    }
    const CMatrix pi_t  = t.colwise().reverse();                 // Pi T
    const CMatrix inner = phi.conjugate() + pi_t * phi_bar * pi_t.adjoint();
    Eigen::LLT<CMatrix> llt(inner);
    if (llt.info() == Eigen::Success) {
        const CMatrix left = phi_bar * pi_t.adjoint();           // Phi_bar T^H Pi
        CMatrix out = 2.0 * (phi_bar - left * llt.solve(left.adjoint()));
        make_hermitian(out);
        if (out.allFinite()) {
            return {std::move(out), false};
        }
    }
    const CMatrix rbar = regularized_inverse(phi_bar, 0.0).inverse;
    const CMatrix r    = regularized_inverse(phi, 0.0).inverse;
    CMatrix smoothed   = 0.5 * (rbar + t.adjoint() * backward(r) * t);
    make_hermitian(smoothed);
    return {regularized_inverse(smoothed, 0.0).inverse, true};
}

} // namespace doa

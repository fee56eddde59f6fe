#include <cmath>

#include "doctest.h"
#include "doa/covariance.hpp"
#include "oracles.hpp"

using namespace doa;

namespace {

double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / b.norm(); }

bool persymmetric(const CMatrix& r, double tol) {
    const CMatrix p = oracle::exchange(r.rows());
    return (p * r.conjugate() * p - r).norm() <= tol * r.norm();
}

} // namespace

TEST_SUITE("covariance") {

TEST_CASE("single outer product and pure decay") {
    CovarianceState s = CovarianceState::zero(3, 1.0);
    s = covariance_update(s, CVector::Unit(3, 0));
    CHECK(s.R == CMatrix(CVector::Unit(3, 0) * CVector::Unit(3, 0).adjoint()));
    CHECK(s.count == 1);

    CovarianceState d{CMatrix::Identity(2, 2), 0.5, 0};
    d = covariance_update(d, CVector::Zero(2));
    CHECK(d.R == CMatrix(0.5 * CMatrix::Identity(2, 2)));
}

TEST_CASE("recursive covariance matches the batch weighted sum") {
    std::mt19937_64 rng(21);
    for (double alpha : {1.0, 0.998, 0.9}) {
        const CMatrix x = oracle::random_matrix(6, 1000, rng);
        CovarianceState s = CovarianceState::zero(6, alpha);
        for (Index i = 0; i < x.cols(); ++i) {
            s.update(x.col(i));
            CHECK(hermitian_defect(s.R) <= 1e-12);
        }
        CHECK(rel(s.R, oracle::batch_covariance(x, alpha)) < 1e-12);
        CHECK(rel(weighted_covariance(x, alpha, 2.0), oracle::batch_covariance(x, alpha, 2.0)) < 1e-12);
    }
}

TEST_CASE("covariance update rejects a wrong dimension") {
    CovarianceState s = CovarianceState::zero(3, 1.0);
    CHECK_THROWS_AS(s.update(CVector::Zero(4)), std::invalid_argument);
}

TEST_CASE("regularized inverse of scalar and loaded diagonal matrices") {
    const RegularizedInverse a = regularized_inverse(CMatrix(2.0 * CMatrix::Identity(3, 3)), 0.0);
    CHECK(rel(a.inverse, CMatrix(0.5 * CMatrix::Identity(3, 3))) < 1e-15);
    CHECK_FALSE(a.pseudo);

    CMatrix r = CMatrix::Zero(2, 2);
    r(0, 0)   = 1.0;
    const RegularizedInverse b = regularized_inverse(r, 0.1);
    CHECK(std::abs(b.inverse(0, 0) - 1.0 / 1.1) < 1e-14);
    CHECK(std::abs(b.inverse(1, 1) - 10.0) < 1e-12);
    CHECK(std::abs(b.inverse(0, 1)) < 1e-14);
    CHECK(b.loading == 0.1);
}

TEST_CASE("rank-deficient input falls back to the pseudoinverse") {
    std::mt19937_64 rng(8);
    const CMatrix b = oracle::random_matrix(6, 3, rng);
    const CMatrix r = b * b.adjoint();
    const RegularizedInverse x = regularized_inverse(r, 0.0);
    CHECK(x.pseudo);
    CHECK((r * x.inverse * r - r).norm() <= 1e-9 * r.norm());
    CHECK((x.inverse * r * x.inverse - x.inverse).norm() <= 1e-9 * x.inverse.norm());
    CHECK(hermitian_defect(x.inverse) <= 1e-12);
}

TEST_CASE("automatic loading is trace-scaled") {
    const CMatrix r = 4.0 * CMatrix::Identity(5, 5);
    CHECK(Loading::automatic().resolve(r) == doctest::Approx(4e-3));
    CHECK(Loading::none().resolve(r) == 0.0);
    CHECK(Loading::fixed(0.3).resolve(r) == 0.3);
    const RegularizedInverse x = regularized_inverse(r, Loading::automatic());
    CHECK(rel(x.inverse, CMatrix(CMatrix::Identity(5, 5) / 4.004)) < 1e-14);
    CHECK(rel(x.effective, CMatrix(4.004 * CMatrix::Identity(5, 5))) < 1e-14);
}

TEST_CASE("regularized inverse rejects invalid input") {
    CMatrix r = CMatrix::Identity(2, 2);
    r(0, 1)   = 1.0;
    CHECK_THROWS_AS(regularized_inverse(r, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(regularized_inverse(CMatrix::Identity(2, 3), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(regularized_inverse(CMatrix::Identity(2, 2), -1.0), std::invalid_argument);
}

TEST_CASE("exchange matrix is involutory") {
    const CMatrix p = exchange_matrix(5);
    CHECK(p == oracle::exchange(5));
    CHECK(p * p == CMatrix::Identity(5, 5));
}

TEST_CASE("forward-backward smoothing") {
    CHECK(fba_smooth(CMatrix::Identity(4, 4)) == CMatrix::Identity(4, 4));

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix r = oracle::random_hermitian(5, rng);
        const CMatrix f = fba_smooth(r);
        CHECK(rel(f, oracle::fba(r)) < 1e-14);
        CHECK(persymmetric(f, 1e-12));
        CHECK(hermitian_defect(f) <= 1e-12);
        CHECK(rel(fba_smooth(f), f) < 1e-12);
        Eigen::ComplexEigenSolver<CMatrix> es(f);
        CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-10 * f.norm());
    }

    const CMatrix already = oracle::fba(oracle::random_pd(6, rng));
    CHECK((fba_smooth(already) - already).norm() <= 1e-14 * already.norm());
    CHECK_THROWS_AS(fba_smooth(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("RLS inverse update small cases") {
    InverseState s = InverseState::init(3, 0.5, 0.8);
    s.update(CVector::Zero(3));
    CHECK(rel(s.Phi, CMatrix((0.5 / 0.8) * CMatrix::Identity(3, 3))) < 1e-15);

    const RlsStep step = rls_inverse_update(InverseState::init(2, 1.0, 1.0), CVector::Unit(2, 0));
    CHECK(std::abs(step.state.Phi(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(step.state.Phi(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(step.state.Phi(0, 1)) < 1e-15);
    CHECK(std::abs(step.gain(0) - 0.5) < 1e-15);
}

TEST_CASE("RLS inverse matches the inverse of the implied covariance") {
    std::mt19937_64 rng(31);
    struct Case {
        int    n;
        double alpha;
        double delta;
    };
    for (const Case c : {Case{50, 0.998, 1e-3}, Case{1000, 0.998, 1e-3}, Case{1000, 1.0, 1e-3}, Case{300, 0.95, 10.0}}) {
        const CMatrix x = oracle::random_matrix(6, c.n, rng);
        InverseState  s = InverseState::init(6, c.delta, c.alpha);
        for (Index i = 0; i < x.cols(); ++i) {
            s.update(x.col(i));
        }
        const CMatrix implied = oracle::batch_covariance(x, c.alpha, 1.0 / c.delta);
        CHECK((s.Phi * implied - CMatrix::Identity(6, 6)).norm() < 1e-6);
        CHECK(hermitian_defect(s.Phi) <= 1e-12);
        CHECK(s.count == c.n);
    }
}

TEST_CASE("RLS breakdown leaves the state untouched") {
    InverseState s = InverseState::init(2, 1.0, 1.0);
    s.Phi          = -CMatrix::Identity(2, 2);
    const InverseState before = s;
    CHECK_THROWS_AS(s.update(CVector::Constant(2, Complex(1.0, 0.0))), NumericalFault);
    CHECK(s.Phi == before.Phi);
    CHECK(s.count == before.count);
    CHECK_THROWS_AS(InverseState::init(2, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("full FBA inverse matches direct inversion") {
    CHECK(rel(fba_inverse_full(CMatrix::Identity(4, 4)).inverse, CMatrix::Identity(4, 4)) < 1e-14);

    std::mt19937_64 rng(41);
    const CMatrix   persym = oracle::fba(oracle::random_pd(6, rng));
    const CMatrix   phi_p  = oracle::direct_inverse(persym);
    CHECK(rel(fba_inverse_full(phi_p).inverse, phi_p) < 1e-10);

    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix   r      = oracle::random_pd(6, rng);
        const CMatrix   phi    = oracle::direct_inverse(r);
        const FbaInverse result = fba_inverse_full(0.5 * (phi + phi.adjoint()));
        CHECK_FALSE(result.fallback);
        CHECK(rel(result.inverse, oracle::direct_inverse(oracle::fba(r))) < 1e-8);
        CHECK(hermitian_defect(result.inverse) <= 1e-12);
    }
}

TEST_CASE("reduced FBA inverse matches direct inversion of the projected smoothed covariance") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const Index   m   = 8;
        const Index   r   = 1 + trial % 4;
        const CMatrix cov = oracle::random_pd(m, rng);
        const CMatrix t   = oracle::random_matrix(m, r, rng);
        const CMatrix phi = oracle::direct_inverse(cov);
        CMatrix phi_bar   = oracle::direct_inverse(CMatrix(t.adjoint() * cov * t));
        phi_bar           = 0.5 * (phi_bar + phi_bar.adjoint());
        const FbaInverse out = fba_inverse_reduced(phi_bar, t, 0.5 * (phi + phi.adjoint()));
        CHECK_FALSE(out.fallback);
        const CMatrix expected = oracle::direct_inverse(CMatrix(t.adjoint() * oracle::fba(cov) * t));
        CHECK(rel(out.inverse, expected) < 1e-8);
    }
}

TEST_CASE("reduced FBA inverse with a selection matrix inverts the leading block") {
    std::mt19937_64 rng(47);
    const Index   m   = 7;
    const Index   r   = 3;
    const CMatrix cov = oracle::random_pd(m, rng);
    const CMatrix t   = CMatrix::Identity(m, r);
    const CMatrix phi = oracle::direct_inverse(cov);
    const CMatrix phi_bar = oracle::direct_inverse(CMatrix(cov.topLeftCorner(r, r)));
    const CMatrix out = fba_inverse_reduced(phi_bar, t, phi).inverse;
    const CMatrix smoothed = oracle::fba(cov);
    CHECK(rel(out, oracle::direct_inverse(CMatrix(smoothed.topLeftCorner(r, r)))) < 1e-9);
}

TEST_CASE("reduced FBA inverse at rank one reduces to a scalar formula") {
    std::mt19937_64 rng(53);
    const Index   m   = 6;
    const CMatrix cov = oracle::random_pd(m, rng);
    const CMatrix t   = oracle::random_matrix(m, 1, rng);
    const double  rbar = 2.5;
    CMatrix phi_bar(1, 1);
    phi_bar(0, 0) = 1.0 / rbar;
    const CMatrix phi = oracle::direct_inverse(cov);
    const Complex c   = (t.adjoint() * oracle::exchange(m) * cov.conjugate() * oracle::exchange(m) * t)(0, 0);
    const double  expected = 2.0 / (rbar + c.real());
    const CMatrix out = fba_inverse_reduced(phi_bar, t, phi).inverse;
    CHECK(out.rows() == 1);
    CHECK(std::abs(out(0, 0) - expected) < 1e-12 * expected);
}

TEST_CASE("reduced FBA inverse is a fixed point for persymmetric-consistent input") {
    std::mt19937_64 rng(59);
    const Index   m   = 6;
    const CMatrix cov = oracle::fba(oracle::random_pd(m, rng));
    const CMatrix t   = CMatrix::Identity(m, m);
    const CMatrix phi = oracle::direct_inverse(cov);
    const CMatrix phi_bar = oracle::direct_inverse(CMatrix(t.adjoint() * cov * t));
    CHECK(rel(fba_inverse_reduced(phi_bar, t, phi).inverse, phi_bar) < 1e-10);
}

TEST_CASE("reduced FBA inverse rejects mismatched shapes") {
    CHECK_THROWS_AS(fba_inverse_reduced(CMatrix::Identity(2, 2), CMatrix::Identity(4, 3), CMatrix::Identity(4, 4)),
                    std::invalid_argument);
}

}

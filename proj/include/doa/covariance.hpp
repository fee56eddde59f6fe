#pragma once

#include "doa/types.hpp"

namespace doa {

/// Condition-number ceiling above which a loaded inverse is abandoned in
/// favour of the Moore-Penrose pseudoinverse.
inline constexpr double kMaxConditionNumber = 1e12;

/// Relative tolerance for treating an input as Hermitian.
inline constexpr double kHermitianTolerance = 1e-10;

/// ||A - A^H||_F / ||A||_F (0 for the zero matrix).
double hermitian_defect(const CMatrix& a);

/// A <- (A + A^H) / 2.
void make_hermitian(CMatrix& a);

/// Exponentially weighted sample covariance R(i) = alpha R(i-1) + x x^H.
struct CovarianceState {
    CMatrix R;
    double  forgetting = 1.0;
    long    count      = 0;

    static CovarianceState zero(Index dim, double forgetting);

    void update(const CVector& x);
};

CovarianceState covariance_update(CovarianceState state, const CVector& x);

/// Weighted covariance of all columns of `data`, starting from `initial` * I.
CMatrix weighted_covariance(const CMatrix& data, double forgetting, double initial = 0.0);

/// Diagonal loading policy. `Auto` resolves to 1e-3 * trace(R) / dim.
struct Loading {
    enum class Mode { None, Fixed, Auto };

    Mode   mode  = Mode::Auto;
    double gamma = 0.0;

    static Loading none() { return {Mode::None, 0.0}; }
    static Loading fixed(double gamma) { return {Mode::Fixed, gamma}; }
    static Loading automatic() { return {Mode::Auto, 0.0}; }

    [[nodiscard]] double resolve(const CMatrix& r) const;
};

struct RegularizedInverse {
    CMatrix inverse;
    CMatrix effective; ///< the matrix that `inverse` actually inverts (R + gamma I, or R when pseudo)
    double  loading = 0.0;
    bool    pseudo  = false;
};

/// (R + gamma I)^-1 when its condition number is below kMaxConditionNumber,
/// otherwise pinv(R). Throws std::invalid_argument for non-square or
/// non-Hermitian input.
RegularizedInverse regularized_inverse(const CMatrix& r, double loading);
RegularizedInverse regularized_inverse(const CMatrix& r, Loading loading);

/// Pi_M: ones on the antidiagonal.
CMatrix exchange_matrix(Index size);

/// Pi A^* Pi, computed by index reversal.
inline CMatrix backward(const CMatrix& a) { return a.conjugate().reverse(); }

/// (R + Pi R^* Pi) / 2. The result is Hermitian and persymmetric.
CMatrix fba_smooth(const CMatrix& r);

/// RLS inverse-covariance state Phi = R^-1, started from Phi(0) = delta I.
struct InverseState {
    CMatrix Phi;
    double  forgetting   = 1.0;
    double  init_loading = 1.0; ///< delta
    long    count        = 0;

    static InverseState init(Index dim, double delta, double forgetting);

    /// Applies one matrix-inversion-lemma step and returns the gain vector.
    /// Throws NumericalFault (state unchanged) if the denominator is not
    /// strictly positive or the update is not finite.
    CVector update(const CVector& x);
};

struct RlsStep {
    CVector      gain;
    InverseState state;
};

RlsStep rls_inverse_update(const InverseState& state, const CVector& x);

struct FbaInverse {
    CMatrix inverse;
    bool    fallback = false; ///< inner Woodbury term was not positive definite
};

/// Inverse of fba_smooth(Phi^-1) in inversion-lemma form
///   2 [Phi - Phi Pi (Phi^* + Pi Phi Pi)^-1 Pi Phi].
FbaInverse fba_inverse_full(const CMatrix& phi);

/// Reduced-rank counterpart. With Rbar = Phi_bar^-1 and R = Phi^-1 it returns
///   2 (Rbar + T^H Pi R^* Pi T)^-1
///     = 2 [Phi_bar - Phi_bar T^H Pi (Phi^* + Pi T Phi_bar T^H Pi)^-1 Pi T Phi_bar],
/// which is (T^H fba_smooth(R) T)^-1 whenever Rbar = T^H R T.
FbaInverse fba_inverse_reduced(const CMatrix& phi_bar, const CMatrix& t, const CMatrix& phi);

} // namespace doa

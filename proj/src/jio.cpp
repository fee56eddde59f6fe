#include "doa/jio.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "doa/rank_selector.hpp"

namespace doa {

const char* to_string(JioVariant variant) {
    switch (variant) {
    case JioVariant::Jio: return "jio";
    case JioVariant::JioFba: return "jio_fba";
    case JioVariant::JioRls: return "jio_rls";
    case JioVariant::JioRlsFba: return "jio_rls_fba";
    }
    return "unknown";
}

void JioOptions::validate(Index sensors) const {
    if (adaptive_rank) {
        if (adaptive_rank->r_min < 1 || adaptive_rank->r_max < adaptive_rank->r_min || adaptive_rank->r_max > sensors) {
            throw std::invalid_argument("JioOptions: need 1 <= r_min <= r_max <= M");
        }
        if (reduced == ReducedCovariance::Projected) {
            throw std::invalid_argument("JioOptions: adaptive rank requires the recursive reduced covariance");
        }
    } else if (rank < 1 || rank > sensors) {
        throw std::invalid_argument("JioOptions: rank must lie in [1, M]");
    }
    if (!(forgetting > 0.0 && forgetting <= 1.0)) {
        throw std::invalid_argument("JioOptions: forgetting factor must lie in (0, 1]");
    }
    if (rank_weight && !(*rank_weight > 0.0 && *rank_weight <= 1.0)) {
        throw std::invalid_argument("JioOptions: rank weight must lie in (0, 1]");
    }
    if (initial_full < 0.0 || initial_reduced < 0.0) {
        throw std::invalid_argument("JioOptions: initial covariances must be non-negative");
    }
    if (is_rls()) {
        if (!(delta > 0.0) || !(delta_bar > 0.0)) {
            throw std::invalid_argument("JioOptions: delta and delta_bar must be positive");
        }
        if (reduced == ReducedCovariance::Projected) {
            throw std::invalid_argument("JioOptions: RLS variants maintain the recursive reduced inverse only");
        }
    }
}

void SpectrumResult::resize(std::size_t n) {
    angles.assign(n, 0.0);
    power.assign(n, std::numeric_limits<double>::quiet_NaN());
    q_values.assign(n, std::numeric_limits<double>::quiet_NaN());
    constraint_residual.assign(n, std::numeric_limits<double>::quiet_NaN());
    rank_used.assign(n, 0);
    valid.assign(n, false);
}

CMatrix update_T(const CMatrix& r_inv, const CVector& a, const CVector& g_bar) {
    if (r_inv.rows() != a.size() || r_inv.cols() != a.size()) {
        throw std::invalid_argument("update_T: dimension mismatch");
    }
    const double g_norm2 = g_bar.squaredNorm();
    if (g_norm2 == 0.0) {
        throw DegenerateState("update_T: auxiliary vector is zero");
    }
    const CVector ra    = r_inv * a;
    const double  denom = a.dot(ra).real();
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw NumericalFault("update_T: a^H R^-1 a is not positive");
    }
    return (ra / denom) * (g_bar.adjoint() / g_norm2);
}

CVector update_g(const CMatrix& r_bar_inv, const CVector& a_bar) {
    if (r_bar_inv.rows() != a_bar.size() || r_bar_inv.cols() != a_bar.size()) {
        throw std::invalid_argument("update_g: dimension mismatch");
    }
    if (a_bar.squaredNorm() == 0.0) {
        throw DegenerateState("update_g: reduced steering vector is zero");
    }
    const CVector ka    = r_bar_inv * a_bar;
    const double  denom = a_bar.dot(ka).real();
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw NumericalFault("update_g: abar^H Rbar^-1 abar is not positive");
    }
    return ka / denom;
}

namespace {

// Angle-independent full-rank quantities for snapshot i (1-based i -> index i-1).
struct FullStream {
    std::vector<CMatrix> inverse;   // used in the T update
    std::vector<CMatrix> effective; // matrix that `inverse` inverts (projected mode)
    std::vector<CMatrix> backward;  // Pi R^* Pi of the unsmoothed covariance (batch FBA)
    std::vector<CMatrix> rls_plain; // unsmoothed Phi(i) (RLS FBA)
};

FullStream precompute(const CMatrix& x, const JioOptions& opt) {
    const Index m = x.rows();
    const Index n = x.cols();
    FullStream  s;
    s.inverse.reserve(static_cast<std::size_t>(n));
    if (opt.is_rls()) {
        InverseState state = InverseState::init(m, opt.delta, opt.forgetting);
        for (Index i = 0; i < n; ++i) {
            state.update(x.col(i));
            if (opt.variant == JioVariant::JioRlsFba) {
                s.inverse.push_back(fba_inverse_full(state.Phi).inverse);
                s.rls_plain.push_back(state.Phi);
            } else {
                s.inverse.push_back(state.Phi);
            }
        }
        return s;
    }
    CovarianceState cov{opt.initial_full * CMatrix::Identity(m, m), opt.forgetting, 0};
    for (Index i = 0; i < n; ++i) {
        cov.update(x.col(i));
        const CMatrix      used = opt.is_fba() ? fba_smooth(cov.R) : cov.R;
        RegularizedInverse inv  = regularized_inverse(used, opt.loading);
        s.inverse.push_back(std::move(inv.inverse));
        if (opt.reduced == ReducedCovariance::Projected) {
            s.effective.push_back(std::move(inv.effective));
        } else if (opt.is_fba()) {
            s.backward.push_back(backward(cov.R));
        }
    }
    return s;
}

// Mutable per-angle recursion state at the maximal rank.
struct Recursion {
    CMatrix      T;
    CMatrix      r_bar;   // batch recursive
    InverseState phi_bar; // RLS
};

Recursion initial_recursion(Index m, int r, const JioOptions& opt) {
    Recursion rec;
    rec.T = CMatrix::Identity(m, r);
    if (opt.is_rls()) {
        rec.phi_bar = InverseState::init(r, opt.delta_bar, opt.forgetting);
    } else {
        rec.r_bar = opt.initial_reduced * CMatrix::Identity(r, r);
    }
    return rec;
}

struct AngleOutput {
    double  power;
    double  residual;
    int     rank;
    CMatrix T;
    CVector g;
    CMatrix K;
};

// Inverse of the leading `sel` x `sel` block of K^-1: the Schur complement in K.
CMatrix leading_block_inverse(const CMatrix& k, int sel) {
    const Index   rem    = k.rows() - sel;
    const CMatrix k22    = k.bottomRightCorner(rem, rem);
    CMatrix       schur  = k.topLeftCorner(sel, sel) - k.topRightCorner(sel, rem) * k22.ldlt().solve(k.bottomLeftCorner(rem, sel));
    make_hermitian(schur);
    return schur;
}

AngleOutput run_angle(const CMatrix& x, const CVector& a, const FullStream& full, const JioOptions& opt,
                      Recursion& rec) {
    const Index n     = x.cols();
    const int   r     = opt.state_rank();
    const bool  proj  = opt.reduced == ReducedCovariance::Projected;
    const bool  adapt = opt.adaptive_rank.has_value();

    std::optional<RankSweepState> sweep;
    CVector                       g;
    if (adapt) {
        sweep.emplace(opt.adaptive_rank->r_min, opt.adaptive_rank->r_max, opt.rank_weight.value_or(opt.forgetting));
        const CVector a_bar0 = rec.T.adjoint() * a;
        g                    = a_bar0 / a_bar0.squaredNorm();
    }

    int     sel = r;
    CMatrix t_prev;
    CVector a_bar;
    CMatrix k;
    for (Index i = 0; i < n; ++i) {
        const CVector x_bar = rec.T.adjoint() * x.col(i);
        a_bar               = rec.T.adjoint() * a;
        if (adapt) {
            sweep->accumulate(x_bar, g);
            sel = sweep->select();
        }

        if (opt.is_rls()) {
            rec.phi_bar.update(x_bar);
            if (opt.is_fba()) {
                k = fba_inverse_reduced(rec.phi_bar.Phi, rec.T, full.rls_plain[static_cast<std::size_t>(i)]).inverse;
            } else {
                k = rec.phi_bar.Phi;
            }
            if (sel < r) {
                k = leading_block_inverse(k, sel);
            }
        } else if (proj) {
            CMatrix projected = rec.T.adjoint() * full.effective[static_cast<std::size_t>(i)] * rec.T;
            make_hermitian(projected);
            k = regularized_inverse(projected, 0.0).inverse;
        } else {
            rec.r_bar *= opt.forgetting;
            rec.r_bar.noalias() += x_bar * x_bar.adjoint();
            make_hermitian(rec.r_bar);
            CMatrix used = rec.r_bar;
            if (opt.is_fba()) {
                used = 0.5 * (rec.r_bar + rec.T.adjoint() * full.backward[static_cast<std::size_t>(i)] * rec.T);
                make_hermitian(used);
            }
            k = regularized_inverse(CMatrix(used.topLeftCorner(sel, sel)), opt.reduced_loading).inverse;
        }

        if (sel < r) {
            a_bar = a_bar.head(sel).eval();
            g     = CVector::Zero(r);
            g.head(sel) = update_g(k, a_bar);
        } else {
            g = update_g(k, a_bar);
        }
        t_prev = rec.T;
        rec.T  = update_T(full.inverse[static_cast<std::size_t>(i)], a, g);
    }

    AngleOutput out;
    out.residual = std::abs(g.dot(rec.T.adjoint() * a) - Complex{1.0, 0.0});
    out.g        = g;
    out.rank     = sel;

    if (proj) {
        // Evaluate with the final T so that the result is a^H R^-1 a exactly.
        CMatrix projected = rec.T.adjoint() * full.effective.back() * rec.T;
        make_hermitian(projected);
        k     = regularized_inverse(projected, 0.0).inverse;
        a_bar = rec.T.adjoint() * a;
        out.T = rec.T;
    } else {
        out.T = t_prev.leftCols(sel);
    }

    const double q = a_bar.dot(k * a_bar).real();
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw NumericalFault("jio: non-positive output quadratic form");
    }
    out.power = 1.0 / q;
    out.K     = std::move(k);
    return out;
}

} // namespace

SpectrumResult jio_family_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, const JioOptions& options) {
    const Index m = data.sensors();
    if (data.snapshots() < 1) {
        throw std::invalid_argument("jio: at least one snapshot is required");
    }
    options.validate(m);

    SpectrumResult result;
    result.method = to_string(options.variant);
    result.resize(grid.size());
    if (options.keep_states) {
        result.states.resize(grid.size());
    }

    const FullStream full = precompute(data.data, options);
    const int        r    = options.state_rank();
    Recursion        rec  = initial_recursion(m, r, options);

    for (std::size_t n = 0; n < grid.size(); ++n) {
        result.angles[n] = grid[n];
        if (!options.persist_across_angles) {
            rec = initial_recursion(m, r, options);
        }
        Recursion backup = options.persist_across_angles ? rec : Recursion{};
        try {
            const CVector a   = steering_vector(data.geometry, grid[n]);
            AngleOutput   out = run_angle(data.data, a, full, options, rec);
            result.power[n]               = out.power;
            result.q_values[n]            = 1.0 / out.power;
            result.constraint_residual[n] = out.residual;
            result.rank_used[n]           = out.rank;
            result.valid[n]               = true;
            if (options.keep_states) {
                result.states[n] = {std::move(out.T), std::move(out.g), std::move(out.K)};
            }
        } catch (const NumericalFault&) {
            ++result.faults;
            if (options.persist_across_angles) {
                rec = std::move(backup);
            }
        } catch (const DegenerateState&) {
            ++result.faults;
            if (options.persist_across_angles) {
                rec = std::move(backup);
            }
        }
    }
    return result;
}

SpectrumResult jio_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                            Loading loading) {
    JioOptions opt;
    opt.variant         = JioVariant::Jio;
    opt.rank            = rank;
    opt.forgetting      = forgetting;
    opt.loading         = loading;
    opt.reduced_loading = loading;
    return jio_family_spectrum(data, grid, opt);
}

SpectrumResult jio_fba_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                Loading loading) {
    JioOptions opt;
    opt.variant         = JioVariant::JioFba;
    opt.rank            = rank;
    opt.forgetting      = forgetting;
    opt.loading         = loading;
    opt.reduced_loading = loading;
    return jio_family_spectrum(data, grid, opt);
}

SpectrumResult jio_rls_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                double delta, double delta_bar) {
    JioOptions opt;
    opt.variant    = JioVariant::JioRls;
    opt.rank       = rank;
    opt.forgetting = forgetting;
    opt.delta      = delta;
    opt.delta_bar  = delta_bar;
    return jio_family_spectrum(data, grid, opt);
}

SpectrumResult jio_rls_fba_spectrum(const SnapshotMatrix& data, const ScanGrid& grid, int rank, double forgetting,
                                    double delta, double delta_bar) {
    JioOptions opt;
    opt.variant    = JioVariant::JioRlsFba;
    opt.rank       = rank;
    opt.forgetting = forgetting;
    opt.delta      = delta;
    opt.delta_bar  = delta_bar;
    return jio_family_spectrum(data, grid, opt);
}

} // namespace doa

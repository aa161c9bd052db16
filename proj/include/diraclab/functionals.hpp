#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diraclab/field.hpp"
#include "diraclab/model.hpp"
#include "diraclab/verdict.hpp"

namespace diraclab {

struct Trajectory;

// ---------------------------------------------------------------------------
// Single-solution functionals
// ---------------------------------------------------------------------------

struct PointwiseFunctionals {
    double L0 = 0.0; ///< charge, sum (|u|^2 + |v|^2) dx
    double D0 = 0.0; ///< interaction dissipation, sum |u|^2 |v|^2 dx
    double linf_sq = 0.0;
    double h1_semi = 0.0;
};

PointwiseFunctionals pointwise_functionals(const SpinorField &field);

/// Ordered interaction sum_{j<k} |u_j|^2 |v_k|^2 dx^2, one suffix-sum pass.
/// The diagonal j == k belongs to D0, not Q0.
double bony_Q0(const SpinorField &field);

/// Charges carried by each component separately.
struct ComponentCharges {
    double u = 0.0;
    double v = 0.0;
};
ComponentCharges component_charges(const SpinorField &field);

/// Upper bound for the null-line integrals of a solution started with charge L0_initial:
///   q(t0) = t0 (m L0 + 4 c m L0^2) + 4 c L0^2 + L0.
double q_bound(double t0, double mass, double c, double L0_initial);

/// Sup-norm envelope up to time T:
///   (sup0 + 2 m q(T)) exp(m T + 2 c q(T)).
double linf_envelope(double sup0, double T, double mass, double c, double L0_initial);

/// Running integrals of |u|^2 along left-moving null lines (x + t = const) and of |v|^2
/// along right-moving null lines (x - t = const), one value per terminal cell.
///
/// The mesh is CFL = 1, so each line visits one cell centre per step. The line measure is
/// 2 dt (the flux of |u|^2 through a null line with unit-speed transport), integrated by the
/// trapezoid rule.
class NullLineIntegrals {
public:
    NullLineIntegrals() = default;
    explicit NullLineIntegrals(const Grid &grid);

    /// Extends every line by one step, `before` at t_n and `after` at t_{n+1}.
    void advance(const SpinorField &before, const SpinorField &after);

    std::size_t steps() const noexcept { return steps_; }
    const std::vector<double> &gamma_r() const noexcept { return gamma_r_; }
    const std::vector<double> &gamma_l() const noexcept { return gamma_l_; }

    /// Largest gamma over terminal cells whose backward cone fits inside the mesh.
    /// Returns 0 when no such cell exists.
    double max_gamma_r() const noexcept;
    double max_gamma_l() const noexcept;

private:
    double dt_ = 0.0;
    std::size_t steps_ = 0;
    std::vector<double> gamma_r_;
    std::vector<double> gamma_l_;
};

struct FunctionalRecord {
    double t = 0.0;
    double L0 = 0.0;
    double Q0 = 0.0;
    double D0 = 0.0;
    double int_D0 = 0.0;
    double bony_budget = 0.0;   ///< 2 m L0(0)^2 t + Q0(0)
    double bony_residual = 0.0; ///< bony_budget - Q0 - int_D0
    double gammaR = 0.0;
    double gammaL = 0.0;
    double q_bound = 0.0;
    double linf_sq = 0.0;
    double linf_envelope = 0.0;
    double h1_semi = 0.0;
};

/// Builds the record stream of one trajectory; int_D0 is a trapezoid fold over the
/// records handed to it.
class RecordBuilder {
public:
    RecordBuilder(double mass, double c, const SpinorField &initial);

    FunctionalRecord make(const SpinorField &field, const NullLineIntegrals &lines);

    double initial_charge() const noexcept { return L0_initial_; }
    double initial_sup() const noexcept { return sup_initial_; }

private:
    double mass_;
    double c_;
    double L0_initial_;
    double Q0_initial_;
    double sup_initial_;
    bool first_ = true;
    double last_t_ = 0.0;
    double last_D0_ = 0.0;
    double int_D0_ = 0.0;
};

struct BudgetPoint {
    double t = 0.0;
    double cumulative = 0.0;   ///< 2 m L0(0)^2 t + Q0(0) - Q0(t) - int D0
    double differential = 0.0; ///< 2 m L0(0)^2 - dQ0/dt - mean D0 over the preceding interval
    double tolerance = 0.0;
};

struct BudgetCheck {
    std::vector<BudgetPoint> points;
    Verdict cumulative;
    Verdict differential;
};

/// Checks Q0(t) + int_0^t D0 <= 2 m L0(0)^2 t + Q0(0) and its per-interval form.
/// Tolerance: rel_tol * L0(0)^2 plus a trapezoid error estimate for int D0.
/// Runs with L0(0) > delta are reported not applicable.
BudgetCheck bony_budget_check(std::span<const FunctionalRecord> records, double mass, double delta,
                              double rel_tol = 1.0e-6);

struct LineIntegralSample {
    double x0 = 0.0;
    double t0 = 0.0;
    double gammaR = 0.0;
    double gammaL = 0.0;
    double q_bound = 0.0;
};

/// Null-line integrals ending at (x0, t0). t0 must be a stored snapshot time and x0 is
/// snapped to its cell; the backward cone must lie inside the mesh (domain_too_small).
LineIntegralSample line_integrals(const Trajectory &trajectory, double x0, double t0);

/// linf_sq(t) <= envelope(t) at every record, and <= envelope(T) at the final time T.
Verdict linf_envelope_check(std::span<const FunctionalRecord> records, double delta, double rel_tol = 1.0e-12);

/// gammaR, gammaL <= q(t) at every record (sup over admissible terminal cells).
Verdict line_integral_check(std::span<const FunctionalRecord> records, double delta, double rel_tol = 1.0e-6);

/// |L0(t) - L0(0)| <= rel_tol * L0(0).
Verdict charge_check(std::span<const FunctionalRecord> records, double rel_tol = 1.0e-10);

// ---------------------------------------------------------------------------
// Two-solution functionals
// ---------------------------------------------------------------------------

struct PairFunctionals {
    double L1 = 0.0;
    double Q1 = 0.0;
    double D1 = 0.0;
};

/// With U = uA - uB, V = vA - vB and
///   r2(x,y) = |U(x)|^2 (|vA(y)|^2 + |vB(y)|^2) + (|uA(x)|^2 + |uB(x)|^2) |V(y)|^2
/// returns L1 = sum (|U|^2+|V|^2) dx, D1 = sum r2(x,x) dx, Q1 = sum_{x<y} r2(x,y) dx^2.
PairFunctionals pair_functionals(const SpinorField &a, const SpinorField &b);

struct PairRecord {
    double t = 0.0;
    double L1 = 0.0;
    double Q1 = 0.0;
    double D1 = 0.0;
    double int_D1 = 0.0;
    double lyapunov = 0.0; ///< L1 + K Q1
    double h3 = 0.0;
    double h3_closed = 0.0;   ///< closed bound on h3 as published (no factor c on the D0 part)
    double h3_closed_c = 0.0; ///< closed bound on h3 carrying the factor c
    double h4 = 0.0;
    double K = 0.0;
    double bound_residual = 0.0; ///< h4 L1(0) - L1
    double growth = 0.0;         ///< 2 m (L0(0) + L0'(0)) + c (D0 + D0')
};

/// Folds pair functionals plus the two base runs' D0 values into PairRecords.
class PairRecordBuilder {
public:
    PairRecordBuilder(const ModelConstants &constants, double mass, double L0a_initial, double L0b_initial);

    PairRecord make(double t, const PairFunctionals &pf, double D0a, double D0b);

private:
    ModelConstants k_;
    double mass_;
    double L0a_;
    double L0b_;
    bool first_ = true;
    double L1_initial_ = 0.0;
    double last_t_ = 0.0;
    double last_D1_ = 0.0;
    double last_Dsum_ = 0.0;
    double int_D1_ = 0.0;
    double int_Dsum_ = 0.0;
};

struct StabilityCheck {
    Verdict l2_envelope;       ///< L1(t) <= h4(t) L1(0)
    Verdict lyapunov_interval; ///< interval form of d/dt(L1 + K Q1) + D1 <= growth * L1
    Verdict lyapunov_interval_k; ///< same with the right side scaled by K
    Verdict h3_closed;         ///< h3 <= closed bound with c (gating)
    Verdict h3_closed_published; ///< h3 <= closed bound as published (informational)
};

/// Verdicts for a pair record stream. Not applicable when either base charge exceeds delta.
StabilityCheck stability_envelopes(std::span<const PairRecord> records, const ModelConstants &constants,
                                   double L0a_initial, double L0b_initial, double rel_tol = 1.0e-6);

} // namespace diraclab

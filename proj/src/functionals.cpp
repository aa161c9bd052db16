#include "diraclab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "diraclab/errors.hpp"
#include "diraclab/evolve.hpp"

namespace diraclab {

PointwiseFunctionals pointwise_functionals(const SpinorField &field)
{
    PointwiseFunctionals out;
    const Norms n = norms(field);
    double d0 = 0.0;
    for (std::size_t j = 0; j < field.size(); ++j) {
        d0 += std::norm(field.u[j]) * std::norm(field.v[j]);
    }
    out.L0 = n.charge;
    out.D0 = d0 * field.grid.dx();
    out.linf_sq = n.linf_sq;
    out.h1_semi = n.h1_semi;
    return out;
}

double bony_Q0(const SpinorField &field)
{
    double suffix_v = 0.0;
    double q = 0.0;
    for (std::size_t j = field.size(); j-- > 0;) {
        q += std::norm(field.u[j]) * suffix_v;
        suffix_v += std::norm(field.v[j]);
    }
    const double dx = field.grid.dx();
    return q * dx * dx;
}

ComponentCharges component_charges(const SpinorField &field)
{
    ComponentCharges c;
    for (std::size_t j = 0; j < field.size(); ++j) {
        c.u += std::norm(field.u[j]);
        c.v += std::norm(field.v[j]);
    }
    c.u *= field.grid.dx();
    c.v *= field.grid.dx();
    return c;
}

double q_bound(double t0, double mass, double c, double L0)
{
    return t0 * (mass * L0 + 4.0 * c * mass * L0 * L0) + 4.0 * c * L0 * L0 + L0;
}

double linf_envelope(double sup0, double T, double mass, double c, double L0)
{
    const double q = q_bound(T, mass, c, L0);
    return (sup0 + 2.0 * mass * q) * std::exp(mass * T + 2.0 * c * q);
}

// ---------------------------------------------------------------------------

NullLineIntegrals::NullLineIntegrals(const Grid &grid)
    : dt_(grid.dx()), gamma_r_(grid.n_cells(), 0.0), gamma_l_(grid.n_cells(), 0.0)
{
}

void NullLineIntegrals::advance(const SpinorField &before, const SpinorField &after)
{
    const std::size_t N = gamma_r_.size();
    // |u|^2 rides lines moving left, |v|^2 lines moving right; weight 2 dt * 1/2 per endpoint.
    for (std::size_t j = 0; j + 1 < N; ++j) {
        gamma_r_[j] = gamma_r_[j + 1] + dt_ * (std::norm(before.u[j + 1]) + std::norm(after.u[j]));
    }
    gamma_r_[N - 1] = dt_ * std::norm(after.u[N - 1]);
    for (std::size_t j = N - 1; j > 0; --j) {
        gamma_l_[j] = gamma_l_[j - 1] + dt_ * (std::norm(before.v[j - 1]) + std::norm(after.v[j]));
    }
    gamma_l_[0] = dt_ * std::norm(after.v[0]);
    ++steps_;
}

namespace {

double max_inside_cone(const std::vector<double> &g, std::size_t steps)
{
    const std::size_t N = g.size();
    if (2 * steps >= N) return 0.0;
    double m = 0.0;
    for (std::size_t j = steps; j + steps < N; ++j) m = std::max(m, g[j]);
    return m;
}

} // namespace

double NullLineIntegrals::max_gamma_r() const noexcept { return max_inside_cone(gamma_r_, steps_); }
double NullLineIntegrals::max_gamma_l() const noexcept { return max_inside_cone(gamma_l_, steps_); }

// ---------------------------------------------------------------------------

RecordBuilder::RecordBuilder(double mass, double c, const SpinorField &initial) : mass_(mass), c_(c)
{
    const auto pf = pointwise_functionals(initial);
    L0_initial_ = pf.L0;
    sup_initial_ = pf.linf_sq;
    Q0_initial_ = bony_Q0(initial);
}

FunctionalRecord RecordBuilder::make(const SpinorField &field, const NullLineIntegrals &lines)
{
    const auto pf = pointwise_functionals(field);
    FunctionalRecord r;
    r.t = field.t;
    r.L0 = pf.L0;
    r.Q0 = bony_Q0(field);
    r.D0 = pf.D0;
    if (first_) {
        first_ = false;
    } else {
        int_D0_ += 0.5 * (field.t - last_t_) * (pf.D0 + last_D0_);
    }
    last_t_ = field.t;
    last_D0_ = pf.D0;
    r.int_D0 = int_D0_;
    r.bony_budget = 2.0 * mass_ * L0_initial_ * L0_initial_ * field.t + Q0_initial_;
    r.bony_residual = r.bony_budget - r.Q0 - r.int_D0;
    r.gammaR = lines.max_gamma_r();
    r.gammaL = lines.max_gamma_l();
    r.q_bound = q_bound(field.t, mass_, c_, L0_initial_);
    r.linf_sq = pf.linf_sq;
    r.linf_envelope = linf_envelope(sup_initial_, field.t, mass_, c_, L0_initial_);
    r.h1_semi = pf.h1_semi;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

/// (dt/12) |f_{i+1} - 2 f_i + f_{i-1}|, the leading trapezoid error on [t_{i-1}, t_i].
template <typename F>
double trapezoid_error(std::size_t i, std::size_t n, double dt, F &&f)
{
    if (n < 3) return 0.0;
    std::size_t mid = i;
    if (mid + 1 >= n) mid = n - 2;
    if (mid < 1) mid = 1;
    return dt / 12.0 * std::abs(f(mid + 1) - 2.0 * f(mid) + f(mid - 1));
}

} // namespace

BudgetCheck bony_budget_check(std::span<const FunctionalRecord> records, double mass, double delta, double rel_tol)
{
    BudgetCheck out;
    if (records.empty()) {
        out.cumulative = not_applicable("bony_budget", "no records");
        out.differential = not_applicable("bony_budget_rate", "no records");
        return out;
    }
    const double L0 = records.front().L0;
    const double rate = 2.0 * mass * L0 * L0;
    const double base_tol = rel_tol * L0 * L0;

    auto D0 = [&](std::size_t i) { return records[i].D0; };
    double quad = 0.0;
    out.points.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        BudgetPoint p;
        p.t = records[i].t;
        p.cumulative = records[i].bony_residual;
        double local = 0.0;
        if (i > 0) {
            const double dt = records[i].t - records[i - 1].t;
            local = trapezoid_error(i, records.size(), dt, D0);
            quad += local;
            p.differential = rate - (records[i].Q0 - records[i - 1].Q0) / dt - 0.5 * (records[i].D0 + records[i - 1].D0);
        }
        p.tolerance = base_tol + quad;
        out.points.push_back(p);
    }

    if (L0 > delta) {
        const auto why = fmt::format("initial charge {:.6g} exceeds small-data threshold {:.6g}", L0, delta);
        out.cumulative = not_applicable("bony_budget", why);
        out.differential = not_applicable("bony_budget_rate", why);
        return out;
    }

    out.cumulative = make_verdict("bony_budget", base_tol);
    out.differential = make_verdict("bony_budget_rate", base_tol);
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        const auto &p = out.points[i];
        // Per-point tolerances differ; fold them into the margin so the verdict uses base_tol.
        out.cumulative.observe(p.cumulative + (p.tolerance - base_tol));
        if (i > 0) {
            const double dt = records[i].t - records[i - 1].t;
            const double local = trapezoid_error(i, records.size(), dt, D0) / dt;
            out.differential.observe(p.differential + local);
        }
    }
    out.cumulative.note = "tolerance = rel_tol * L0(0)^2 + accumulated trapezoid estimate";
    out.differential.note = "per-interval form; tolerance = rel_tol * L0(0)^2 + local trapezoid estimate";
    out.cumulative.finish();
    out.differential.finish();
    return out;
}

LineIntegralSample line_integrals(const Trajectory &trajectory, double x0, double t0)
{
    const Snapshot *snap = nullptr;
    for (const auto &s : trajectory.snapshots) {
        if (std::abs(s.field.t - t0) <= 1.0e-9 * std::max(1.0, std::abs(t0))) {
            snap = &s;
            break;
        }
    }
    if (snap == nullptr) {
        throw configuration_error(fmt::format("no stored snapshot at t0 = {}", t0));
    }
    const Grid &g = snap->field.grid;
    if (x0 - t0 < g.x_min() || x0 + t0 > g.x_max()) {
        throw domain_too_small(fmt::format("backward cone of ({}, {}) leaves the domain [{}, {}]", x0, t0, g.x_min(),
                                           g.x_max()));
    }
    const std::size_t j = g.nearest_cell(x0);
    const std::size_t n = snap->step;
    if (j < n || j + n >= g.n_cells()) {
        throw domain_too_small(fmt::format("backward cone of cell {} at step {} leaves the mesh", j, n));
    }
    const auto &rec = trajectory.records.at(static_cast<std::size_t>(&*snap - trajectory.snapshots.data()));
    LineIntegralSample s;
    s.x0 = g.center(j);
    s.t0 = snap->field.t;
    s.gammaR = snap->gamma_r.at(j);
    s.gammaL = snap->gamma_l.at(j);
    s.q_bound = rec.q_bound;
    return s;
}

Verdict linf_envelope_check(std::span<const FunctionalRecord> records, double delta, double rel_tol)
{
    if (records.empty()) return not_applicable("linf_envelope", "no records");
    const double L0 = records.front().L0;
    if (L0 > delta) {
        return not_applicable("linf_envelope",
                              fmt::format("initial charge {:.6g} exceeds small-data threshold {:.6g}", L0, delta));
    }
    const double final_env = records.back().linf_envelope;
    Verdict v = make_verdict("linf_envelope", rel_tol * records.front().linf_sq);
    for (const auto &r : records) {
        v.observe(r.linf_envelope - r.linf_sq);
        v.observe(final_env - r.linf_sq);
    }
    v.note = "checked against the envelope at each record time and at the final time";
    return v.finish();
}

Verdict line_integral_check(std::span<const FunctionalRecord> records, double delta, double rel_tol)
{
    if (records.empty()) return not_applicable("line_integrals", "no records");
    const double L0 = records.front().L0;
    if (L0 > delta) {
        return not_applicable("line_integrals",
                              fmt::format("initial charge {:.6g} exceeds small-data threshold {:.6g}", L0, delta));
    }
    Verdict v = make_verdict("line_integrals", rel_tol * L0 * L0);
    for (const auto &r : records) {
        v.observe(r.q_bound - r.gammaR);
        v.observe(r.q_bound - r.gammaL);
    }
    v.note = "sup over terminal cells whose backward cone fits in the mesh";
    return v.finish();
}

Verdict charge_check(std::span<const FunctionalRecord> records, double rel_tol)
{
    if (records.empty()) return not_applicable("charge_conservation", "no records");
    const double L0 = records.front().L0;
    Verdict v = make_verdict("charge_conservation", rel_tol * L0);
    for (const auto &r : records) v.observe(-std::abs(r.L0 - L0));
    return v.finish();
}

// ---------------------------------------------------------------------------

PairFunctionals pair_functionals(const SpinorField &a, const SpinorField &b)
{
    if (!(a.grid == b.grid)) {
        throw configuration_error("pair_functionals: fields live on different grids");
    }
    if (std::abs(a.t - b.t) > 1.0e-12 * std::max(1.0, std::abs(a.t))) {
        throw configuration_error(fmt::format("pair_functionals: time mismatch ({} vs {})", a.t, b.t));
    }
    PairFunctionals out;
    double l1 = 0.0, d1 = 0.0, q1 = 0.0;
    double suffix_w = 0.0; // sum_{k>j} |vA|^2 + |vB|^2
    double suffix_V = 0.0; // sum_{k>j} |V|^2
    for (std::size_t j = a.size(); j-- > 0;) {
        const double U2 = std::norm(a.u[j] - b.u[j]);
        const double V2 = std::norm(a.v[j] - b.v[j]);
        const double W = std::norm(a.v[j]) + std::norm(b.v[j]);
        const double P = std::norm(a.u[j]) + std::norm(b.u[j]);
        l1 += U2 + V2;
        d1 += U2 * W + P * V2;
        q1 += U2 * suffix_w + P * suffix_V;
        suffix_w += W;
        suffix_V += V2;
    }
    const double dx = a.grid.dx();
    out.L1 = l1 * dx;
    out.D1 = d1 * dx;
    out.Q1 = q1 * dx * dx;
    return out;
}

PairRecordBuilder::PairRecordBuilder(const ModelConstants &constants, double mass, double L0a, double L0b)
    : k_(constants), mass_(mass), L0a_(L0a), L0b_(L0b)
{
}

PairRecord PairRecordBuilder::make(double t, const PairFunctionals &pf, double D0a, double D0b)
{
    const double Dsum = D0a + D0b;
    if (first_) {
        first_ = false;
        L1_initial_ = pf.L1;
    } else {
        const double dt = t - last_t_;
        int_D1_ += 0.5 * dt * (pf.D1 + last_D1_);
        int_Dsum_ += 0.5 * dt * (Dsum + last_Dsum_);
    }
    last_t_ = t;
    last_D1_ = pf.D1;
    last_Dsum_ = Dsum;

    const double m = mass_, c = k_.c, a = L0a_, b = L0b_;
    PairRecord r;
    r.t = t;
    r.L1 = pf.L1;
    r.Q1 = pf.Q1;
    r.D1 = pf.D1;
    r.int_D1 = int_D1_;
    r.K = k_.K;
    r.lyapunov = pf.L1 + k_.K * pf.Q1;
    r.h3 = 2.0 * m * (a + b) * t + c * int_Dsum_;
    r.h3_closed = 2.0 * m * (a + b + a * a + b * b) * t + a * a + b * b;
    r.h3_closed_c = 2.0 * m * (a + b) * t + c * (2.0 * m * a * a * t + a * a + 2.0 * m * b * b * t + b * b);
    r.h4 = (1.0 + k_.K * (a + b)) * std::exp(r.h3);
    r.bound_residual = r.h4 * L1_initial_ - pf.L1;
    r.growth = 2.0 * m * (a + b) + c * Dsum;
    return r;
}

StabilityCheck stability_envelopes(std::span<const PairRecord> records, const ModelConstants &k, double L0a,
                                   double L0b, double rel_tol)
{
    StabilityCheck out;
    if (records.empty() || L0a > k.delta || L0b > k.delta) {
        const auto why = records.empty()
                             ? std::string("no records")
                             : fmt::format("base charges {:.6g}, {:.6g} exceed small-data threshold {:.6g}", L0a,
                                           L0b, k.delta);
        out.l2_envelope = not_applicable("l2_stability_envelope", why);
        out.lyapunov_interval = not_applicable("lyapunov_interval", why);
        out.lyapunov_interval_k = not_applicable("lyapunov_interval_k", why);
        out.h3_closed = not_applicable("h3_closed_bound", why);
        out.h3_closed_published = not_applicable("h3_closed_bound_published", why);
        out.h3_closed_published.informational = true;
        return out;
    }

    const auto &r0 = records.front();
    out.l2_envelope = make_verdict("l2_stability_envelope", rel_tol * r0.L1);
    out.lyapunov_interval = make_verdict("lyapunov_interval", rel_tol * r0.lyapunov);
    out.lyapunov_interval_k = make_verdict("lyapunov_interval_k", rel_tol * r0.lyapunov);
    out.h3_closed = make_verdict("h3_closed_bound", rel_tol * std::max(r0.h3_closed_c, 1.0e-300));
    out.h3_closed_published = make_verdict("h3_closed_bound_published", rel_tol * std::max(r0.h3_closed, 1.0e-300));
    out.h3_closed_published.informational = true;

    auto D1 = [&](std::size_t i) { return records[i].D1; };
    auto gL1 = [&](std::size_t i) { return records[i].growth * records[i].L1; };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto &r = records[i];
        out.l2_envelope.observe(r.bound_residual);
        out.h3_closed.observe(r.h3_closed_c - r.h3);
        out.h3_closed_published.observe(r.h3_closed - r.h3);
        if (i == 0) continue;
        const auto &p = records[i - 1];
        const double dt = r.t - p.t;
        const double lhs = (r.lyapunov - p.lyapunov) + 0.5 * dt * (r.D1 + p.D1);
        const double rhs = 0.5 * dt * (r.growth * r.L1 + p.growth * p.L1);
        const double qD = trapezoid_error(i, records.size(), dt, D1);
        const double qg = trapezoid_error(i, records.size(), dt, gL1);
        out.lyapunov_interval.observe(rhs - lhs + qD + qg);
        // The proof multiplies the Q1 estimate by K, growth term included.
        out.lyapunov_interval_k.observe(k.K * (rhs + qg) - lhs + qD);
    }
    out.l2_envelope.note = "L1(t) <= h4(t) L1(0), h4 = (1 + K (L0 + L0')) exp(h3)";
    out.lyapunov_interval.note = "interval form, trapezoid in time; tolerance = rel_tol * (L1 + K Q1)(0) + "
                                 "trapezoid estimate";
    out.lyapunov_interval_k.note = "interval form with K (2 m (L0 + L0') + c (D0 + D0')) L1 on the right";
    out.h3_closed.note = "closed bound carrying the factor c on the dissipation integrals";
    out.h3_closed_published.note = "closed bound without the factor c; informational";
    out.l2_envelope.finish();
    out.lyapunov_interval.finish();
    out.lyapunov_interval_k.finish();
    out.h3_closed.finish();
    out.h3_closed_published.finish();
    return out;
}

} // namespace diraclab

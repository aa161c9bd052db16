#include "diraclab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "diraclab/errors.hpp"
#include "diraclab/oracles.hpp"

namespace diraclab {

namespace {

template <typename F>
auto labelled(const char *who, F &&f)
{
    try {
        return f();
    } catch (const light_cone_overflow &e) {
        throw light_cone_overflow(fmt::format("{} member: {}", who, e.what()), e.step());
    } catch (const non_finite_field &e) {
        throw non_finite_field(fmt::format("{} member: {}", who, e.what()), e.step());
    }
}

} // namespace

PairResult pair_run(const PairExperiment &exp)
{
    validate_scheme(exp.params, exp.scheme);
    if (!(exp.base_init.grid == exp.perturbed_init.grid)) {
        throw configuration_error("pair_run: base and perturbed fields live on different grids");
    }
    const Grid &grid = exp.base_init.grid;
    const std::size_t steps = step_count(grid, exp.scheme.t_final);

    SpinorField a = exp.base_init;
    SpinorField b = exp.perturbed_init;
    RecordBuilder ra(exp.params.mass, exp.constants.c, a);
    RecordBuilder rb(exp.params.mass, exp.constants.c, b);
    NullLineIntegrals la(grid), lb(grid);
    PairRecordBuilder pr(exp.constants, exp.params.mass, ra.initial_charge(), rb.initial_charge());

    PairResult out;
    out.L0_base = ra.initial_charge();
    out.L0_perturbed = rb.initial_charge();

    auto emit = [&] {
        out.base_records.push_back(ra.make(a, la));
        out.perturbed_records.push_back(rb.make(b, lb));
        out.records.push_back(
            pr.make(a.t, pair_functionals(a, b), out.base_records.back().D0, out.perturbed_records.back().D0));
    };

    emit();
    SpinorField before;
    for (std::size_t n = 1; n <= steps; ++n) {
        labelled("base", [&] {
            before = a;
            step_in_place(a, exp.params, exp.scheme, Direction::forward, n);
            la.advance(before, a);
            return 0;
        });
        labelled("perturbed", [&] {
            before = b;
            step_in_place(b, exp.params, exp.scheme, Direction::forward, n);
            lb.advance(before, b);
            return 0;
        });
        if (n % exp.scheme.diagnostics_stride == 0 || n == steps) emit();
    }
    out.checks = stability_envelopes(out.records, exp.constants, out.L0_base, out.L0_perturbed);
    return out;
}

void write_pair_csv(std::ostream &os, std::span<const PairRecord> records)
{
    os << "t,L1,Q1,D1,int_D1,lyapunov,h3,h3_closed,h4,bound_residual\n";
    for (const auto &r : records) {
        fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t, r.L1,
                   r.Q1, r.D1, r.int_D1, r.lyapunov, r.h3, r.h3_closed, r.h4, r.bound_residual);
    }
}

// ---------------------------------------------------------------------------

double CauchyResult::distance(std::size_t k, std::size_t j) const
{
    if (k == j) return 0.0;
    for (const auto &e : entries) {
        if ((e.k == k && e.j == j) || (e.k == j && e.j == k)) return e.d_sup;
    }
    throw configuration_error(fmt::format("no distance entry for ({}, {})", k, j));
}

namespace {

struct Sup {
    double value = 0.0;
    double t = 0.0;

    void update(double d, double time)
    {
        if (d > value) {
            value = d;
            t = time;
        }
    }
};

} // namespace

CauchyResult cauchy_experiment(const CauchyExperiment &exp)
{
    validate_scheme(exp.params, exp.scheme);
    std::vector<SpinorField> all = exp.members;
    all.push_back(exp.limit);
    const std::size_t n = all.size();
    for (const auto &f : all) {
        if (!(f.grid == exp.limit.grid)) throw configuration_error("cauchy_experiment: members on different grids");
    }
    const Grid &grid = exp.limit.grid;
    const std::size_t steps = step_count(grid, exp.scheme.t_final);
    const std::size_t stride = exp.scheme.diagnostics_stride;

    std::vector<double> L0(n), int_D0(n);
    std::vector<std::vector<Sup>> sup(n, std::vector<Sup>(n));
    auto fold = [&](const std::vector<const SpinorField *> &fields) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = k + 1; j < n; ++j) {
                sup[k][j].update(l2_distance(*fields[k], *fields[j]), fields[k]->t);
            }
        }
    };

    CauchyResult out;
    out.stride = stride;

    if (exp.streaming) {
        std::vector<SpinorField> fields = all;
        std::vector<RecordBuilder> builders;
        NullLineIntegrals idle(grid);
        for (const auto &f : fields) builders.emplace_back(exp.params.mass, exp.constants.c, f);
        std::vector<FunctionalRecord> last(n);
        auto snapshot = [&] {
            std::vector<const SpinorField *> ptrs;
            for (std::size_t k = 0; k < n; ++k) {
                last[k] = builders[k].make(fields[k], idle);
                ptrs.push_back(&fields[k]);
            }
            fold(ptrs);
        };
        snapshot();
        for (std::size_t s = 1; s <= steps; ++s) {
            for (std::size_t k = 0; k < n; ++k) step_in_place(fields[k], exp.params, exp.scheme, Direction::forward, s);
            if (s % stride == 0 || s == steps) snapshot();
        }
        for (std::size_t k = 0; k < n; ++k) {
            L0[k] = builders[k].initial_charge();
            int_D0[k] = last[k].int_D0;
        }
    } else {
        // Members are independent: evolve them concurrently, assemble in index order.
        std::vector<std::future<Trajectory>> jobs;
        for (const auto &f : all) {
            jobs.push_back(std::async(std::launch::async, [&exp, f] {
                return run_trajectory(f, exp.params, exp.scheme, exp.constants);
            }));
        }
        std::vector<Trajectory> trajs;
        for (auto &j : jobs) trajs.push_back(j.get());
        const std::size_t snaps = trajs.front().snapshots.size();
        for (std::size_t s = 0; s < snaps; ++s) {
            std::vector<const SpinorField *> ptrs;
            for (const auto &tr : trajs) ptrs.push_back(&tr.snapshots[s].field);
            fold(ptrs);
        }
        for (std::size_t k = 0; k < n; ++k) {
            L0[k] = trajs[k].records.front().L0;
            int_D0[k] = trajs[k].records.back().int_D0;
        }
        out.limit_trajectory = std::move(trajs.back());
    }

    const double T = exp.scheme.t_final;
    const double m = exp.params.mass;
    const auto &kc = exp.constants;
    bool applicable = std::all_of(L0.begin(), L0.end(), [&](double l) { return l <= kc.delta; });

    out.pair_bounds = applicable ? make_verdict("cauchy_pair_bounds", 0.0)
                                 : not_applicable("cauchy_pair_bounds", "a member charge exceeds the small-data "
                                                                        "threshold");
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = k + 1; j < n; ++j) {
            DistanceEntry e;
            e.k = k;
            e.j = j;
            e.d_initial = l2_distance(all[k], all[j]);
            e.d_sup = sup[k][j].value;
            e.t_sup = sup[k][j].t;
            const double h3 = 2.0 * m * (L0[k] + L0[j]) * T + kc.c * (int_D0[k] + int_D0[j]);
            const double h4 = (1.0 + kc.K * (L0[k] + L0[j])) * std::exp(h3);
            e.bound = std::sqrt(h4) * e.d_initial;
            if (applicable) {
                const double tol = 1.0e-12 * std::max(e.bound, 1.0e-300);
                e.verdict = e.d_sup <= e.bound + tol ? Status::pass : Status::fail;
                out.pair_bounds.observe((e.bound - e.d_sup) / std::max(e.bound, 1.0e-300) + 1.0e-12);
            }
            out.entries.push_back(e);
        }
    }
    out.pair_bounds.note = fmt::format("relative margin of sup-t distance vs sqrt(h4(T)) * initial distance; "
                                       "sup over every {} steps",
                                       stride);
    out.pair_bounds.finish();

    const std::size_t lim = n - 1;
    for (std::size_t k = 0; k < lim; ++k) out.limit_distances.push_back(sup[k][lim].value);
    for (std::size_t k = 0; k + 1 < out.limit_distances.size(); ++k) {
        out.ratios.push_back(out.limit_distances[k] / out.limit_distances[k + 1]);
    }

    out.monotone = make_verdict("limit_distance_monotone", 0.0);
    for (std::size_t k = 0; k + 1 < out.limit_distances.size(); ++k) {
        out.monotone.observe(out.limit_distances[k] - out.limit_distances[k + 1] > 0.0 ? 0.0 : -1.0);
    }
    out.monotone.finish();

    if (exp.expected_ratio) {
        const double r = *exp.expected_ratio;
        out.ratio_window = make_verdict("limit_distance_ratio", 0.0);
        for (double q : out.ratios) out.ratio_window.observe(std::min(q - 0.9 * r, 1.1 * r - q));
        out.ratio_window.note = fmt::format("consecutive ratios within [{}, {}]", 0.9 * r, 1.1 * r);
        out.ratio_window.finish();
    } else {
        out.ratio_window = not_applicable("limit_distance_ratio", "no expected ratio configured");
    }

    out.triangle = make_verdict("triangle_inequality", 1.0e-12);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                if (a == b || b == c || a == c) continue;
                out.triangle.observe(out.distance(a, c) + out.distance(c, b) - out.distance(a, b));
            }
        }
    }
    out.triangle.finish();
    return out;
}

void write_distance_csv(std::ostream &os, const CauchyResult &result)
{
    os << "k,j,t_sup,d_initial,d_sup,bound,verdict\n";
    for (const auto &e : result.entries) {
        fmt::print(os, "{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", e.k, e.j, e.t_sup, e.d_initial, e.d_sup, e.bound,
                   to_string(e.verdict));
    }
}

// ---------------------------------------------------------------------------

namespace {

struct Bump {
    double value;
    double derivative; // d/ds
};

Bump bump(double s)
{
    if (std::abs(s) >= 1.0) return {0.0, 0.0};
    const double w = 1.0 - s * s;
    const double b = std::exp(1.0 - 1.0 / w);
    return {b, -2.0 * s / (w * w) * b};
}

} // namespace

WeakResidual weak_residual(const Trajectory &traj, const TestFunctionSpec &phi)
{
    if (traj.snapshots.size() < 2) {
        throw configuration_error("weak_residual needs a trajectory with at least two stored snapshots");
    }
    const Grid &g = traj.snapshots.front().field.grid;
    const double t0 = traj.snapshots.front().field.t;
    const double t1 = traj.snapshots.back().field.t;
    if (!(phi.x_halfwidth > 0.0) || !(phi.t_halfwidth > 0.0)) {
        throw configuration_error("test function half-widths must be positive");
    }
    if (!(phi.x_center - phi.x_halfwidth > g.x_min() && phi.x_center + phi.x_halfwidth < g.x_max()
          && phi.t_center - phi.t_halfwidth > t0 && phi.t_center + phi.t_halfwidth < t1)) {
        throw domain_too_small(fmt::format("test function support [{}, {}] x [{}, {}] is not strictly inside "
                                           "[{}, {}] x [{}, {}]",
                                           phi.x_center - phi.x_halfwidth, phi.x_center + phi.x_halfwidth,
                                           phi.t_center - phi.t_halfwidth, phi.t_center + phi.t_halfwidth,
                                           g.x_min(), g.x_max(), t0, t1));
    }

    constexpr cplx I{0.0, 1.0};
    const double m = traj.params.mass;
    const double dx = g.dx();
    const std::size_t S = traj.snapshots.size();

    // Spatial factor and its derivative are shared by every snapshot.
    std::vector<Bump> bx(g.n_cells());
    for (std::size_t j = 0; j < g.n_cells(); ++j) {
        const Bump b = bump((g.center(j) - phi.x_center) / phi.x_halfwidth);
        bx[j] = {b.value, b.derivative / phi.x_halfwidth};
    }

    cplx r1 = 0.0, r2 = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        const SpinorField &f = traj.snapshots[s].field;
        double w = 0.0;
        if (s > 0) w += 0.5 * (f.t - traj.snapshots[s - 1].field.t);
        if (s + 1 < S) w += 0.5 * (traj.snapshots[s + 1].field.t - f.t);
        Bump bt = bump((f.t - phi.t_center) / phi.t_halfwidth);
        bt.derivative /= phi.t_halfwidth;
        if (bt.value == 0.0) continue;

        cplx a1 = 0.0, a2 = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (bx[j].value == 0.0) continue;
            const double ph = bt.value * bx[j].value;
            const double ph_t = bt.derivative * bx[j].value;
            const double ph_x = bt.value * bx[j].derivative;
            const auto [n1, n2] = eval_N(traj.params, f.u[j], f.v[j]);
            a1 += f.u[j] * (ph_t + ph_x) + (I * m * f.v[j] - I * n1) * ph;
            a2 += f.v[j] * (ph_t - ph_x) + (I * m * f.u[j] - I * n2) * ph;
        }
        r1 += w * dx * a1;
        r2 += w * dx * a2;
    }
    return {r1, r2, std::abs(r1) + std::abs(r2)};
}

} // namespace diraclab

#include "diraclab/runner.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "diraclab/errors.hpp"
#include "diraclab/evolve.hpp"
#include "diraclab/functionals.hpp"
#include "diraclab/oracles.hpp"
#include "diraclab/stability.hpp"

#ifndef DIRACLAB_VERSION
#define DIRACLAB_VERSION "0.0.0"
#endif

namespace diraclab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view version() { return DIRACLAB_VERSION; }

namespace {

constexpr std::uint64_t default_cone_seed = 7;
// Refinement orders are judged against the second-order design value.
constexpr double order_lo = 1.9;
constexpr double order_hi = 2.1;

std::ofstream open_out(const fs::path &p)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error(fmt::format("cannot write {}", p.string()));
    return os;
}

void write_functionals_csv(const fs::path &p, std::span<const FunctionalRecord> records)
{
    auto os = open_out(p);
    os << "t,L0,Q0,D0,int_D0,bony_budget,bony_residual,gammaR,gammaL,q_bound,linf_sq,linf_envelope,h1_semi\n";
    for (const auto &r : records) {
        fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                   r.t, r.L0, r.Q0, r.D0, r.int_D0, r.bony_budget, r.bony_residual, r.gammaR, r.gammaL, r.q_bound,
                   r.linf_sq, r.linf_envelope, r.h1_semi);
    }
}

json verdict_json(const Verdict &v)
{
    json j;
    j["name"] = v.name;
    j["status"] = std::string(to_string(v.status));
    j["worst_margin"] = std::isfinite(v.worst_margin) ? json(v.worst_margin) : json(nullptr);
    j["tolerance"] = v.tolerance;
    j["checked"] = v.checked;
    j["informational"] = v.informational;
    j["note"] = v.note;
    return j;
}

json constants_json(const ModelConstants &k)
{
    return json{{"c", k.c},
                {"delta", k.delta},
                {"c_star", k.c_star},
                {"K", k.K},
                {"c_sampled", k.c_sampled},
                {"c_star_sampled", k.c_star_sampled},
                {"delta_capped", k.delta_capped},
                {"seed", k.seed},
                {"samples", k.samples}};
}

SpinorField add_scaled(SpinorField base, const SpinorField &pert, double eps)
{
    for (std::size_t j = 0; j < base.size(); ++j) {
        base.u[j] += eps * pert.u[j];
        base.v[j] += eps * pert.v[j];
    }
    return base;
}

struct Context {
    const RunConfig &cfg;
    fs::path out;
    ModelConstants constants;
    std::vector<Verdict> verdicts;
    json extra = json::object();
};

std::uint64_t effective_seed(const RunConfig &cfg, std::uint64_t fallback) { return cfg.seed ? cfg.seed : fallback; }

ModelConstants constants_for(const RunConfig &cfg)
{
    ConstantsOptions opts = cfg.constants;
    opts.seed = effective_seed(cfg, opts.seed);
    return derive_constants(cfg.model, opts);
}

void do_validate(Context &ctx)
{
    const auto &cfg = ctx.cfg;
    const auto rep = sample_a2(cfg.model, cfg.constants.a2_samples, effective_seed(cfg, cfg.constants.seed));
    Verdict v = make_verdict("a2_identity", cfg.constants.a2_tolerance);
    v.observe(-rep.max_rel);
    v.note = fmt::format("max relative residual {:.3e} over {} samples", rep.max_rel, cfg.constants.a2_samples);
    ctx.verdicts.push_back(v.finish());
    ctx.extra["a2"] = json{{"max_abs", rep.max_abs}, {"max_rel", rep.max_rel}, {"samples", cfg.constants.a2_samples}};
}

void do_run(Context &ctx)
{
    const auto &cfg = ctx.cfg;
    const Grid grid = cfg.grid();
    const SpinorField init = build_initial(grid, cfg.profiles, cfg.scheme.t_final);
    const Trajectory traj = run_trajectory(init, cfg.model, cfg.scheme, ctx.constants, {true});
    const double delta = ctx.constants.delta;

    write_functionals_csv(ctx.out / "functionals.csv", traj.records);

    Verdict charge = charge_check(traj.records);
    if (cfg.scheme.nonlinear_integrator == NonlinearIntegrator::rk4) {
        charge.informational = true;
        charge.note += charge.note.empty() ? "" : "; ";
        charge.note += "rk4 nonlinear substep is not charge-exact";
    }
    ctx.verdicts.push_back(charge);

    auto budget = bony_budget_check(traj.records, cfg.model.mass, delta);
    ctx.verdicts.push_back(budget.cumulative);
    ctx.verdicts.push_back(budget.differential);
    ctx.verdicts.push_back(line_integral_check(traj.records, delta));
    ctx.verdicts.push_back(linf_envelope_check(traj.records, delta));

    // Random backward cones ending at stored snapshot times.
    const double L0 = traj.records.front().L0;
    auto cones = open_out(ctx.out / "cones.csv");
    cones << "x0,t0,gammaR,gammaL,q_bound\n";
    Verdict cone_v = L0 > delta ? not_applicable("cone_line_integrals", fmt::format("L0(0) = {:.6g} > delta = {:.6g}", L0, delta))
                                : make_verdict("cone_line_integrals", 1.0e-6 * L0 * L0);
    std::mt19937_64 rng(effective_seed(cfg, default_cone_seed));
    std::vector<std::size_t> usable;
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        if (grid.x_max() - grid.x_min() > 2.0 * traj.snapshots[i].field.t + 2.0 * grid.dx()) usable.push_back(i);
    }
    for (std::size_t n = 0; n < cfg.output.cones && !usable.empty(); ++n) {
        const std::size_t pick = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
        const double t0 = traj.snapshots[pick].field.t;
        const double lo = grid.x_min() + t0 + grid.dx();
        const double hi = grid.x_max() - t0 - grid.dx();
        const double x0 = std::uniform_real_distribution<double>(lo, hi)(rng);
        const auto s = line_integrals(traj, x0, t0);
        fmt::print(cones, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.x0, s.t0, s.gammaR, s.gammaL, s.q_bound);
        if (cone_v.status != Status::not_applicable) {
            cone_v.observe(s.q_bound - s.gammaR);
            cone_v.observe(s.q_bound - s.gammaL);
        }
    }
    ctx.verdicts.push_back(cone_v.finish());

    if (cfg.output.snapshots) {
        const fs::path dir = ctx.out / "snapshots";
        fs::create_directories(dir);
        for (const auto &s : traj.snapshots) {
            auto os = open_out(dir / fmt::format("step_{:08d}.csv", s.step));
            write_snapshot_csv(os, s.field);
        }
    }
}

void do_pair(Context &ctx)
{
    const auto &cfg = ctx.cfg;
    const Grid grid = cfg.grid();
    PairExperiment exp;
    exp.base_init = build_initial(grid, cfg.profiles, cfg.scheme.t_final);
    exp.perturbed_init = add_scaled(exp.base_init, build_initial(grid, cfg.pair.perturbation, cfg.scheme.t_final), cfg.pair.epsilon);
    exp.params = cfg.model;
    exp.scheme = cfg.scheme;
    exp.constants = ctx.constants;
    const auto res = pair_run(exp);

    auto os = open_out(ctx.out / "pair.csv");
    write_pair_csv(os, res.records);
    write_functionals_csv(ctx.out / "functionals.csv", res.base_records);
    write_functionals_csv(ctx.out / "functionals_perturbed.csv", res.perturbed_records);

    ctx.verdicts.push_back(res.checks.l2_envelope);
    ctx.verdicts.push_back(res.checks.lyapunov_interval);
    ctx.verdicts.push_back(res.checks.lyapunov_interval_k);
    ctx.verdicts.push_back(res.checks.h3_closed);
    ctx.verdicts.push_back(res.checks.h3_closed_published);
    ctx.extra["pair"] = json{{"L0_base", res.L0_base}, {"L0_perturbed", res.L0_perturbed}, {"epsilon", cfg.pair.epsilon}};
}

void do_cauchy(Context &ctx)
{
    const auto &cfg = ctx.cfg;
    const Grid grid = cfg.grid();
    const SpinorField base = build_initial(grid, cfg.profiles, cfg.scheme.t_final);
    const SpinorField pert = build_initial(grid, cfg.cauchy.perturbation, cfg.scheme.t_final);

    CauchyExperiment exp;
    double eps = cfg.cauchy.epsilon0;
    for (std::size_t k = 0; k < cfg.cauchy.members; ++k, eps *= cfg.cauchy.ratio) {
        exp.members.push_back(add_scaled(base, pert, eps));
    }
    exp.limit = base;
    exp.params = cfg.model;
    exp.scheme = cfg.scheme;
    exp.constants = ctx.constants;
    exp.streaming = cfg.cauchy.streaming;
    exp.expected_ratio = 1.0 / cfg.cauchy.ratio;
    const auto res = cauchy_experiment(exp);

    auto os = open_out(ctx.out / "distances.csv");
    write_distance_csv(os, res);
    ctx.verdicts.push_back(res.pair_bounds);
    ctx.verdicts.push_back(res.monotone);
    ctx.verdicts.push_back(res.ratio_window);
    ctx.verdicts.push_back(res.triangle);
    ctx.extra["cauchy"] = json{{"limit_distances", res.limit_distances}, {"ratios", res.ratios}};

    if (!cfg.cauchy.weak_enabled) return;
    // Weak-form residual of the limit solution on the configured mesh and one refinement.
    std::vector<double> norms;
    for (std::size_t factor : {1u, 2u}) {
        const Grid g(grid.x_min(), grid.x_max(), grid.n_cells() * factor);
        SchemeConfig sc = cfg.scheme;
        // Every step is kept: coarse snapshot spacing would dominate the time quadrature.
        sc.diagnostics_stride = 1;
        const auto traj = run_trajectory(build_initial(g, cfg.profiles, cfg.scheme.t_final), cfg.model, sc, ctx.constants, {true});
        norms.push_back(weak_residual(traj, cfg.cauchy.weak).norm);
    }
    const double order = std::log2(norms[0] / norms[1]);
    Verdict w = make_verdict("weak_residual_order", 0.0);
    w.observe(order - order_lo);
    w.note = fmt::format("residual {:.3e} -> {:.3e}, order {:.3f}", norms[0], norms[1], order);
    ctx.verdicts.push_back(w.finish());
    ctx.extra["weak_residual"] = json{{"n_cells", {grid.n_cells(), 2 * grid.n_cells()}}, {"norm", norms}, {"order", order}};
}

void do_oracle(Context &ctx)
{
    const auto &cfg = ctx.cfg;
    RefinementProblem p;
    p.params = cfg.model;
    p.profiles = cfg.profiles;
    p.x_min = cfg.x_min;
    p.x_max = cfg.x_max;
    p.base_cells = cfg.n_cells;
    p.scheme = cfg.scheme;
    const auto res = refinement_study(p, cfg.oracle.levels);

    auto os = open_out(ctx.out / "refinement.csv");
    write_refinement_csv(os, res);

    Verdict v = make_verdict(res.against_oracle ? "refinement_order_exact" : "refinement_order_richardson", 0.0);
    for (const auto &r : res.rows) {
        if (r.level == 0) continue;
        v.observe(std::min(r.observed_order - order_lo, order_hi - r.observed_order));
    }
    v.note = fmt::format("orders must lie in [{}, {}]", order_lo, order_hi);
    ctx.verdicts.push_back(v.finish());
}

json config_echo(const RunConfig &cfg)
{
    json resolved = json::object();
    for (const auto &[k, v] : cfg.resolved) resolved[k] = v;
    return json{{"source", cfg.source}, {"resolved", resolved}};
}

json versions_json()
{
    return json{{"diraclab", std::string(version())},
                {"fmt", FMT_VERSION},
                {"boost", BOOST_LIB_VERSION},
                {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                              NLOHMANN_JSON_VERSION_PATCH)},
                {"compiler", fmt::format("gcc {}.{}.{}", __GNUC__, __GNUC_MINOR__, __GNUC_PATCHLEVEL__)}};
}

} // namespace

DispatchResult dispatch(const RunConfig &cfg, const fs::path &out_dir)
{
    fs::create_directories(out_dir);
    Context ctx{cfg, out_dir, {}, {}};
    DispatchResult result;
    bool have_constants = false;

    try {
        ctx.constants = constants_for(cfg);
        have_constants = true;
        switch (cfg.experiment) {
            case Experiment::validate:
                do_validate(ctx);
                break;
            case Experiment::run:
                do_run(ctx);
                break;
            case Experiment::pair:
                do_pair(ctx);
                break;
            case Experiment::cauchy:
                do_cauchy(ctx);
                break;
            case Experiment::oracle:
                do_oracle(ctx);
                break;
        }
        result.exit_code = all_pass(ctx.verdicts) ? exit_ok : exit_verdict_failed;
    } catch (const numerical_abort &e) {
        result.exit_code = exit_numerical_abort;
        result.error = e.what();
    } catch (const error &e) {
        result.exit_code = exit_configuration;
        result.error = e.what();
    }

    json summary;
    summary["experiment"] = std::string(to_string(cfg.experiment));
    summary["exit_code"] = result.exit_code;
    if (!result.error.empty()) summary["error"] = result.error;
    json verdicts = json::array();
    std::size_t passes = 0, failures = 0, na = 0;
    json tolerances = json::object();
    for (const auto &v : ctx.verdicts) {
        verdicts.push_back(verdict_json(v));
        tolerances[v.name] = v.tolerance;
        if (v.status == Status::pass) ++passes;
        if (v.status == Status::fail) ++failures;
        if (v.status == Status::not_applicable) ++na;
    }
    summary["verdicts"] = verdicts;
    summary["verdict_summary"] = json{{"experiment", std::string(to_string(cfg.experiment))},
                                      {"passes", passes},
                                      {"failures", failures},
                                      {"not_applicable", na},
                                      {"tolerances", tolerances}};
    summary["constants"] = have_constants ? constants_json(ctx.constants) : json(nullptr);
    if (!ctx.extra.empty()) summary["details"] = ctx.extra;
    summary["config_echo"] = config_echo(cfg);
    summary["versions"] = versions_json();

    result.summary = summary.dump(2) + "\n";
    auto os = open_out(out_dir / "summary.json");
    os << result.summary;
    result.verdicts = std::move(ctx.verdicts);
    return result;
}

} // namespace diraclab

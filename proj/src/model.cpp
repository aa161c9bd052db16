#include "diraclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "diraclab/errors.hpp"

namespace diraclab {

std::string_view to_string(Preset p)
{
    switch (p) {
        case Preset::thirring:
            return "thirring";
        case Preset::gross_neveu:
            return "gross_neveu";
        case Preset::custom:
            return "custom";
    }
    return "custom";
}

Preset parse_preset(std::string_view name)
{
    if (name == "thirring") return Preset::thirring;
    if (name == "gross_neveu") return Preset::gross_neveu;
    if (name == "custom") return Preset::custom;
    throw configuration_error(fmt::format("unknown model preset '{}'", name));
}

ModelParams preset(Preset name, double coupling, double mass)
{
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw configuration_error(fmt::format("model mass must be finite and >= 0, got {}", mass));
    }
    if (!std::isfinite(coupling)) {
        throw configuration_error("model coupling must be finite");
    }
    ModelParams p;
    p.preset = name;
    p.coupling = coupling;
    p.mass = mass;
    switch (name) {
        case Preset::thirring:
            // N1 = a u |v|^2, N2 = a v |u|^2
            p.n1[0][0] = coupling;
            p.n2[0][0] = coupling;
            break;
        case Preset::gross_neveu:
            // N1 = 2a v (conj(u) v + u conj(v)) = 2a u |v|^2 + 2a conj(u) v^2
            p.n1[0][0] = 2.0 * coupling;
            p.n1[1][1] = 2.0 * coupling;
            p.n2[0][0] = 2.0 * coupling;
            p.n2[1][1] = 2.0 * coupling;
            break;
        case Preset::custom:
            throw configuration_error("'custom' is not a preset; use custom_model()");
    }
    return p;
}

ModelParams preset(std::string_view name, double coupling, double mass)
{
    return preset(parse_preset(name), coupling, mass);
}

ModelParams custom_model(const std::array<cplx, 5> &alpha, const std::array<cplx, 5> &beta, double mass)
{
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw configuration_error(fmt::format("model mass must be finite and >= 0, got {}", mass));
    }
    ModelParams p;
    p.preset = Preset::custom;
    p.mass = mass;
    p.alpha = alpha;
    p.beta = beta;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
            p.n1[a][b] = alpha[a] * alpha[2 + b];
            p.n2[a][b] = beta[a] * beta[2 + b];
        }
    }
    return p;
}

namespace {

cplx eval_table(const MonomialTable &t, cplx a, cplx b)
{
    const cplx ac = std::conj(a);
    const double b2 = std::norm(b);
    const cplx bb = b * b;
    const cplx bcbc = std::conj(bb);
    return (t[0][0] * a + t[1][0] * ac) * b2 + (t[0][1] * a + t[1][1] * ac) * bb
           + (t[0][2] * a + t[1][2] * ac) * bcbc;
}

} // namespace

std::pair<cplx, cplx> eval_N(const ModelParams &params, cplx u, cplx v)
{
    switch (params.preset) {
        case Preset::thirring: {
            const double a = params.coupling;
            return {a * u * std::norm(v), a * v * std::norm(u)};
        }
        case Preset::gross_neveu: {
            const double a = params.coupling;
            const double rho = 2.0 * (std::conj(u) * v).real();
            return {2.0 * a * v * rho, 2.0 * a * u * rho};
        }
        case Preset::custom:
            break;
    }
    return {eval_table(params.n1, u, v), eval_table(params.n2, v, u)};
}

A2Terms a2_residual_terms(const ModelParams &params, cplx u, cplx v)
{
    constexpr cplx I{0.0, 1.0};
    const auto [n1, n2] = eval_N(params, u, v);
    return {(I * std::conj(u) * n1).real(), (I * std::conj(v) * n2).real()};
}

double a2_residual(const ModelParams &params, cplx u, cplx v)
{
    constexpr cplx I{0.0, 1.0};
    const auto [n1, n2] = eval_N(params, u, v);
    return (I * std::conj(u) * n1 + I * std::conj(v) * n2).real();
}

double coefficient_scale(const ModelParams &params)
{
    double s = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 3; ++b) {
            s += std::abs(params.n1[a][b]) + std::abs(params.n2[a][b]);
        }
    }
    return s;
}

namespace {

struct BoxSampler {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> dist;

    BoxSampler(std::uint64_t seed, double box) : rng(seed), dist(-box, box) {}

    cplx operator()() { return {dist(rng), dist(rng)}; }
};

} // namespace

A2Report sample_a2(const ModelParams &params, std::size_t samples, std::uint64_t seed, double box)
{
    A2Report rep;
    rep.seed = seed;
    rep.samples = samples;
    rep.box = box;
    const double scale = std::max(coefficient_scale(params), 1.0);
    BoxSampler draw(seed, box);
    for (std::size_t i = 0; i < samples; ++i) {
        const cplx u = draw();
        const cplx v = draw();
        const double mag = scale * std::norm(u) * std::norm(v);
        if (mag == 0.0) continue;
        const double r = a2_residual(params, u, v);
        const auto terms = a2_residual_terms(params, u, v);
        rep.max_abs = std::max(rep.max_abs, std::abs(r));
        rep.max_rel = std::max(rep.max_rel, std::abs(r) / mag);
        rep.max_rel_first = std::max(rep.max_rel_first, std::abs(terms.first) / mag);
        rep.max_rel_second = std::max(rep.max_rel_second, std::abs(terms.second) / mag);
    }
    return rep;
}

double cubic_ratio(const ModelParams &params, cplx u, cplx v)
{
    const double den = std::norm(u) * std::norm(v);
    if (den == 0.0) return 0.0;
    const auto [n1, n2] = eval_N(params, u, v);
    return (std::abs(std::conj(n1) * u) + std::abs(std::conj(n2) * v)) / den;
}

double difference_ratio(const ModelParams &params, cplx u, cplx v, cplx up, cplx vp)
{
    const cplx U = u - up;
    const cplx V = v - vp;
    const double r2 = std::norm(U) * (std::norm(v) + std::norm(vp)) + (std::norm(u) + std::norm(up)) * std::norm(V);
    if (r2 == 0.0) return 0.0;
    const auto [n1, n2] = eval_N(params, u, v);
    const auto [n1p, n2p] = eval_N(params, up, vp);
    return (std::abs((n1 - n1p) * std::conj(U)) + std::abs((n2 - n2p) * std::conj(V))) / r2;
}

ModelConstants derive_constants(const ModelParams &params, const ConstantsOptions &options)
{
    const A2Report a2 = sample_a2(params, options.a2_samples, options.seed, options.box);
    if (a2.max_rel > options.a2_tolerance) {
        throw model_rejected(fmt::format("nonlinearity violates the charge identity: sampled relative residual "
                                         "{:.3e} exceeds {:.1e} (seed {})",
                                         a2.max_rel, options.a2_tolerance, options.seed));
    }

    const double degenerate = 1.0e12 * (1.0 + coefficient_scale(params));
    auto check = [&](double r, const char *what) {
        if (!std::isfinite(r) || r > degenerate) {
            throw numerical_degeneracy(fmt::format("sampled {} ratio is unbounded ({})", what, r));
        }
    };

    ModelConstants k;
    k.seed = options.seed;
    k.samples = options.samples;

    BoxSampler draw(options.seed + 1, options.box);
    for (std::size_t i = 0; i < options.samples; ++i) {
        const double r = cubic_ratio(params, draw(), draw());
        check(r, "cubic");
        k.c_sampled = std::max(k.c_sampled, r);
    }

    // Four families: fully random pairs, a zero partner (the cubic ratio in disguise),
    // equal first components, equal second components.
    BoxSampler pair_draw(options.seed + 2, options.box);
    const std::size_t per_family = std::max<std::size_t>(options.samples / 4, 1);
    for (std::size_t i = 0; i < per_family; ++i) {
        const cplx u = pair_draw(), v = pair_draw(), up = pair_draw(), vp = pair_draw();
        const double r = std::max({difference_ratio(params, u, v, up, vp), difference_ratio(params, u, v, 0.0, 0.0),
                                   difference_ratio(params, u, v, u, vp), difference_ratio(params, u, v, up, v)});
        check(r, "difference");
        k.c_star_sampled = std::max(k.c_star_sampled, 4.0 * r);
    }

    k.c = k.c_sampled;
    const double a = std::abs(params.coupling);
    if (params.preset == Preset::thirring) k.c = std::max(k.c, 2.0 * a);
    if (params.preset == Preset::gross_neveu) k.c = std::max(k.c, 8.0 * a);

    // A zero partner gives ratio c/2, hence c_star >= 2c.
    k.c_star = std::max(k.c_star_sampled, 2.0 * k.c);
    if (k.c_star > 0.0) {
        k.delta = std::min(1.0 / (4.0 * k.c_star), options.delta_cap);
    } else {
        k.delta = options.delta_cap;
        k.delta_capped = true;
    }
    k.K = 2.0 * k.c_star + 1.0;
    return k;
}

} // namespace diraclab

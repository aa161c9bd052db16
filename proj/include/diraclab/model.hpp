#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace diraclab {

using cplx = std::complex<double>;

enum class Preset { thirring, gross_neveu, custom };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);

// Cubic nonlinearities
//
//   N1(u,v) = sum_{a in {u, conj u}} sum_{b in {|v|^2, v^2, conj(v)^2}} n1[a][b] * a * b
//   N2(u,v) = sum_{a in {v, conj v}} sum_{b in {|u|^2, u^2, conj(u)^2}} n2[a][b] * a * b
//
// The product family (a1 u + a2 conj u)(a3 |v|^2 + a4 v^2 + a5 conj(v)^2) is the
// rank-one case of this table. Gross-Neveu is rank two, hence the table.
using MonomialTable = std::array<std::array<cplx, 3>, 2>;

struct ModelParams {
    Preset preset = Preset::custom;
    /// Real coupling for the presets (unused for custom models).
    double coupling = 0.0;
    double mass = 0.0;
    /// Product-form coefficients as given by the user (custom models only).
    std::array<cplx, 5> alpha{};
    std::array<cplx, 5> beta{};
    MonomialTable n1{};
    MonomialTable n2{};
};

ModelParams preset(Preset name, double coupling, double mass);
ModelParams preset(std::string_view name, double coupling, double mass);

/// Custom model from product-form coefficients alpha[0..4], beta[0..4].
ModelParams custom_model(const std::array<cplx, 5> &alpha, const std::array<cplx, 5> &beta, double mass);

std::pair<cplx, cplx> eval_N(const ModelParams &params, cplx u, cplx v);

/// Re(i conj(u) N1 + i conj(v) N2). Zero for every input iff the model conserves charge.
double a2_residual(const ModelParams &params, cplx u, cplx v);

struct A2Terms {
    double first;  ///< Re(i conj(u) N1)
    double second; ///< Re(i conj(v) N2)
};
A2Terms a2_residual_terms(const ModelParams &params, cplx u, cplx v);

/// Sum of the moduli of all monomial coefficients; the scale of |conj(u) N1| / (|u|^2 |v|^2).
double coefficient_scale(const ModelParams &params);

struct A2Report {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    double box = 0.0;
    double max_abs = 0.0;
    /// max |residual| / (coefficient_scale * |u|^2 |v|^2)
    double max_rel = 0.0;
    double max_rel_first = 0.0;
    double max_rel_second = 0.0;
};

A2Report sample_a2(const ModelParams &params, std::size_t samples, std::uint64_t seed, double box = 10.0);

struct ConstantsOptions {
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 20240607;
    double box = 10.0;
    double delta_cap = 1.0e6;
    double a2_tolerance = 1.0e-12;
    std::size_t a2_samples = 10'000;
};

struct ModelConstants {
    double c = 0.0;
    double delta = 0.0;
    double c_star = 0.0;
    double K = 0.0;

    /// Raw sampled maxima, before folding in the closed forms.
    double c_sampled = 0.0;
    double c_star_sampled = 0.0;
    /// True when c == 0: delta is the cap and small-data gating is vacuous.
    bool delta_capped = false;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
};

/// Estimates the cubic-bound constant c, the difference constant c_star,
/// the small-data threshold delta = 1/(4 c_star) and the Lyapunov weight K = 2 c_star + 1.
///
/// Throws model_rejected when the sampled null-structure residual exceeds
/// options.a2_tolerance, numerical_degeneracy when a sampled ratio blows up.
ModelConstants derive_constants(const ModelParams &params, const ConstantsOptions &options = {});

/// Ratio (|conj(N1) u| + |conj(N2) v|) / (|u|^2 |v|^2) at one point.
double cubic_ratio(const ModelParams &params, cplx u, cplx v);

/// Ratio (|dN1 conj(U)| + |dN2 conj(V)|) / r2 for the pair (u,v), (u',v').
double difference_ratio(const ModelParams &params, cplx u, cplx v, cplx up, cplx vp);

} // namespace diraclab

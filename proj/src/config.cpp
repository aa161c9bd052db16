#include "diraclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace diraclab {

namespace pt = boost::property_tree;

std::string_view to_string(Experiment e)
{
    switch (e) {
        case Experiment::validate:
            return "validate";
        case Experiment::run:
            return "run";
        case Experiment::pair:
            return "pair";
        case Experiment::cauchy:
            return "cauchy";
        case Experiment::oracle:
            return "oracle";
    }
    return "run";
}

Experiment parse_experiment(std::string_view s)
{
    if (s == "validate") return Experiment::validate;
    if (s == "run") return Experiment::run;
    if (s == "pair") return Experiment::pair;
    if (s == "cauchy") return Experiment::cauchy;
    if (s == "oracle") return Experiment::oracle;
    throw configuration_error(fmt::format("unknown experiment '{}'", s));
}

namespace {

std::string join_issues(const std::vector<ConfigIssue> &issues)
{
    std::string s = "invalid configuration:";
    for (const auto &i : issues) {
        s += fmt::format("\n  {} (line {}): {}", i.key.empty() ? "<file>" : i.key, i.line, i.reason);
    }
    return s;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// "section.key" -> 1-based line number, from a light scan of the text.
std::map<std::string, int> index_lines(std::string_view text)
{
    std::map<std::string, int> out;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            out.emplace(section, line_no);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(std::string_view(t).substr(0, eq));
        out.emplace(section.empty() ? key : section + "." + key, line_no);
    }
    return out;
}

std::optional<double> to_double(const std::string &s)
{
    double v = 0.0;
    const char *b = s.data();
    const char *e = s.data() + s.size();
    if (!s.empty() && *b == '+') ++b;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_uint(const std::string &s)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(const std::string &s)
{
    if (s == "true") return true;
    if (s == "false") return false;
    return std::nullopt;
}

std::optional<cplx> to_complex(const std::string &s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        if (auto re = to_double(trim(s))) return cplx(*re, 0.0);
        return std::nullopt;
    }
    const auto re = to_double(trim(std::string_view(s).substr(0, comma)));
    const auto im = to_double(trim(std::string_view(s).substr(comma + 1)));
    if (!re || !im) return std::nullopt;
    return cplx(*re, *im);
}

std::string strip_quotes(std::string s)
{
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

class Context {
public:
    Context(const std::map<std::string, int> &lines, RunConfig &cfg) : lines_(lines), cfg_(cfg) {}

    int line_of(const std::string &key) const
    {
        const auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }

    void issue(const std::string &key, std::string reason) { issues.push_back({key, line_of(key), std::move(reason)}); }

    void resolved(const std::string &key, std::string value) { cfg_.resolved.emplace_back(key, std::move(value)); }

    std::vector<ConfigIssue> issues;

private:
    const std::map<std::string, int> &lines_;
    RunConfig &cfg_;
};

/// Typed access to one section; unknown keys are reported by finish().
class Section {
public:
    Section(Context &ctx, std::string name, const pt::ptree *node) : ctx_(ctx), name_(std::move(name)), node_(node) {}

    bool present() const { return node_ != nullptr; }
    const std::string &name() const { return name_; }

    std::optional<std::string> raw(const std::string &key)
    {
        used_.insert(key);
        if (!node_) return std::nullopt;
        const auto it = node_->find(key);
        if (it == node_->not_found()) return std::nullopt;
        return strip_quotes(trim(it->second.data()));
    }

    std::string full(const std::string &key) const { return name_.empty() ? key : name_ + "." + key; }

    template <typename T, typename Conv>
    std::optional<T> typed(const std::string &key, Conv conv, const char *type)
    {
        const auto r = raw(key);
        if (!r) return std::nullopt;
        auto v = conv(*r);
        if (!v) {
            ctx_.issue(full(key), fmt::format("type mismatch: expected {}, got '{}'", type, *r));
            return std::nullopt;
        }
        return v;
    }

    double number(const std::string &key, double def, bool required = false)
    {
        auto v = typed<double>(key, to_double, "a finite real number");
        if (!v && required && !raw(key)) ctx_.issue(full(key), "missing required key");
        const double out = v.value_or(def);
        ctx_.resolved(full(key), fmt::format("{:.17g}", out));
        return out;
    }

    std::uint64_t integer(const std::string &key, std::uint64_t def)
    {
        const auto out = typed<std::uint64_t>(key, to_uint, "a non-negative integer").value_or(def);
        ctx_.resolved(full(key), fmt::format("{}", out));
        return out;
    }

    bool boolean(const std::string &key, bool def)
    {
        const auto out = typed<bool>(key, to_bool, "true or false").value_or(def);
        ctx_.resolved(full(key), out ? "true" : "false");
        return out;
    }

    std::string text(const std::string &key, std::string def, bool required = false)
    {
        auto v = raw(key);
        if (!v && required) ctx_.issue(full(key), "missing required key");
        std::string out = v.value_or(std::move(def));
        ctx_.resolved(full(key), out);
        return out;
    }

    std::optional<cplx> complex(const std::string &key)
    {
        auto v = typed<cplx>(key, to_complex, "'re, im' pair of reals");
        if (v) ctx_.resolved(full(key), fmt::format("{:.17g}, {:.17g}", v->real(), v->imag()));
        return v;
    }

    void range(const std::string &key, bool ok, const std::string &what)
    {
        if (!ok) ctx_.issue(full(key), fmt::format("range violation: {}", what));
    }

    void finish(const std::map<std::string, std::string> &special = {})
    {
        if (!node_) return;
        for (const auto &[k, child] : *node_) {
            if (used_.count(k)) continue;
            const auto s = special.find(k);
            ctx_.issue(full(k), s != special.end() ? s->second : "unknown key");
        }
    }

private:
    Context &ctx_;
    std::string name_;
    const pt::ptree *node_;
    std::set<std::string> used_;
};

ProfileSpec read_profile(Section &s)
{
    ProfileSpec p;
    const std::string kind = s.text("kind", "gaussian");
    if (kind == "gaussian") {
        p.kind = ProfileKind::gaussian;
    } else if (kind == "smooth_bump") {
        p.kind = ProfileKind::smooth_bump;
    } else if (kind == "zero") {
        p.kind = ProfileKind::zero;
    } else {
        s.range("kind", false, fmt::format("'{}' is not one of gaussian, smooth_bump, zero", kind));
    }
    const std::string comp = s.text("component", "", true);
    if (comp == "u") {
        p.component = Component::u;
    } else if (comp == "v") {
        p.component = Component::v;
    } else if (!comp.empty()) {
        s.range("component", false, fmt::format("'{}' is not u or v", comp));
    }
    p.center = s.number("center", 0.0);
    p.width = s.number("width", 1.0);
    p.amplitude = s.number("amplitude", 1.0);
    p.phase = s.number("phase", 0.0);
    s.range("width", p.width > 0.0, "width must be > 0");
    s.finish();
    return p;
}

} // namespace

config_errors::config_errors(std::vector<ConfigIssue> issues)
    : configuration_error(join_issues(issues)), issues_(std::move(issues))
{
}

RunConfig parse_config(std::string_view text, std::string_view experiment)
{
    RunConfig cfg;
    cfg.source = std::string(text);

    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw config_errors({{"", static_cast<int>(e.line()), e.message()}});
    }

    const auto lines = index_lines(text);
    Context ctx(lines, cfg);

    auto child = [&](const std::string &name) -> const pt::ptree * {
        const auto it = tree.find(name);
        return it == tree.not_found() ? nullptr : &it->second;
    };

    // Top-level keys and sections.
    std::set<std::string> known_sections = {"model", "model.custom", "scheme", "experiment", "pair",
                                            "cauchy", "weak", "oracle", "output", "run"};
    std::vector<std::pair<std::string, const pt::ptree *>> profile_sections, perturbation_sections;
    for (const auto &[name, node] : tree) {
        if (node.empty() && !node.data().empty()) {
            ctx.issue(name, "keys must live inside a section (e.g. [run] seed = 7)");
            continue;
        }
        if (name.rfind("profile.", 0) == 0) {
            profile_sections.emplace_back(name, &node);
        } else if (name.rfind("perturbation.", 0) == 0) {
            perturbation_sections.emplace_back(name, &node);
        } else if (!known_sections.count(name)) {
            ctx.issue(name, "unknown section");
        }
    }

    // Experiment choice.
    Section exp_sec(ctx, "experiment", child("experiment"));
    const auto file_kind = exp_sec.raw("kind");
    exp_sec.finish();
    try {
        if (!experiment.empty()) {
            cfg.experiment = parse_experiment(experiment);
            if (file_kind && *file_kind != experiment) {
                ctx.issue("experiment.kind", fmt::format("file requests '{}' but the subcommand is '{}'", *file_kind,
                                                         experiment));
            }
        } else if (file_kind) {
            cfg.experiment = parse_experiment(*file_kind);
            cfg.experiment_from_file = true;
        } else {
            ctx.issue("experiment.kind", "missing block: no subcommand given and no [experiment] kind");
        }
    } catch (const configuration_error &e) {
        ctx.issue("experiment.kind", e.what());
    }
    ctx.resolved("experiment.kind", std::string(to_string(cfg.experiment)));

    // [run]
    Section run(ctx, "run", child("run"));
    cfg.seed = run.integer("seed", 0);
    run.finish();

    // [model]
    Section model(ctx, "model", child("model"));
    if (!model.present()) ctx.issue("model", "missing block [model]");
    const std::string preset_name = model.text("preset", "", model.present());
    const double coupling = model.number("alpha", 0.0);
    const double mass = model.number("mass", 0.0, model.present());
    model.range("mass", mass >= 0.0, "mass must be >= 0");
    cfg.constants.samples = model.integer("samples", cfg.constants.samples);
    model.range("samples", cfg.constants.samples >= 1000, "samples must be >= 1000");
    model.finish();

    Section custom(ctx, "model.custom", child("model.custom"));
    std::array<cplx, 5> alpha{}, beta{};
    for (int i = 0; i < 5; ++i) {
        alpha[i] = custom.complex(fmt::format("alpha{}", i + 1)).value_or(0.0);
        beta[i] = custom.complex(fmt::format("beta{}", i + 1)).value_or(0.0);
    }
    custom.finish();

    if (model.present() && !preset_name.empty()) {
        try {
            const Preset p = parse_preset(preset_name);
            if (p == Preset::custom) {
                if (!custom.present()) ctx.issue("model.custom", "missing block [model.custom] for preset = custom");
                cfg.model = custom_model(alpha, beta, std::max(mass, 0.0));
            } else {
                if (custom.present()) ctx.issue("model.custom", "only allowed with preset = custom");
                cfg.model = preset(p, coupling, std::max(mass, 0.0));
            }
        } catch (const configuration_error &e) {
            ctx.issue("model.preset", e.what());
        }
    }

    // [scheme]
    const bool needs_scheme = cfg.experiment != Experiment::validate;
    Section scheme(ctx, "scheme", child("scheme"));
    cfg.scheme_present = scheme.present();
    if (needs_scheme && !scheme.present()) ctx.issue("scheme", "missing block [scheme]");
    cfg.n_cells = scheme.integer("n_cells", cfg.n_cells);
    cfg.x_min = scheme.number("x_min", cfg.x_min);
    cfg.x_max = scheme.number("x_max", cfg.x_max);
    cfg.scheme.t_final = scheme.number("t_final", 1.0, needs_scheme);
    const std::string order = scheme.text("substep_order", "strang");
    const std::string integrator = scheme.text(
        "nonlinear_integrator", cfg.model.preset == Preset::custom ? "rk4" : "exact_preset");
    cfg.scheme.diagnostics_stride = scheme.integer("diagnostics_stride", 10);
    scheme.range("n_cells", cfg.n_cells >= 8, "n_cells must be >= 8");
    scheme.range("x_max", cfg.x_min < cfg.x_max, "x_min must be < x_max");
    scheme.range("t_final", cfg.scheme.t_final >= 0.0, "t_final must be >= 0");
    scheme.range("diagnostics_stride", cfg.scheme.diagnostics_stride >= 1, "diagnostics_stride must be >= 1");
    try {
        cfg.scheme.substep_order = parse_substep_order(order);
    } catch (const configuration_error &e) {
        ctx.issue("scheme.substep_order", e.what());
    }
    try {
        cfg.scheme.nonlinear_integrator = parse_nonlinear_integrator(integrator);
        if (cfg.scheme.nonlinear_integrator == NonlinearIntegrator::exact_preset
            && cfg.model.preset == Preset::custom && model.present()) {
            ctx.issue("scheme.nonlinear_integrator", "exact_preset requires a thirring or gross_neveu model");
        }
    } catch (const configuration_error &e) {
        ctx.issue("scheme.nonlinear_integrator", e.what());
    }
    if (needs_scheme && cfg.n_cells >= 8 && cfg.x_min < cfg.x_max && cfg.scheme.t_final >= 0.0) {
        try {
            step_count(cfg.grid(), cfg.scheme.t_final);
        } catch (const configuration_error &e) {
            ctx.issue("scheme.t_final", e.what());
        }
    }
    scheme.finish({{"dt", "dt is derived (dt = dx) and must not be set"}});

    // [profile.*]
    for (const auto &[name, node] : profile_sections) {
        Section s(ctx, name, node);
        cfg.profiles.push_back(read_profile(s));
    }
    for (const auto &[name, node] : perturbation_sections) {
        Section s(ctx, name, node);
        cfg.pair.perturbation.push_back(read_profile(s));
    }
    cfg.cauchy.perturbation = cfg.pair.perturbation;

    // [pair]
    Section pair(ctx, "pair", child("pair"));
    if (cfg.experiment == Experiment::pair) {
        if (!pair.present()) ctx.issue("pair", "missing block [pair]");
        if (perturbation_sections.empty()) ctx.issue("perturbation", "missing block [perturbation.<name>]");
    }
    cfg.pair.epsilon = pair.number("epsilon", cfg.pair.epsilon);
    pair.range("epsilon", cfg.pair.epsilon >= 0.0, "epsilon must be >= 0");
    pair.finish();

    // [cauchy]
    Section cauchy(ctx, "cauchy", child("cauchy"));
    if (cfg.experiment == Experiment::cauchy) {
        if (!cauchy.present()) ctx.issue("cauchy", "missing block [cauchy]");
        if (perturbation_sections.empty()) ctx.issue("perturbation", "missing block [perturbation.<name>]");
    }
    cfg.cauchy.members = cauchy.integer("members", cfg.cauchy.members);
    cfg.cauchy.epsilon0 = cauchy.number("epsilon0", cfg.cauchy.epsilon0);
    cfg.cauchy.ratio = cauchy.number("ratio", cfg.cauchy.ratio);
    cfg.cauchy.streaming = cauchy.boolean("streaming", cfg.cauchy.streaming);
    cauchy.range("members", cfg.cauchy.members >= 2, "members must be >= 2");
    cauchy.range("epsilon0", cfg.cauchy.epsilon0 > 0.0, "epsilon0 must be > 0");
    cauchy.range("ratio", cfg.cauchy.ratio > 0.0 && cfg.cauchy.ratio < 1.0, "ratio must lie in (0, 1)");
    cauchy.finish();

    // [weak]
    Section weak(ctx, "weak", child("weak"));
    cfg.cauchy.weak_enabled = weak.present();
    cfg.cauchy.weak.x_center = weak.number("x_center", 0.0);
    cfg.cauchy.weak.x_halfwidth = weak.number("x_halfwidth", 4.0);
    cfg.cauchy.weak.t_center = weak.number("t_center", cfg.scheme.t_final / 2.0);
    cfg.cauchy.weak.t_halfwidth = weak.number("t_halfwidth", cfg.scheme.t_final / 4.0);
    weak.range("x_halfwidth", cfg.cauchy.weak.x_halfwidth > 0.0, "x_halfwidth must be > 0");
    weak.range("t_halfwidth", cfg.cauchy.weak.t_halfwidth > 0.0, "t_halfwidth must be > 0");
    weak.finish();

    // [oracle]
    Section oracle(ctx, "oracle", child("oracle"));
    cfg.oracle.levels = oracle.integer("levels", cfg.oracle.levels);
    oracle.range("levels", cfg.oracle.levels >= 3, "levels must be >= 3");
    oracle.finish();

    // [output]
    Section output(ctx, "output", child("output"));
    cfg.output.directory = output.text("directory", cfg.output.directory);
    cfg.output.snapshots = output.boolean("snapshots", cfg.output.snapshots);
    cfg.output.cones = output.integer("cones", cfg.output.cones);
    output.finish();

    if (!ctx.issues.empty()) {
        std::stable_sort(ctx.issues.begin(), ctx.issues.end(),
                         [](const ConfigIssue &a, const ConfigIssue &b) { return a.line < b.line; });
        throw config_errors(std::move(ctx.issues));
    }
    return cfg;
}

} // namespace diraclab

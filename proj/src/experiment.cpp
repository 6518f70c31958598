#include "thermowave/experiment.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermowave/errors.hpp"
#include "thermowave/homog.hpp"
#include "thermowave/io.hpp"
#include "thermowave/spectrum.hpp"

namespace thermowave {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<ExperimentKind, const char*>, 6> kKindNames{{
    {ExperimentKind::spectrum, "spectrum"},
    {ExperimentKind::table1, "table1"},
    {ExperimentKind::decay, "decay"},
    {ExperimentKind::smoothness, "smoothness"},
    {ExperimentKind::homogenize, "homogenize"},
    {ExperimentKind::eps_converge, "eps-converge"},
}};

const std::set<std::string> kKnownKeys{
    "kind",     "output_dir", "system",      "gamma",       "n",        "n_list", "tol",    "paper_literal_blocks",
    "export_matrix", "dt",    "T",           "j",           "j_list",   "window", "initial_state", "name",
    "coefficients", "cell_grid", "epsilons", "lambda",      "cells",    "forcing", "evolve",
};

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

Eigen::VectorXd vector_of(const json& j, const char* key) {
    const auto v = get_as<std::vector<double>>(j, key);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ScalarProfile parse_profile(const json& d) {
    if (!d.is_object()) throw ConfigError("coefficient descriptor must be an object");
    const auto kind = get_as<std::string>(d, "kind");
    if (kind == "constant") return ScalarProfile::constant(get_as<double>(d, "value"));
    if (kind == "affine-sine") return ScalarProfile::affine_sine(get_as<double>(d, "p"), get_as<double>(d, "q"));
    if (kind == "affine-cos") return ScalarProfile::affine_cos(get_as<double>(d, "p"), get_as<double>(d, "q"));
    if (kind == "table") {
        auto values = get_as<std::vector<double>>(d, "values");
        if (values.empty()) throw ConfigError("table descriptor needs at least one value");
        return ScalarProfile::table(std::move(values));
    }
    throw ConfigError("unknown coefficient kind '" + kind + "' (see --list-catalog)");
}

double alpha_for(const json& d, std::initializer_list<const ScalarProfile*> parts) {
    if (d.contains("alpha")) return get_as<double>(d, "alpha");
    double alpha = 1.0;
    for (const auto* p : parts) {
        try {
            alpha = std::min(alpha, consistent_alpha(*p));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return alpha;
}

CoefficientField coefficient_from_json(const std::string& name, const json& d, FieldRole role) {
    if (d.is_object() && d.value("kind", "") == "diagonal") {
        if (role == FieldRole::coupling) throw ConfigError("coupling coefficient must be scalar");
        const ScalarProfile a11 = parse_profile(get_as<json>(d, "a11"));
        const ScalarProfile a22 = parse_profile(get_as<json>(d, "a22"));
        auto axis = [&](const char* key) {
            const auto s = d.value(key, std::string("y1"));
            if (s == "y1") return Axis::y1;
            if (s == "y2") return Axis::y2;
            throw ConfigError(std::string("axis '") + key + "' must be y1 or y2");
        };
        return CoefficientField::diagonal(name, a11, a22, alpha_for(d, {&a11, &a22}), axis("axis11"), axis("axis22"));
    }
    const ScalarProfile p = parse_profile(d);
    if (role == FieldRole::coupling) return CoefficientField::coupling(name, p);
    return CoefficientField::scalar(name, p, alpha_for(d, {&p}));
}

ForcingSpec parse_forcing(const json& d, ForcingSpec fallback) {
    ForcingSpec f = fallback;
    if (d.contains("amplitude")) f.amplitude = get_as<double>(d, "amplitude");
    if (d.contains("wavenumber")) f.wavenumber = get_as<int>(d, "wavenumber");
    if (d.contains("offset")) f.offset = get_as<double>(d, "offset");
    return f;
}

std::string tag(double gamma) { return format_double(gamma); }

class OutputSink {
public:
    explicit OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& file, const std::string& content) {
        write_text(dir_ / file, content);
        manifest.files.push_back({file, sha256_hex(content), content.size()});
    }

    Manifest manifest;

private:
    std::filesystem::path dir_;
};

json fit_json(const DecayFit& fit) {
    return json{{"law", to_string(fit.law)},
                {"rate", fit.rate},
                {"exponent", fit.exponent},
                {"slope_exponential", -fit.rate},
                {"slope_polynomial", fit.exponent},
                {"r2_exponential", fit.r2_exponential},
                {"r2_polynomial", fit.r2_polynomial},
                {"goodness", fit.goodness},
                {"prefactor", fit.prefactor},
                {"window", {fit.t_begin, fit.t_end}},
                {"samples", fit.samples}};
}

std::string trace_csv(const EnergyTrace& trace) {
    CsvTable t({"t", "E"});
    for (std::size_t k = 0; k < trace.times.size(); ++k) t.add_row({trace.times[k], trace.energies[k]});
    return t.str();
}

json effective_json(const EffectiveTensor& t) {
    if (t.rank == TensorRank::scalar) return t.diag[0];
    return json::array({t.diag[0], t.diag[1]});
}

// Stage wrapper: keeps the exception category, prefixes the stage name.
template <class F>
void stage(const std::string& name, F&& body) {
    try {
        body();
    } catch (const ConfigError& e) {
        throw ConfigError("stage '" + name + "': " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError("stage '" + name + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("stage '" + name + "': " + e.what());
    }
}

void run_spectrum(const ExperimentConfig& c, OutputSink& out) {
    DiscreteDynamic dyn;
    stage("assemble", [&] { dyn = assemble_dynamic({system_from_int(c.system), c.gamma, c.n, c.convention()}); });
    SpectrumReport rep;
    stage("spectrum", [&] { rep = compute_spectrum(dyn, c.tol); });
    CsvTable t({"re", "im", "residual"});
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
        t.add_row({rep.eigenvalues[k].real(), rep.eigenvalues[k].imag(), rep.residuals[k]});
    const std::string suffix = std::to_string(c.system) + "_" + std::to_string(c.n) + "_" + tag(c.gamma);
    out.write("spectrum_" + suffix + ".csv", t.str());
    if (c.export_matrix) out.write(dyn.label() + ".csv", matrix_csv(dyn.matrix));
}

void run_table1(const ExperimentConfig& c, OutputSink& out) {
    std::vector<MinDistanceRow> rows;
    stage("table1", [&] {
        rows = min_distance_table(system_from_int(c.system), c.gamma, c.n_list, c.convention(), c.tol);
    });
    CsvTable t({"n", "min_neg_re", "abscissa", "asymptote"});
    for (const auto& r : rows) t.add_row({static_cast<double>(r.n), r.min_neg_re, r.abscissa, r.asymptote});
    out.write("table1_" + std::to_string(c.system) + "_" + tag(c.gamma) + ".csv", t.str());
}

void run_decay(const ExperimentConfig& c, OutputSink& out) {
    DiscreteDynamic dyn;
    stage("assemble", [&] { dyn = assemble_dynamic({system_from_int(c.system), c.gamma, c.n, c.convention()}); });
    StateVector z0;
    std::string descriptor;
    stage("initial data", [&] {
        if (c.initial_state) {
            z0 = *c.initial_state;
            descriptor = "custom";
        } else {
            z0 = StateVector::velocity_mode(c.n, c.j);
            descriptor = "j" + std::to_string(c.j);
        }
    });
    Evolution run;
    stage("evolve", [&] { run = evolve(dyn, z0, c.dt, c.T, descriptor); });
    DecayFit fit;
    stage("classify", [&] {
        fit = c.window ? classify_decay(run.trace, (*c.window)[0], (*c.window)[1]) : classify_decay(run.trace);
    });
    const std::string base = "energy_" + std::to_string(c.system) + "_" + std::to_string(c.n) + "_" + tag(c.gamma) +
                             "_" + descriptor;
    out.write(base + ".csv", trace_csv(run.trace));
    out.write(base + "_fit.json", fit_json(fit).dump(2) + "\n");
}

void run_smoothness(const ExperimentConfig& c, OutputSink& out) {
    std::vector<SmoothnessRow> rows;
    stage("smoothness", [&] {
        rows = smoothness_experiment(system_from_int(c.system), c.n, c.gamma, c.j_list, c.dt, c.T, c.convention());
    });
    const std::string suffix = std::to_string(c.system) + "_" + std::to_string(c.n) + "_" + tag(c.gamma);
    CsvTable table({"j", "rate", "exponent", "r2_exponential", "r2_polynomial", "final_energy"});
    json fits = json::array();
    for (const auto& r : rows) {
        out.write("energy_" + suffix + "_j" + std::to_string(r.j) + ".csv", trace_csv(r.trace));
        table.add_row({static_cast<double>(r.j), r.fit.rate, r.fit.exponent, r.fit.r2_exponential,
                       r.fit.r2_polynomial, r.trace.energies.back()});
        json f = fit_json(r.fit);
        f["j"] = r.j;
        fits.push_back(f);
    }
    out.write("smoothness_" + suffix + ".csv", table.str());
    out.write("smoothness_" + suffix + "_fits.json", fits.dump(2) + "\n");
}

void run_homogenize(const ExperimentConfig& c, OutputSink& out) {
    HomogenizedModel hm;
    stage("homogenize", [&] { hm = homogenize(c.coeffs, c.cell_grid); });
    const std::string corr_file = "homogenized_" + c.name + "_correctors.csv";
    CsvTable corr({"y", "M", "N"});
    for (std::size_t i = 0; i < hm.corrector_a.y.size(); ++i)
        corr.add_row({hm.corrector_a.y[i], hm.corrector_a.values[i], hm.corrector_b.values[i]});
    const json j{{"name", c.name},
                 {"mean_c", hm.mean_c},
                 {"mean_d", hm.mean_d},
                 {"mean_gamma", hm.mean_gamma},
                 {"a_hom", effective_json(hm.a_hom)},
                 {"b_hom", effective_json(hm.b_hom)},
                 {"cell_grid_size", hm.cell_grid_size},
                 {"corrector_csv", corr_file}};
    out.write("homogenized_" + c.name + ".json", j.dump(2) + "\n");
    out.write(corr_file, corr.str());
}

void run_eps_converge(const ExperimentConfig& c, OutputSink& out) {
    ConvergenceReport rep;
    const ResolventForcing forcing{c.f.function(), c.g.function(), c.h.function()};
    stage("resolvent convergence",
          [&] { rep = resolvent_convergence(c.coeffs, c.epsilons, c.lambda, forcing, c.cells); });
    CsvTable t({"epsilon", "err_u", "err_theta", "flux_gap", "ratio_apriori"});
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        t.add_row({rep.epsilons[i], rep.err_u[i], rep.err_theta[i], rep.flux_gap[i], rep.ratio_apriori[i]});
    out.write("eps_convergence_" + c.name + ".csv", t.str());
    json summary{{"cells", rep.cells},         {"a_hom", rep.a_hom},         {"b_hom", rep.b_hom},
                 {"order_u", rep.order_u},     {"order_theta", rep.order_theta}, {"order_flux", rep.order_flux},
                 {"lambda", c.lambda}};

    if (c.evolve_dt_T) {
        const double dt = (*c.evolve_dt_T)[0];
        const double T = (*c.evolve_dt_T)[1];
        const int cells = rep.cells;
        CsvTable ev({"epsilon", "err_u_T", "err_theta_T", "energy_T"});
        stage("evolution convergence", [&] {
            const HomogenizedModel hm = homogenize(c.coeffs);
            GridSolution init = GridSolution::zero(cells);
            init.u = sample_nodes(cells, [](double x) { return std::sin(std::numbers::pi * x); });
            const auto hom = evolve_eps(homogenized_problem(hm, cells), init, dt, T);
            for (double eps : c.epsilons) {
                EpsProblem p{eps, c.coeffs, cells};
                const auto r = evolve_eps(p, init, dt, T);
                ev.add_row({eps, l2_norm(cells, r.final_state.u - hom.final_state.u),
                            l2_norm(cells, r.final_state.theta - hom.final_state.theta), r.energies.back()});
            }
        });
        out.write("eps_evolution_" + c.name + ".csv", ev.str());
        summary["evolve"] = {{"dt", dt}, {"T", T}};
    }
    out.write("eps_convergence_" + c.name + ".json", summary.dump(2) + "\n");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (name == n) return k;
    return std::nullopt;
}

ScalarFunction ForcingSpec::function() const {
    const double a = amplitude;
    const double k = wavenumber;
    const double o = offset;
    return [a, k, o](double x) { return a * std::sin(k * std::numbers::pi * x) + o; };
}

EpsCoefficients default_coefficients() {
    EpsCoefficients c;
    c.a = CoefficientField::scalar("a", ScalarProfile::constant(1.0), 1.0);
    c.b = CoefficientField::scalar("b", ScalarProfile::constant(1.0), 1.0);
    c.c = CoefficientField::scalar("c", ScalarProfile::constant(1.0), 1.0);
    c.d = CoefficientField::scalar("d", ScalarProfile::constant(1.0), 1.0);
    c.gamma = CoefficientField::coupling("gamma", ScalarProfile::constant(0.5));
    return c;
}

CoefficientField parse_coefficient(const std::string& name, std::string_view json_text, FieldRole role) {
    try {
        return coefficient_from_json(name, json::parse(json_text), role);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("coefficient descriptor: ") + e.what());
    }
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> cli_kind) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig c;
    c.coeffs = default_coefficients();
    if (j.contains("kind")) {
        const auto k = parse_kind(get_as<std::string>(j, "kind"));
        if (!k) throw ConfigError("unknown experiment kind '" + j["kind"].get<std::string>() + "'");
        if (cli_kind && *cli_kind != *k)
            throw ConfigError("config kind '" + to_string(*k) + "' disagrees with command line '" +
                              to_string(*cli_kind) + "'");
        c.kind = *k;
    } else if (cli_kind) {
        c.kind = *cli_kind;
    } else {
        throw ConfigError("experiment kind missing");
    }

    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
    if (j.contains("system")) c.system = get_as<int>(j, "system");
    if (j.contains("gamma")) c.gamma = get_as<double>(j, "gamma");
    if (j.contains("n")) c.n = get_as<int>(j, "n");
    if (j.contains("n_list")) c.n_list = get_as<std::vector<int>>(j, "n_list");
    if (j.contains("tol")) c.tol = get_as<double>(j, "tol");
    if (j.contains("paper_literal_blocks")) c.paper_literal_blocks = get_as<bool>(j, "paper_literal_blocks");
    if (j.contains("export_matrix")) c.export_matrix = get_as<bool>(j, "export_matrix");
    if (j.contains("dt")) c.dt = get_as<double>(j, "dt");
    if (j.contains("T")) c.T = get_as<double>(j, "T");
    if (j.contains("j")) c.j = get_as<int>(j, "j");
    if (j.contains("j_list")) c.j_list = get_as<std::vector<int>>(j, "j_list");
    if (j.contains("window")) {
        const auto w = get_as<std::vector<double>>(j, "window");
        if (w.size() != 2) throw ConfigError("window must have two entries");
        c.window = std::array<double, 2>{w[0], w[1]};
    }
    if (j.contains("initial_state")) {
        const auto& s = j["initial_state"];
        StateVector z{vector_of(s, "u"), vector_of(s, "v"), vector_of(s, "theta")};
        if (z.u.size() != c.n || z.v.size() != c.n || z.theta.size() != c.n)
            throw ConfigError("initial_state blocks must each have n entries");
        c.initial_state = std::move(z);
    }
    if (j.contains("name")) c.name = get_as<std::string>(j, "name");
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("name must be a non-empty file-name fragment");
    if (j.contains("coefficients")) {
        const auto& co = j["coefficients"];
        if (!co.is_object()) throw ConfigError("coefficients must be an object");
        for (const auto& [key, desc] : co.items()) {
            if (key == "a") c.coeffs.a = coefficient_from_json("a", desc, FieldRole::elliptic);
            else if (key == "b") c.coeffs.b = coefficient_from_json("b", desc, FieldRole::elliptic);
            else if (key == "c") c.coeffs.c = coefficient_from_json("c", desc, FieldRole::elliptic);
            else if (key == "d") c.coeffs.d = coefficient_from_json("d", desc, FieldRole::elliptic);
            else if (key == "gamma") c.coeffs.gamma = coefficient_from_json("gamma", desc, FieldRole::coupling);
            else throw ConfigError("unknown coefficient '" + key + "'");
        }
    }
    if (j.contains("cell_grid")) c.cell_grid = get_as<std::size_t>(j, "cell_grid");
    if (j.contains("epsilons")) c.epsilons = get_as<std::vector<double>>(j, "epsilons");
    if (j.contains("lambda")) c.lambda = get_as<double>(j, "lambda");
    if (j.contains("cells")) c.cells = get_as<int>(j, "cells");
    if (j.contains("forcing")) {
        const auto& fo = j["forcing"];
        if (fo.contains("f")) c.f = parse_forcing(fo["f"], c.f);
        if (fo.contains("g")) c.g = parse_forcing(fo["g"], c.g);
        if (fo.contains("h")) c.h = parse_forcing(fo["h"], c.h);
    }
    if (j.contains("evolve")) {
        const auto& ev = j["evolve"];
        c.evolve_dt_T = std::array<double, 2>{get_as<double>(ev, "dt"), get_as<double>(ev, "T")};
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentKind> cli_kind) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, cli_kind);
}

Manifest run(const ExperimentConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());

    OutputSink out(config.output_dir);
    out.manifest.kind = config.kind;
    switch (config.kind) {
        case ExperimentKind::spectrum: run_spectrum(config, out); break;
        case ExperimentKind::table1: run_table1(config, out); break;
        case ExperimentKind::decay: run_decay(config, out); break;
        case ExperimentKind::smoothness: run_smoothness(config, out); break;
        case ExperimentKind::homogenize: run_homogenize(config, out); break;
        case ExperimentKind::eps_converge: run_eps_converge(config, out); break;
    }

    json files = json::array();
    for (const auto& e : out.manifest.files) files.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    const json manifest{{"kind", to_string(config.kind)}, {"files", files}};
    write_text(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return out.manifest;
}

std::string catalog_text() {
    std::ostringstream os;
    os << "coefficient catalog (JSON descriptors):\n"
       << "  {\"kind\": \"constant\", \"value\": v}\n"
       << "  {\"kind\": \"affine-sine\", \"p\": p, \"q\": q}      p + q sin(2 pi y)\n"
       << "  {\"kind\": \"affine-cos\", \"p\": p, \"q\": q}       p + q cos(2 pi y)\n"
       << "  {\"kind\": \"table\", \"values\": [v0, v1, ...]}    piecewise constant on a uniform partition\n"
       << "  {\"kind\": \"diagonal\", \"a11\": {...}, \"a22\": {...}, \"axis11\": \"y1\", \"axis22\": \"y1\"}\n"
       << "optional \"alpha\" on elliptic descriptors; default is the tightest consistent value\n"
       << "experiment kinds: spectrum table1 decay smoothness homogenize eps-converge\n";
    return os.str();
}

}  // namespace thermowave

// Acceptance checks. Usage: thermowave_acceptance [criterion ...]; no argument runs all nine.
// One [PASS]/[FAIL] line per check, [INFO] lines carry diagnostics that do not gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thermowave/dynamics.hpp"
#include "thermowave/eps_solver.hpp"
#include "thermowave/experiment.hpp"
#include "thermowave/homog.hpp"
#include "thermowave/io.hpp"
#include "thermowave/spectrum.hpp"

using namespace thermowave;

namespace {

int g_failures = 0;

void verdict(int c, bool ok, const std::string& what) {
    std::printf("[%s] C%d %s\n", ok ? "PASS" : "FAIL", c, what.c_str());
    if (!ok) ++g_failures;
}

void info(int c, const std::string& what) { std::printf("[INFO] C%d %s\n", c, what.c_str()); }

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= x.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    return sxy / sxx;
}

void criterion1() {
    double worst = 0.0;
    bool ok = true;
    for (double g : {0.1, 0.5, 0.9})
        for (int n : {8, 16, 32, 64}) {
            const auto rep = compute_spectrum(assemble_dynamic({SystemId::weak, g, n}));
            const auto m = match_multisets(rep.eigenvalues, per_mode_oracle(n, g));
            worst = std::max(worst, m.max_distance);
            ok = ok && m.max_distance <= 1e-10;
        }
    verdict(1, ok, "system 2 eigenvalues vs per-mode cubic, 12 cases, max |dlambda| = " + fmt("%.3e", worst) +
                       " (tol 1e-10)");
}

void criterion2() {
    const std::vector<int> ns{8, 16, 24, 32};
    const auto rows = min_distance_table(SystemId::strong, 0.042287, ns);
    bool positive = true, increasing = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        positive = positive && rows[k].min_neg_re > 0.0;
        if (k) increasing = increasing && rows[k].min_neg_re > rows[k - 1].min_neg_re;
        info(2, "gamma=0.042287 n=" + std::to_string(rows[k].n) + " min(-Re) = " + fmt("%.6e", rows[k].min_neg_re));
    }
    const double change = std::abs(rows[3].min_neg_re - rows[1].min_neg_re) / rows[1].min_neg_re;
    verdict(2, positive, "system 1 min(-Re lambda) positive for n in {8,16,24,32}");
    verdict(2, increasing, "system 1 min(-Re lambda) increasing in n");
    verdict(2, change < 0.01, "relative change n=16 -> 32 = " + fmt("%.3e", change) + " (< 1%)");

    const double reference[] = {8.9227e-4, 8.9383e-4, 8.9402e-4, 8.9407e-4};
    double dev = 0.0;
    for (std::size_t k = 0; k < 4; ++k) dev = std::max(dev, std::abs(rows[k].min_neg_re / reference[k] - 1.0));
    info(2, "max deviation from reference min-distance values at gamma=0.042287: " + fmt("%.1f%%", 100 * dev) + " (not gating)");
    const auto ref = min_distance_table(SystemId::strong, 0.1, ns);
    double dev1 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) dev1 = std::max(dev1, std::abs(ref[k].min_neg_re / reference[k] - 1.0));
    info(2, "max deviation from reference min-distance values at gamma=0.1: " + fmt("%.2e", dev1));
}

void criterion3() {
    const double g = 0.5;
    const std::vector<int> ns{8, 16, 32, 64};
    const auto rows = min_distance_table(SystemId::weak, g, ns);
    bool within = true;
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        const double pred = g * g / (2.0 * (r.n * r.n + 1.0));
        const double rel = std::abs(r.min_neg_re / pred - 1.0);
        within = within && rel <= 0.10;
        info(3, "n=" + std::to_string(r.n) + " min(-Re) = " + fmt("%.6e", r.min_neg_re) + " predicted " +
                    fmt("%.6e", pred) + " rel " + fmt("%.2e", rel));
        lx.push_back(std::log(r.n));
        ly.push_back(std::log(r.min_neg_re));
    }
    const double s = slope(lx, ly);
    verdict(3, within, "system 2 min(-Re lambda) within 10% of gamma^2/(2(n^2+1))");
    verdict(3, std::abs(s + 2.0) <= 0.1, "log-log slope in n = " + fmt("%.4f", s) + " (-2 +- 0.1)");
}

void criterion4() {
    const int n = 32;
    const double g = 0.5;
    for (auto sys : {SystemId::strong, SystemId::weak}) {
        const auto dyn = assemble_dynamic({sys, g, n});
        const auto run = evolve(dyn, StateVector::velocity_mode(n, 1), 0.1, 100.0, "j1");
        const auto fit = classify_decay(run.trace, 10.0, 100.0);
        const std::string desc = "law=" + to_string(fit.law) + " rate=" + fmt("%.4f", fit.rate) +
                                 " exponent=" + fmt("%.3f", fit.exponent) + " R2_exp=" +
                                 fmt("%.5f", fit.r2_exponential) + " R2_poly=" + fmt("%.5f", fit.r2_polynomial);
        if (sys == SystemId::strong) {
            verdict(4, fit.law == DecayLaw::exponential && fit.r2_exponential >= 0.99,
                    "system 1, v_1 = 1: exponential with R2 >= 0.99; " + desc);
        } else {
            const bool ok = fit.law == DecayLaw::polynomial && fit.exponent >= -1.15 && fit.exponent <= -0.85 &&
                            fit.r2_polynomial >= 0.98;
            verdict(4, ok, "system 2, v_1 = 1: polynomial, exponent in [-1.15,-0.85], R2 >= 0.98; " + desc);
        }
    }
    // Broadband smooth data, v_j = j^{-5/4}: every mode is excited.
    const auto dyn = assemble_dynamic({SystemId::weak, g, n});
    StateVector z0 = StateVector::zero(n);
    for (int j = 1; j <= n; ++j) z0.v(j - 1) = std::pow(j, -1.25);
    const auto fit = classify_decay(evolve(dyn, z0, 0.1, 100.0).trace, 10.0, 100.0);
    info(4, "system 2, v_j = j^-1.25: law=" + to_string(fit.law) + " exponent=" + fmt("%.3f", fit.exponent) +
                " R2_poly=" + fmt("%.4f", fit.r2_polynomial));
}

void criterion5() {
    const int n = 100;
    const double g = 0.5;
    const auto weak = smoothness_experiment(SystemId::weak, n, g, {1, 2, 3}, 0.1, 100.0);
    const bool dec = weak[0].fit.rate > weak[1].fit.rate && weak[1].fit.rate > weak[2].fit.rate;
    verdict(5, dec, "system 2 rates strictly decrease j=1,2,3: " + fmt("%.4f", weak[0].fit.rate) + " > " +
                        fmt("%.4f", weak[1].fit.rate) + " > " + fmt("%.4f", weak[2].fit.rate));

    auto spread_of = [](const std::vector<SmoothnessRow>& rows) {
        double lo = 1e300, hi = -1e300;
        for (const auto& r : rows) lo = std::min(lo, r.fit.rate), hi = std::max(hi, r.fit.rate);
        return std::make_pair(hi / lo, rows);
    };
    const auto strong = smoothness_experiment(SystemId::strong, n, g, {1, 2, 3}, 0.1, 100.0);
    const auto [spread, rows] = spread_of(strong);
    std::string rates;
    for (const auto& r : rows) rates += " " + fmt("%.4f", r.fit.rate) + "(" + to_string(r.fit.law) + ")";
    verdict(5, spread <= 1.2 && spread > 0.0,
            "system 1 exponential rates j=1,2,3 within 20%: max/min = " + fmt("%.3f", spread) + ";" + rates);

    const auto longer = smoothness_experiment(SystemId::strong, 32, g, {1, 2, 3}, 0.1, 1000.0);
    const auto [spread_long, rows_long] = spread_of(longer);
    std::string rl;
    for (const auto& r : rows_long) rl += " " + fmt("%.5f", r.fit.rate);
    info(5, "system 1, n=32, T=1000, window [100,1000]: max/min = " + fmt("%.3f", spread_long) + ";" + rl);
}

void criterion6() {
    std::mt19937 rng(20240611);
    std::normal_distribution<double> N01;
    double worst = 0.0, worst_step = -1e300, worst_identity = 0.0;
    for (auto sys : {SystemId::strong, SystemId::weak})
        for (int n : {1, 4, 16, 64})
            for (double g : {0.1, 0.5, 0.9}) {
                const auto dyn = assemble_dynamic({sys, g, n});
                const Eigen::MatrixXd D2 = build_D(n).diagonal().array().square().matrix().asDiagonal();
                Eigen::VectorXd z(3 * n);
                for (int k = 0; k < 100; ++k) {
                    for (auto& x : z) x = N01(rng);
                    const Eigen::VectorXd th = z.tail(n);
                    worst = std::max(worst, std::abs(z.dot(dyn.matrix * z) + th.dot(D2 * th)) / z.squaredNorm());
                }
                z /= z.norm();
                const auto run = evolve(dyn, StateVector::from_stacked(z), 0.1, 10.0);
                const auto& E = run.trace.energies;
                for (std::size_t k = 1; k < E.size(); ++k) worst_step = std::max(worst_step, E[k] - E[k - 1]);
                for (std::size_t k = 0; k < run.trace.identity_defects.size(); ++k)
                    worst_identity =
                        std::max(worst_identity, std::abs(run.trace.identity_defects[k]) / (1.0 + E[k]));
            }
    verdict(6, worst <= 1e-12, "max |z^T A z + theta^T D^2 theta| / |z|^2 over 2400 states = " + fmt("%.3e", worst));
    verdict(6, worst_step <= 1e-12, "max per-step energy increase = " + fmt("%.3e", worst_step) + " (slack 1e-12)");
    verdict(6, worst_identity <= 1e-12, "max midpoint identity defect = " + fmt("%.3e", worst_identity));
}

void criterion7() {
    const std::size_t grid = std::size_t{1} << 14;
    auto field = [](ScalarProfile p) { return CoefficientField::scalar("a", p, consistent_alpha(p)); };
    const double cosv = cell_corrector_1d(field(ScalarProfile::affine_cos(2, 1)), grid).effective;
    verdict(7, std::abs(cosv - std::sqrt(3.0)) <= 1e-8,
            "a = 2 + cos(2 pi y): a_hom - sqrt(3) = " + fmt("%.3e", cosv - std::sqrt(3.0)));
    const double pw = cell_corrector_1d(field(ScalarProfile::table({1, 3})), grid).effective;
    verdict(7, std::abs(pw - 1.5) <= 1e-12, "piecewise {1,3}: a_hom - 1.5 = " + fmt("%.3e", pw - 1.5));
    const auto p = ScalarProfile::table({1, 3});
    const auto lam = laminate_homogenize(CoefficientField::diagonal("a", p, p, 1.0 / 3.0), grid);
    verdict(7, std::abs(lam.diag[0] - 1.5) <= 1e-12 && std::abs(lam.diag[1] - 2.0) <= 1e-12,
            "laminate diag(p,p), p = {1,3}: diag(" + fmt("%.15g", lam.diag[0]) + ", " + fmt("%.15g", lam.diag[1]) +
                ")");

    bool bracket = true;
    for (const auto& q : {ScalarProfile::affine_cos(2, 1), ScalarProfile::affine_sine(3, 2),
                          ScalarProfile::table({1, 3}), ScalarProfile::table({0.5, 4, 2, 1.25})}) {
        const double ahom = cell_corrector_1d(field(q), grid).effective;
        const double voigt = mean_value(q);
        const double reuss = 1.0 / integrate(q, 0.0, 1.0, reciprocal_fn, kMeanPanels);
        bracket = bracket && reuss <= ahom * (1 + 1e-12) && ahom < voigt && reuss < voigt;
        info(7, q.describe() + ": Reuss " + fmt("%.12g", reuss) + " a_hom " + fmt("%.12g", ahom) + " Voigt " +
                    fmt("%.12g", voigt));
    }
    verdict(7, bracket, "Reuss <= a_hom < Voigt for four non-constant coefficients");
    const double fem = cell_corrector_fem_1d(ScalarProfile::affine_cos(2, 1), 1024).effective;
    info(7, "P1 FEM cross-check on 1024 cells: a_hom - sqrt(3) = " + fmt("%.3e", fem - std::sqrt(3.0)));
}

void criterion8() {
    const double pi = std::numbers::pi;
    const auto a = ScalarProfile::affine_cos(2, 1);
    EpsCoefficients c;
    c.a = CoefficientField::scalar("a", a, 1.0 / 3.0);
    c.b = CoefficientField::scalar("b", a, 1.0 / 3.0);
    c.c = CoefficientField::scalar("c", ScalarProfile::constant(1), 1.0);
    c.d = CoefficientField::scalar("d", ScalarProfile::constant(1), 1.0);
    c.gamma = CoefficientField::coupling("gamma", ScalarProfile::constant(0.5));
    const ResolventForcing F{[pi](double x) { return std::sin(pi * x); }, [pi](double x) { return std::sin(pi * x); },
                             [pi](double x) { return std::sin(2 * pi * x); }};
    const std::vector<double> eps{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    const auto rep = resolvent_convergence(c, eps, 1.0, F);
    bool dec_u = true, dec_flux = true;
    double rmin = 1e300, rmax = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        info(8, "eps=" + fmt("%g", eps[i]) + " err_u " + fmt("%.4e", rep.err_u[i]) + " err_theta " +
                    fmt("%.4e", rep.err_theta[i]) + " flux_gap " + fmt("%.4e", rep.flux_gap[i]) + " ratio " +
                    fmt("%.4f", rep.ratio_apriori[i]));
        if (i) {
            dec_u = dec_u && rep.err_u[i] < rep.err_u[i - 1];
            dec_flux = dec_flux && rep.flux_gap[i] < rep.flux_gap[i - 1];
        }
        rmin = std::min(rmin, rep.ratio_apriori[i]);
        rmax = std::max(rmax, rep.ratio_apriori[i]);
    }
    info(8, "mesh cells = " + std::to_string(rep.cells) + ", m * eps_min = " + fmt("%g", rep.cells * eps.back()));
    verdict(8, dec_u && rep.order_u >= 0.9,
            "|u_eps - u_0|_L2 strictly decreasing, observed order " + fmt("%.3f", rep.order_u) + " (>= 0.9)");
    verdict(8, dec_flux, "weak-flux gap decreasing, observed order " + fmt("%.3f", rep.order_flux));
    verdict(8, rmax / rmin <= 2.0, "a-priori ratio |U_eps|/|F| spread max/min = " + fmt("%.4f", rmax / rmin));
}

void criterion9() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "thermowave_acceptance_c9";
    const std::vector<std::string> configs{
        R"({"kind": "spectrum", "system": 1, "gamma": 0.5, "n": 16, "export_matrix": true})",
        R"({"kind": "table1", "system": 1, "gamma": 0.042287})",
        R"({"kind": "decay", "system": 2, "n": 16, "gamma": 0.5, "T": 50})",
        R"({"kind": "smoothness", "system": 1, "n": 16, "T": 50})",
        R"({"kind": "homogenize", "name": "cos", "coefficients": {"a": {"kind": "affine-cos", "p": 2, "q": 1}}})",
        R"({"kind": "eps-converge", "name": "c9", "epsilons": [0.25, 0.125],
            "coefficients": {"a": {"kind": "affine-cos", "p": 2, "q": 1}}})",
    };
    bool ok = true;
    std::size_t files = 0;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        std::map<std::string, std::string> first;
        for (int rep = 0; rep < 2; ++rep) {
            auto cfg = parse_config(configs[k]);
            cfg.output_dir = root / (std::to_string(k) + "_" + std::to_string(rep));
            fs::remove_all(cfg.output_dir);
            const auto m = run(cfg);
            for (const auto& f : m.files) {
                const std::string bytes = read_text(cfg.output_dir / f.file);
                if (rep == 0) {
                    first[f.file] = bytes;
                    ++files;
                } else {
                    ok = ok && first.count(f.file) && first[f.file] == bytes;
                }
            }
            if (rep == 1) ok = ok && m.files.size() == first.size();
        }
    }
    fs::remove_all(root);
    verdict(9, ok, "two runs of six configs give byte-identical outputs (" + std::to_string(files) + " files)");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9};
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    for (int c : which) {
        if (c < 1 || c > 9) {
            std::fprintf(stderr, "unknown criterion %d\n", c);
            return 2;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            all[c - 1]();
        } catch (const std::exception& e) {
            verdict(c, false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        info(c, "runtime " + fmt("%.2f s", secs));
    }
    return g_failures == 0 ? 0 : 1;
}

#include "thermowave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

#include "thermowave/errors.hpp"
#include "thermowave/parallel.hpp"

namespace thermowave {

StateVector StateVector::zero(int n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

StateVector StateVector::velocity_mode(int n, int j) {
    if (j < 1 || j > n) throw std::invalid_argument("velocity_mode: need 1 <= j <= n");
    auto z = zero(n);
    z.v(j - 1) = 1.0;
    return z;
}

StateVector StateVector::from_stacked(const Eigen::VectorXd& z) {
    if (z.size() % 3 != 0) throw std::invalid_argument("stacked state length must be a multiple of 3");
    const auto n = z.size() / 3;
    return {z.segment(0, n), z.segment(n, n), z.segment(2 * n, n)};
}

Eigen::VectorXd StateVector::stacked() const {
    Eigen::VectorXd z(3 * u.size());
    z << u, v, theta;
    return z;
}

double discrete_energy(const StateVector& z) {
    return 0.5 * (z.u.squaredNorm() + z.v.squaredNorm() + z.theta.squaredNorm());
}

Evolution evolve(const DiscreteDynamic& dyn, const StateVector& z0, double dt, double T, const std::string& descriptor,
                 const EvolveOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("evolve: T must be >= dt");
    const int n = dyn.n;
    if (z0.u.size() != n || z0.v.size() != n || z0.theta.size() != n)
        throw std::invalid_argument("evolve: state dimension does not match the dynamic");
    if (!z0.stacked().allFinite()) throw std::invalid_argument("evolve: initial state has non-finite entries");

    const auto steps = static_cast<long>(std::llround(T / dt));
    const Eigen::Index N = 3 * n;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd explicit_half = I + 0.5 * dt * dyn.matrix;
    const Eigen::PartialPivLU<Eigen::MatrixXd> implicit_half(I - 0.5 * dt * dyn.matrix);
    if (!std::isfinite(implicit_half.rcond()) || implicit_half.rcond() < std::numeric_limits<double>::epsilon())
        throw NumericalError("evolve: I - dt/2 A is singular for " + dyn.label());

    const Eigen::VectorXd d2 = Eigen::VectorXd::LinSpaced(n, 1.0, n).array().square();

    Evolution out;
    auto& tr = out.trace;
    tr.initial_descriptor = descriptor;
    tr.dt = dt;
    tr.system = dyn.system;
    tr.n = n;
    tr.gamma = dyn.gamma;
    tr.times.reserve(steps + 1);
    tr.energies.reserve(steps + 1);
    tr.identity_defects.reserve(steps);

    Eigen::VectorXd z = z0.stacked();
    double energy = 0.5 * z.squaredNorm();
    tr.times.push_back(0.0);
    tr.energies.push_back(energy);
    if (options.snapshot_every > 0) out.snapshots.emplace_back(0.0, z0);

    for (long k = 1; k <= steps; ++k) {
        Eigen::VectorXd next = implicit_half.solve(explicit_half * z);
        const double next_energy = 0.5 * next.squaredNorm();
        const Eigen::VectorXd theta_mid = 0.5 * (z.segment(2 * n, n) + next.segment(2 * n, n));
        const double dissipation = dt * (d2.array() * theta_mid.array().square()).sum();
        tr.identity_defects.push_back(next_energy - energy + dissipation);
        z = std::move(next);
        energy = next_energy;
        const double t = static_cast<double>(k) * dt;
        tr.times.push_back(t);
        tr.energies.push_back(energy);
        if (options.snapshot_every > 0 && k % options.snapshot_every == 0)
            out.snapshots.emplace_back(t, StateVector::from_stacked(z));
    }
    if (!z.allFinite()) throw NumericalError("evolve: state became non-finite for " + dyn.label());
    tr.final_state = StateVector::from_stacked(z);
    return out;
}

std::string to_string(DecayLaw law) {
    switch (law) {
        case DecayLaw::exponential: return "exponential";
        case DecayLaw::polynomial: return "polynomial";
        case DecayLaw::fully_decayed: return "fully_decayed";
    }
    return "unknown";
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return f;
}

}  // namespace

DecayFit classify_decay(const EnergyTrace& trace, double t_begin, double t_end) {
    if (!(t_begin > 0.0) || !(t_end > t_begin))
        throw std::invalid_argument("classify_decay: window must satisfy 0 < t_begin < t_end");
    if (trace.times.empty() || t_end > trace.times.back() + 1e-9 * t_end)
        throw std::invalid_argument("classify_decay: window exceeds the trace");

    const double zero_level = trace.energies.front() * std::numeric_limits<double>::epsilon() *
                              std::numeric_limits<double>::epsilon();
    const double slack = 1e-9 * t_end;
    std::vector<double> t, logt, logE;
    DecayFit fit;
    fit.t_begin = t_begin;
    fit.t_end = t_end;
    bool decayed = false;
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double tk = trace.times[k];
        if (tk < t_begin - slack || tk > t_end + slack) continue;
        if (!(trace.energies[k] > zero_level)) {
            decayed = true;
            break;
        }
        t.push_back(tk);
        logt.push_back(std::log(tk));
        logE.push_back(std::log(trace.energies[k]));
    }
    fit.samples = t.size();
    if (decayed) {
        fit.law = DecayLaw::fully_decayed;
        return fit;
    }
    if (t.size() < 3) throw std::invalid_argument("classify_decay: fewer than 3 samples in window");

    const LineFit e = fit_line(t, logE);
    const LineFit p = fit_line(logt, logE);
    fit.rate = -e.slope;
    fit.exponent = p.slope;
    fit.r2_exponential = e.r2;
    fit.r2_polynomial = p.r2;
    if (e.r2 >= p.r2) {
        fit.law = DecayLaw::exponential;
        fit.prefactor = std::exp(e.intercept);
        fit.goodness = e.r2;
    } else {
        fit.law = DecayLaw::polynomial;
        fit.prefactor = std::exp(p.intercept);
        fit.goodness = p.r2;
    }
    return fit;
}

DecayFit classify_decay(const EnergyTrace& trace) {
    if (trace.times.empty()) throw std::invalid_argument("classify_decay: empty trace");
    const double T = trace.times.back();
    return classify_decay(trace, T / 10.0, T);
}

std::vector<SmoothnessRow> smoothness_experiment(SystemId system, int n, double gamma, const std::vector<int>& j_list,
                                                 double dt, double T, BlockConvention convention) {
    for (int j : j_list)
        if (j < 1 || j > n) throw std::invalid_argument("smoothness_experiment: every j must satisfy 1 <= j <= n");
    const auto dyn = assemble_dynamic({system, gamma, n, convention});
    std::vector<SmoothnessRow> rows(j_list.size());
    parallel_for(j_list.size(), [&](std::size_t i) {
        const int j = j_list[i];
        auto run = evolve(dyn, StateVector::velocity_mode(n, j), dt, T, "j" + std::to_string(j));
        rows[i].j = j;
        rows[i].fit = classify_decay(run.trace);
        rows[i].trace = std::move(run.trace);
    });
    return rows;
}

double polynomial_bound_constant(const EnergyTrace& trace, const DiscreteDynamic& dyn, const StateVector& z0,
                                 double t_begin, double t_end) {
    const double az = (dyn.matrix * z0.stacked()).squaredNorm();
    if (!(az > 0.0)) throw std::invalid_argument("polynomial_bound_constant: A z0 vanishes");
    double worst = 0.0;
    for (std::size_t k = 0; k < trace.times.size(); ++k)
        if (trace.times[k] >= t_begin && trace.times[k] <= t_end)
            worst = std::max(worst, trace.energies[k] * trace.times[k] / az);
    return worst;
}

}  // namespace thermowave

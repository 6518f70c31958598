#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermowave/spectral_assembly.hpp"

namespace thermowave {

/// Modal state z = (u, v, theta).
struct StateVector {
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    Eigen::VectorXd theta;

    static StateVector zero(int n);
    /// v_j = 1, everything else zero: the modal image of u_t(x,0) = sin(jx) up to normalization.
    static StateVector velocity_mode(int n, int j);
    static StateVector from_stacked(const Eigen::VectorXd& z);

    int size() const { return static_cast<int>(u.size()); }
    Eigen::VectorXd stacked() const;
};

/// 0.5 (|u|^2 + |v|^2 + |theta|^2).
double discrete_energy(const StateVector& z);

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energies;
    std::string initial_descriptor;
    double dt = 0.0;
    SystemId system = SystemId::weak;
    int n = 0;
    double gamma = 0.0;
    /// Per step: E_{k+1} - E_k + dt theta_mid^T D^2 theta_mid.
    std::vector<double> identity_defects;
    StateVector final_state;
};

struct EvolveOptions {
    /// Record the state every `snapshot_every` steps (0: never).
    int snapshot_every = 0;
};

struct Evolution {
    EnergyTrace trace;
    std::vector<std::pair<double, StateVector>> snapshots;
};

/// Implicit midpoint: (I - dt/2 A) z_{k+1} = (I + dt/2 A) z_k, factorized once.
/// Requires dt > 0 and T >= dt; the number of steps is round(T/dt).
Evolution evolve(const DiscreteDynamic& dyn, const StateVector& z0, double dt, double T,
                 const std::string& descriptor = "custom", const EvolveOptions& options = {});

enum class DecayLaw { exponential, polynomial, fully_decayed };

std::string to_string(DecayLaw law);

struct DecayFit {
    DecayLaw law = DecayLaw::exponential;
    double rate = 0.0;      // omega from log E = log M - omega t
    double exponent = 0.0;  // p from log E = log M + p log t
    double prefactor = 0.0; // M of the selected law
    double r2_exponential = 0.0;
    double r2_polynomial = 0.0;
    double goodness = 0.0;  // R^2 of the selected law
    double t_begin = 0.0;
    double t_end = 0.0;
    std::size_t samples = 0;
};

/// Least-squares fits of log E against t and log t over [t_begin, t_end];
/// the law with the larger R^2 wins. Energies below E(0) * eps^2 inside the
/// window give a fully_decayed verdict.
DecayFit classify_decay(const EnergyTrace& trace, double t_begin, double t_end);

/// Default window [T/10, T].
DecayFit classify_decay(const EnergyTrace& trace);

struct SmoothnessRow {
    int j = 0;
    EnergyTrace trace;
    DecayFit fit;
};

/// One run per j with initial state v_j = 1, fitted on [T/10, T]. Runs in parallel.
std::vector<SmoothnessRow> smoothness_experiment(SystemId system, int n, double gamma, const std::vector<int>& j_list,
                                                 double dt, double T,
                                                 BlockConvention convention = BlockConvention::dissipative);

/// max over samples in [t_begin, t_end] of E(t) t / |A z0|^2.
double polynomial_bound_constant(const EnergyTrace& trace, const DiscreteDynamic& dyn, const StateVector& z0,
                                 double t_begin, double t_end);

}  // namespace thermowave

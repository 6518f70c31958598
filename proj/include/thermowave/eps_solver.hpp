#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thermowave/model.hpp"

namespace thermowave {

// 1D oscillating-coefficient thermoelastic problem on (0,1), Dirichlet ends:
//   c(x/eps) u_tt = (a(x/eps) u_x)_x - gamma(x/eps) theta
//   d(x/eps) theta_t = (b(x/eps) theta_x)_x + gamma(x/eps) u_t
// discretized with nodal finite differences on m uniform cells.

inline constexpr double kMinCellsPerPeriod = 64.0;

struct EpsCoefficients {
    CoefficientField a, b, c, d, gamma;
};

struct EpsProblem {
    double epsilon = 1.0;
    EpsCoefficients coeffs;
    int cells = 64;

    double h() const { return 1.0 / cells; }
    int unknowns() const { return cells - 1; }

    /// Throws std::invalid_argument if epsilon is outside (0,1], the mesh does not
    /// resolve the period (cells * epsilon >= 64), or a coefficient fails validation.
    /// A coupling field that is identically zero is accepted as the uncoupled control.
    void validate() const;
};

/// Interior-node operators. Stiffness uses the weak-form scaling (1/h) with the
/// cell harmonic average of a(x/eps); masses and coupling are lumped, h * nodal value.
struct EpsOperators {
    int cells = 0;
    double h = 0.0;
    Eigen::VectorXd nodes;       // interior x_i = i h, i = 1..m-1
    Eigen::VectorXd cell_a;      // harmonic averages per cell, m entries
    Eigen::VectorXd cell_b;
    Eigen::SparseMatrix<double> stiffness_a;
    Eigen::SparseMatrix<double> stiffness_b;
    Eigen::VectorXd mass_c;
    Eigen::VectorXd mass_d;
    Eigen::VectorXd coupling;
};

EpsOperators assemble_eps_operators(const EpsProblem& prob);

/// Cell-average of a(x/eps) in the harmonic sense: h / int_cell 1/a(x/eps) dx.
double harmonic_cell_average(const ScalarProfile& a, double x0, double x1, double epsilon);

/// Nodal values at interior nodes; Dirichlet ends are implied zero.
struct GridSolution {
    int cells = 0;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    Eigen::VectorXd theta;

    static GridSolution zero(int cells);
    /// Interior values padded with the two boundary zeros.
    static Eigen::VectorXd with_boundary(const Eigen::VectorXd& interior);
};

using ScalarFunction = std::function<double(double)>;

/// Samples f at the interior nodes of an m-cell mesh.
Eigen::VectorXd sample_nodes(int cells, const ScalarFunction& f);

struct ResolventData {
    Eigen::VectorXd f;
    Eigen::VectorXd g;
    Eigen::VectorXd h;

    static ResolventData sampled(int cells, const ScalarFunction& f, const ScalarFunction& g, const ScalarFunction& h);
};

struct ResolventSolution {
    GridSolution solution;
    double relative_residual = 0.0;  // of the full three-field system
};

/// Solves (lambda - A_eps) U = F: first the reduced (u, theta) system obtained by
/// eliminating v = lambda u - f, then recovers v.
ResolventSolution solve_resolvent(const EpsProblem& prob, double lambda, const ResolventData& F);
ResolventSolution solve_resolvent(const EpsProblem& prob, const EpsOperators& ops, double lambda,
                                  const ResolventData& F);

/// ||U||_eps^2 = u^T K_a u + v^T M_c v + theta^T M_d theta.
double energy_norm_sq(const EpsOperators& ops, const GridSolution& U);

/// Same norm with unit coefficients (the natural H^1_0 x L^2 x L^2 norm).
double unit_norm_sq(int cells, const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& theta);

/// Discrete L^2(0,1) norm of interior nodal values.
double l2_norm(int cells, const Eigen::VectorXd& w);

/// int_0^1 a_eps u' phi dx, evaluated cell by cell with phi at cell midpoints.
double weak_flux(const EpsOperators& ops, const Eigen::VectorXd& u, const ScalarFunction& phi);

struct ConvergenceReport {
    std::vector<double> epsilons;
    std::vector<double> err_u;
    std::vector<double> err_theta;
    std::vector<double> flux_gap;
    std::vector<double> ratio_apriori;
    double order_u = 0.0;
    double order_theta = 0.0;
    double order_flux = 0.0;
    int cells = 0;
    double a_hom = 0.0;
    double b_hom = 0.0;
};

struct ResolventForcing {
    ScalarFunction f;
    ScalarFunction g;
    ScalarFunction h;
};

/// Least-squares slope of log(values) against log(eps).
double observed_order(const std::vector<double>& eps, const std::vector<double>& values);

/// Homogenized resolvent on the same mesh, compared against each eps problem.
/// cells = 0 picks the smallest mesh with 64 cells per period for every eps.
ConvergenceReport resolvent_convergence(const EpsCoefficients& coeffs, const std::vector<double>& epsilons,
                                        double lambda, const ResolventForcing& forcing, int cells = 0,
                                        const ScalarFunction& phi = {});

struct EpsEvolution {
    std::vector<double> times;
    std::vector<double> energies;          // 0.5 ||U||_eps^2
    std::vector<double> identity_defects;  // E_{k+1} - E_k + dt theta_mid^T K_b theta_mid
    GridSolution final_state;
};

/// Implicit midpoint on M z' = K z with M = diag(I, M_c, M_d).
EpsEvolution evolve_eps(const EpsProblem& prob, const GridSolution& initial, double dt, double T);

}  // namespace thermowave

#include "thermowave/eps_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "thermowave/errors.hpp"
#include "thermowave/homog.hpp"
#include "thermowave/parallel.hpp"

namespace thermowave {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

bool is_zero_coupling(const CoefficientField& f) {
    return f.role == FieldRole::coupling && f.rank == TensorRank::scalar && f.first.is_constant() &&
           f.first(0.0) == 0.0;
}

void require_valid(const CoefficientField& f, const char* what) {
    if (f.rank != TensorRank::scalar)
        throw std::invalid_argument(std::string("eps problem: coefficient ") + what + " must be scalar in 1D");
    if (is_zero_coupling(f)) return;
    if (const auto report = validate(f); !report.passed())
        throw std::invalid_argument(std::string("eps problem: coefficient ") + what + " " + report.summary());
}

// Tridiagonal (1/h) stiffness on interior nodes from per-cell coefficients.
Eigen::SparseMatrix<double> stiffness(const Eigen::VectorXd& cell_coef, double h) {
    const auto m = cell_coef.size();
    const auto n = m - 1;
    Triplets t;
    t.reserve(3 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // interior node i+1 sits between cells i and i+1
        t.emplace_back(i, i, (cell_coef(i) + cell_coef(i + 1)) / h);
        if (i > 0) t.emplace_back(i, i - 1, -cell_coef(i) / h);
        if (i + 1 < n) t.emplace_back(i, i + 1, -cell_coef(i + 1) / h);
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

void append_block(Triplets& t, const Eigen::SparseMatrix<double>& B, Eigen::Index row0, Eigen::Index col0,
                  double scale) {
    for (int k = 0; k < B.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it)
            t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

void append_diag(Triplets& t, const Eigen::VectorXd& d, Eigen::Index row0, Eigen::Index col0, double scale) {
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) != 0.0) t.emplace_back(row0 + i, col0 + i, scale * d(i));
}

}  // namespace

void EpsProblem::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("eps problem: epsilon must lie in (0,1]");
    if (cells < 2) throw std::invalid_argument("eps problem: need at least 2 cells");
    if (static_cast<double>(cells) * epsilon < kMinCellsPerPeriod * (1.0 - 1e-12))
        throw std::invalid_argument("eps problem: under-resolved mesh, cells*epsilon >= 64 violated (cells=" +
                                    std::to_string(cells) + ", epsilon=" + std::to_string(epsilon) + ")");
    require_valid(coeffs.a, "a");
    require_valid(coeffs.b, "b");
    require_valid(coeffs.c, "c");
    require_valid(coeffs.d, "d");
    require_valid(coeffs.gamma, "gamma");
}

double harmonic_cell_average(const ScalarProfile& a, double x0, double x1, double epsilon) {
    const double span = std::abs(x1 - x0) / epsilon;
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(32.0 * span)));
    const double inv = epsilon * integrate(a, x0 / epsilon, x1 / epsilon, reciprocal_fn, panels);
    return (x1 - x0) / inv;
}

EpsOperators assemble_eps_operators(const EpsProblem& prob) {
    prob.validate();
    const int m = prob.cells;
    const double h = prob.h();
    const double eps = prob.epsilon;
    EpsOperators ops;
    ops.cells = m;
    ops.h = h;
    ops.cell_a.resize(m);
    ops.cell_b.resize(m);
    for (int i = 0; i < m; ++i) {
        const double x0 = i * h;
        const double x1 = (i + 1) * h;
        ops.cell_a(i) = harmonic_cell_average(prob.coeffs.a.first, x0, x1, eps);
        ops.cell_b(i) = harmonic_cell_average(prob.coeffs.b.first, x0, x1, eps);
    }
    ops.stiffness_a = stiffness(ops.cell_a, h);
    ops.stiffness_b = stiffness(ops.cell_b, h);

    const int n = m - 1;
    ops.nodes.resize(n);
    ops.mass_c.resize(n);
    ops.mass_d.resize(n);
    ops.coupling.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * h;
        const double y = x / eps;
        ops.nodes(i) = x;
        ops.mass_c(i) = h * prob.coeffs.c.first(y);
        ops.mass_d(i) = h * prob.coeffs.d.first(y);
        ops.coupling(i) = h * prob.coeffs.gamma.first(y);
    }
    return ops;
}

GridSolution GridSolution::zero(int cells) {
    GridSolution g;
    g.cells = cells;
    g.u = Eigen::VectorXd::Zero(cells - 1);
    g.v = Eigen::VectorXd::Zero(cells - 1);
    g.theta = Eigen::VectorXd::Zero(cells - 1);
    return g;
}

Eigen::VectorXd GridSolution::with_boundary(const Eigen::VectorXd& interior) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(interior.size() + 2);
    full.segment(1, interior.size()) = interior;
    return full;
}

Eigen::VectorXd sample_nodes(int cells, const ScalarFunction& f) {
    Eigen::VectorXd out(cells - 1);
    for (int i = 1; i < cells; ++i) out(i - 1) = f(static_cast<double>(i) / cells);
    return out;
}

ResolventData ResolventData::sampled(int cells, const ScalarFunction& f, const ScalarFunction& g,
                                     const ScalarFunction& h) {
    return {sample_nodes(cells, f), sample_nodes(cells, g), sample_nodes(cells, h)};
}

ResolventSolution solve_resolvent(const EpsProblem& prob, double lambda, const ResolventData& F) {
    return solve_resolvent(prob, assemble_eps_operators(prob), lambda, F);
}

ResolventSolution solve_resolvent(const EpsProblem& prob, const EpsOperators& ops, double lambda,
                                  const ResolventData& F) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_resolvent: lambda must be positive");
    const Eigen::Index n = prob.cells - 1;
    if (F.f.size() != n || F.g.size() != n || F.h.size() != n)
        throw std::invalid_argument("solve_resolvent: forcing size does not match the mesh");

    // (lambda^2 M_c + K_a) u + G theta         = M_c (g + lambda f)
    // -lambda G u + (lambda M_d + K_b) theta   = M_d h - G f
    Triplets t;
    t.reserve(8 * n);
    append_block(t, ops.stiffness_a, 0, 0, 1.0);
    append_diag(t, ops.mass_c, 0, 0, lambda * lambda);
    append_diag(t, ops.coupling, 0, n, 1.0);
    append_diag(t, ops.coupling, n, 0, -lambda);
    append_block(t, ops.stiffness_b, n, n, 1.0);
    append_diag(t, ops.mass_d, n, n, lambda);
    Eigen::SparseMatrix<double> S(2 * n, 2 * n);
    S.setFromTriplets(t.begin(), t.end());

    Eigen::VectorXd rhs(2 * n);
    rhs.head(n) = ops.mass_c.cwiseProduct(F.g + lambda * F.f);
    rhs.tail(n) = ops.mass_d.cwiseProduct(F.h) - ops.coupling.cwiseProduct(F.f);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(S);
    lu.factorize(S);
    if (lu.info() != Eigen::Success)
        throw NumericalError("solve_resolvent: reduced system is singular (coefficient validation failure?)");
    const Eigen::VectorXd x = lu.solve(rhs);

    ResolventSolution out;
    auto& U = out.solution;
    U.cells = prob.cells;
    U.u = x.head(n);
    U.theta = x.tail(n);
    U.v = lambda * U.u - F.f;

    // Full three-field residual.
    const Eigen::VectorXd r1 = lambda * U.u - U.v - F.f;
    const Eigen::VectorXd r2 =
        lambda * ops.mass_c.cwiseProduct(U.v) + ops.stiffness_a * U.u + ops.coupling.cwiseProduct(U.theta) -
        ops.mass_c.cwiseProduct(F.g);
    const Eigen::VectorXd r3 = lambda * ops.mass_d.cwiseProduct(U.theta) - ops.coupling.cwiseProduct(U.v) +
                               ops.stiffness_b * U.theta - ops.mass_d.cwiseProduct(F.h);
    const double scale = (ops.stiffness_a * U.u).norm() + (ops.stiffness_b * U.theta).norm() +
                         ops.mass_c.cwiseProduct(F.g).norm() + ops.mass_d.cwiseProduct(F.h).norm() +
                         F.f.norm() + lambda * U.u.norm();
    const double res = std::sqrt(r1.squaredNorm() + r2.squaredNorm() + r3.squaredNorm());
    out.relative_residual = scale > 0.0 ? res / scale : res;
    return out;
}

double energy_norm_sq(const EpsOperators& ops, const GridSolution& U) {
    return U.u.dot(ops.stiffness_a * U.u) + U.v.dot(ops.mass_c.cwiseProduct(U.v)) +
           U.theta.dot(ops.mass_d.cwiseProduct(U.theta));
}

double unit_norm_sq(int cells, const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& theta) {
    const double h = 1.0 / cells;
    const Eigen::VectorXd full = GridSolution::with_boundary(u);
    const Eigen::VectorXd du = (full.tail(cells) - full.head(cells)) / h;
    return h * (du.squaredNorm() + v.squaredNorm() + theta.squaredNorm());
}

double l2_norm(int cells, const Eigen::VectorXd& w) { return std::sqrt(w.squaredNorm() / cells); }

double weak_flux(const EpsOperators& ops, const Eigen::VectorXd& u, const ScalarFunction& phi) {
    const Eigen::VectorXd full = GridSolution::with_boundary(u);
    double sum = 0.0;
    for (int i = 0; i < ops.cells; ++i) {
        const double flux = ops.cell_a(i) * (full(i + 1) - full(i)) / ops.h;
        sum += ops.h * flux * phi((i + 0.5) * ops.h);
    }
    return sum;
}

double observed_order(const std::vector<double>& eps, const std::vector<double>& values) {
    if (eps.size() != values.size() || eps.size() < 2)
        throw std::invalid_argument("observed_order: need at least two aligned points");
    double mx = 0.0, my = 0.0;
    const auto m = static_cast<double>(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) mx += std::log(eps[i]), my += std::log(values[i]);
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double dx = std::log(eps[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(values[i]) - my);
    }
    return sxy / sxx;
}

ConvergenceReport resolvent_convergence(const EpsCoefficients& coeffs, const std::vector<double>& epsilons,
                                        double lambda, const ResolventForcing& forcing, int cells,
                                        const ScalarFunction& phi) {
    if (epsilons.empty()) throw std::invalid_argument("resolvent_convergence: empty epsilon list");
    if (cells == 0) {
        const double eps_min = *std::min_element(epsilons.begin(), epsilons.end());
        cells = static_cast<int>(std::ceil(kMinCellsPerPeriod / eps_min - 1e-9));
    }
    const ScalarFunction test_fn = phi ? phi : [](double x) { return std::sin(std::numbers::pi * x); };

    const HomogenizedModel hm = homogenize(coeffs);
    const EpsProblem hom_problem = homogenized_problem(hm, cells);
    const EpsOperators hom_ops = assemble_eps_operators(hom_problem);
    const ResolventData F = ResolventData::sampled(cells, forcing.f, forcing.g, forcing.h);
    const auto U0 = solve_resolvent(hom_problem, hom_ops, lambda, F).solution;
    const double hom_flux = weak_flux(hom_ops, U0.u, test_fn);
    const double F_norm = std::sqrt(unit_norm_sq(cells, F.f, F.g, F.h));

    ConvergenceReport rep;
    rep.cells = cells;
    rep.a_hom = hm.a_hom.scalar();
    rep.b_hom = hm.b_hom.scalar();
    rep.epsilons = epsilons;
    const std::size_t k = epsilons.size();
    rep.err_u.resize(k);
    rep.err_theta.resize(k);
    rep.flux_gap.resize(k);
    rep.ratio_apriori.resize(k);

    parallel_for(k, [&](std::size_t i) {
        EpsProblem p;
        p.epsilon = epsilons[i];
        p.coeffs = coeffs;
        p.cells = cells;
        const EpsOperators ops = assemble_eps_operators(p);
        const auto sol = solve_resolvent(p, ops, lambda, F);
        if (sol.relative_residual > 1e-10)
            throw NumericalError("resolvent_convergence: residual too large at epsilon=" + std::to_string(p.epsilon));
        const auto& U = sol.solution;
        rep.err_u[i] = l2_norm(cells, U.u - U0.u);
        rep.err_theta[i] = l2_norm(cells, U.theta - U0.theta);
        rep.flux_gap[i] = std::abs(weak_flux(ops, U.u, test_fn) - hom_flux);
        rep.ratio_apriori[i] = std::sqrt(energy_norm_sq(ops, U)) / F_norm;
    });

    if (k >= 2) {
        auto safe_order = [&](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; }) ? observed_order(epsilons, v)
                                                                                      : 0.0;
        };
        rep.order_u = safe_order(rep.err_u);
        rep.order_theta = safe_order(rep.err_theta);
        rep.order_flux = safe_order(rep.flux_gap);
    }
    return rep;
}

EpsEvolution evolve_eps(const EpsProblem& prob, const GridSolution& initial, double dt, double T) {
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_eps: dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("evolve_eps: T must be >= dt");
    const EpsOperators ops = assemble_eps_operators(prob);
    const Eigen::Index n = prob.cells - 1;
    if (initial.u.size() != n || initial.v.size() != n || initial.theta.size() != n)
        throw std::invalid_argument("evolve_eps: initial data does not match the mesh");

    // z = (u, v, theta); M z' = K z with K = [[0, I, 0], [-K_a, 0, -G], [0, G, -K_b]].
    Eigen::VectorXd mass(3 * n);
    mass << Eigen::VectorXd::Ones(n), ops.mass_c, ops.mass_d;
    Triplets kt;
    kt.reserve(10 * n);
    append_diag(kt, Eigen::VectorXd::Ones(n), 0, n, 1.0);
    append_block(kt, ops.stiffness_a, n, 0, -1.0);
    append_diag(kt, ops.coupling, n, 2 * n, -1.0);
    append_diag(kt, ops.coupling, 2 * n, n, 1.0);
    append_block(kt, ops.stiffness_b, 2 * n, 2 * n, -1.0);
    Eigen::SparseMatrix<double> K(3 * n, 3 * n);
    K.setFromTriplets(kt.begin(), kt.end());

    Eigen::SparseMatrix<double> M(3 * n, 3 * n);
    M.reserve(Eigen::VectorXi::Constant(3 * n, 1));
    for (Eigen::Index i = 0; i < 3 * n; ++i) M.insert(i, i) = mass(i);

    const Eigen::SparseMatrix<double> lhs = M - 0.5 * dt * K;
    const Eigen::SparseMatrix<double> rhs_op = M + 0.5 * dt * K;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(lhs);
    lu.factorize(lhs);
    if (lu.info() != Eigen::Success) throw NumericalError("evolve_eps: M - dt/2 K is singular");

    auto energy = [&](const Eigen::VectorXd& z) {
        const auto u = z.segment(0, n);
        const auto v = z.segment(n, n);
        const auto th = z.segment(2 * n, n);
        return 0.5 * (u.dot(ops.stiffness_a * u) + v.dot(ops.mass_c.cwiseProduct(v)) +
                      th.dot(ops.mass_d.cwiseProduct(th)));
    };

    Eigen::VectorXd z(3 * n);
    z << initial.u, initial.v, initial.theta;
    const auto steps = static_cast<long>(std::llround(T / dt));

    EpsEvolution out;
    out.times.reserve(steps + 1);
    out.energies.reserve(steps + 1);
    out.identity_defects.reserve(steps);
    double e = energy(z);
    out.times.push_back(0.0);
    out.energies.push_back(e);
    for (long k = 1; k <= steps; ++k) {
        Eigen::VectorXd next = lu.solve(rhs_op * z);
        const double e_next = energy(next);
        const Eigen::VectorXd th_mid = 0.5 * (z.segment(2 * n, n) + next.segment(2 * n, n));
        out.identity_defects.push_back(e_next - e + dt * th_mid.dot(ops.stiffness_b * th_mid));
        z = std::move(next);
        e = e_next;
        out.times.push_back(static_cast<double>(k) * dt);
        out.energies.push_back(e);
    }
    if (!z.allFinite()) throw NumericalError("evolve_eps: state became non-finite");
    out.final_state.cells = prob.cells;
    out.final_state.u = z.segment(0, n);
    out.final_state.v = z.segment(n, n);
    out.final_state.theta = z.segment(2 * n, n);
    return out;
}

}  // namespace thermowave

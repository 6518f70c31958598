#include "thermowave/homog.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace thermowave {

double mean_value(const ScalarProfile& profile, std::size_t panels) {
    if (profile.is_constant()) return profile(0.0);
    return integrate(profile, 0.0, 1.0, identity_fn, std::max(panels, kMeanPanels));
}

double mean_value(const CoefficientField& field, std::size_t panels) {
    if (field.rank != TensorRank::scalar)
        throw std::invalid_argument("mean_value: field '" + field.name + "' is not scalar");
    return mean_value(field.first, panels);
}

CellCorrector cell_corrector_1d(const ScalarProfile& a, std::size_t grid) {
    if (grid < 2) throw std::invalid_argument("cell_corrector_1d: grid needs at least 2 cells");
    const double h = 1.0 / static_cast<double>(grid);
    std::vector<double> inv_int(grid);

    for (std::size_t i = 0; i < grid; ++i) {
        const double y0 = static_cast<double>(i) * h;
        inv_int[i] = integrate(a, y0, y0 + h, reciprocal_fn);
        if (!(inv_int[i] > 0.0) || !std::isfinite(inv_int[i]))
            throw std::invalid_argument("cell_corrector_1d: coefficient " + a.describe() + " is not elliptic");
    }
    // Whole-cell integral in one pass: exact for tables, no accumulated rounding.
    const double total = integrate(a, 0.0, 1.0, reciprocal_fn, grid);

    CellCorrector out;
    out.effective = 1.0 / total;
    out.y.resize(grid + 1);
    out.values.resize(grid + 1);
    out.values[0] = 0.0;
    // M' = a_hom / a - 1, so M(y_{i+1}) - M(y_i) = a_hom int_cell 1/a - h.
    for (std::size_t i = 0; i < grid; ++i) {
        out.y[i] = static_cast<double>(i) * h;
        out.values[i + 1] = out.values[i] + (out.effective * inv_int[i] - h);
    }
    out.y[grid] = 1.0;

    double mean = 0.0;
    for (std::size_t i = 0; i < grid; ++i) mean += out.values[i];
    mean /= static_cast<double>(grid);
    for (auto& m : out.values) m -= mean;
    out.values[grid] = out.values[0];
    return out;
}

CellCorrector cell_corrector_1d(const CoefficientField& a, std::size_t grid) {
    if (a.rank != TensorRank::scalar) throw std::invalid_argument("cell_corrector_1d: scalar field required");
    if (const auto report = validate(a); !report.passed())
        throw std::invalid_argument("cell_corrector_1d: field '" + a.name + "' " + report.summary());
    return cell_corrector_1d(a.first, grid);
}

CellCorrector cell_corrector_fem_1d(const ScalarProfile& a, std::size_t grid) {
    if (grid < 3) throw std::invalid_argument("cell_corrector_fem_1d: grid needs at least 3 cells");
    const auto N = static_cast<Eigen::Index>(grid);
    const double h = 1.0 / static_cast<double>(grid);
    Eigen::VectorXd abar(N);
    for (Eigen::Index e = 0; e < N; ++e) {
        const double y0 = static_cast<double>(e) * h;
        abar(e) = integrate(a, y0, y0 + h, identity_fn, 2) / h;
    }

    // Element e joins nodes e and e+1 (mod N). Node 0 is pinned to remove the constant.
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    trip.emplace_back(0, 0, 1.0);
    for (Eigen::Index i = 1; i < N; ++i) {
        const Eigen::Index left = i - 1;
        const Eigen::Index right = i;
        const Eigen::Index prev = i - 1;
        const Eigen::Index next = (i + 1) % N;
        trip.emplace_back(i, i, (abar(left) + abar(right)) / h);
        if (prev != 0) trip.emplace_back(i, prev, -abar(left) / h);
        if (next != 0) trip.emplace_back(i, next, -abar(right) / h);
        rhs(i) = abar(right) - abar(left);
    }
    Eigen::SparseMatrix<double> K(N, N);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(K);
    if (solver.info() != Eigen::Success) throw std::runtime_error("cell_corrector_fem_1d: factorization failed");
    Eigen::VectorXd M = solver.solve(rhs);
    M.array() -= M.mean();

    CellCorrector out;
    out.y.resize(grid + 1);
    out.values.resize(grid + 1);
    double energy = 0.0;
    for (Eigen::Index e = 0; e < N; ++e) {
        const double slope = (M((e + 1) % N) - M(e)) / h;
        energy += abar(e) * h * (1.0 + slope) * (1.0 + slope);
        out.y[e] = static_cast<double>(e) * h;
        out.values[e] = M(e);
    }
    out.y[grid] = 1.0;
    out.values[grid] = M(0);
    out.effective = energy;
    return out;
}

double EffectiveTensor::scalar() const {
    if (rank != TensorRank::scalar) throw std::invalid_argument("effective tensor is not scalar");
    return diag[0];
}

EffectiveTensor laminate_homogenize(const CoefficientField& a, std::size_t grid) {
    if (!a.is_laminate()) throw std::invalid_argument("laminate_homogenize: field '" + a.name + "' varies in y2");
    if (const auto report = validate(a); !report.passed())
        throw std::invalid_argument("laminate_homogenize: field '" + a.name + "' " + report.summary());
    const ScalarProfile& a11 = a.first;
    const ScalarProfile& a22 = a.rank == TensorRank::scalar ? a.first : *a.second;
    EffectiveTensor t;
    t.rank = TensorRank::diagonal2;
    t.diag[0] = cell_corrector_1d(a11, grid).effective;
    t.diag[1] = mean_value(a22);
    return t;
}

namespace {

void check_field(const CoefficientField& f, const char* what) {
    if (f.role == FieldRole::coupling && f.first.is_constant() && f.first(0.0) == 0.0) return;
    if (const auto report = validate(f); !report.passed())
        throw std::invalid_argument(std::string("homogenize: coefficient ") + what + " " + report.summary());
}

void effective_of(const CoefficientField& f, std::size_t grid, EffectiveTensor& eff, CellCorrector& corr) {
    if (f.rank == TensorRank::scalar) {
        corr = cell_corrector_1d(f.first, grid);
        eff.rank = TensorRank::scalar;
        eff.diag = {corr.effective, corr.effective};
    } else {
        eff = laminate_homogenize(f, grid);
        corr = cell_corrector_1d(f.first, grid);
    }
}

}  // namespace

HomogenizedModel homogenize(const EpsCoefficients& coeffs, std::size_t grid) {
    check_field(coeffs.a, "a");
    check_field(coeffs.b, "b");
    check_field(coeffs.c, "c");
    check_field(coeffs.d, "d");
    check_field(coeffs.gamma, "gamma");

    HomogenizedModel hm;
    hm.mean_c = mean_value(coeffs.c);
    hm.mean_d = mean_value(coeffs.d);
    hm.mean_gamma = mean_value(coeffs.gamma);
    effective_of(coeffs.a, grid, hm.a_hom, hm.corrector_a);
    effective_of(coeffs.b, grid, hm.b_hom, hm.corrector_b);
    hm.cell_grid_size = grid;
    return hm;
}

HomogenizedModel constant_model(double a_hom, double b_hom, double mean_c, double mean_d, double mean_gamma) {
    HomogenizedModel hm;
    hm.mean_c = mean_c;
    hm.mean_d = mean_d;
    hm.mean_gamma = mean_gamma;
    hm.a_hom.diag = {a_hom, a_hom};
    hm.b_hom.diag = {b_hom, b_hom};
    return hm;
}

DiscreteDynamic assemble_homogenized_spectral(const HomogenizedModel& hm, int n_modes) {
    if (hm.a_hom.rank != TensorRank::scalar || hm.b_hom.rank != TensorRank::scalar)
        throw std::invalid_argument("inconsistent discretization spec: modal dynamic needs scalar a_hom, b_hom");
    if (n_modes < 1 || n_modes > kMaxModes) throw std::invalid_argument("inconsistent discretization spec: n_modes");
    const int n = n_modes;
    const double a = hm.a_hom.scalar();
    const double b = hm.b_hom.scalar();
    const Eigen::MatrixXd D = build_D(n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const double s = std::sqrt(a / hm.mean_c);

    DiscreteDynamic dyn;
    dyn.system = SystemId::weak;
    dyn.n = n;
    dyn.gamma = hm.mean_gamma;
    dyn.matrix = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    dyn.matrix.block(0, n, n, n) = s * D;
    dyn.matrix.block(n, 0, n, n) = -s * D;
    dyn.matrix.block(n, 2 * n, n, n) = -(hm.mean_gamma / hm.mean_c) * I;
    dyn.matrix.block(2 * n, n, n, n) = (hm.mean_gamma / hm.mean_d) * I;
    dyn.matrix.block(2 * n, 2 * n, n, n) = -(b / hm.mean_d) * (D * D);
    return dyn;
}

EpsProblem homogenized_problem(const HomogenizedModel& hm, int cells) {
    if (hm.a_hom.rank != TensorRank::scalar || hm.b_hom.rank != TensorRank::scalar)
        throw std::invalid_argument("inconsistent discretization spec: 1D grid needs scalar a_hom, b_hom");
    auto constant = [](const char* name, double v) {
        return CoefficientField::scalar(name, ScalarProfile::constant(v), std::min(v, 1.0 / v));
    };
    EpsProblem p;
    p.epsilon = 1.0;
    p.cells = cells;
    p.coeffs.a = constant("a", hm.a_hom.scalar());
    p.coeffs.b = constant("b", hm.b_hom.scalar());
    p.coeffs.c = constant("c", hm.mean_c);
    p.coeffs.d = constant("d", hm.mean_d);
    p.coeffs.gamma = CoefficientField::coupling("gamma", ScalarProfile::constant(hm.mean_gamma));
    return p;
}

HomogenizedOperator assemble_homogenized_dynamic(const HomogenizedModel& hm, const DiscretizationSpec& spec) {
    if (const auto* s = std::get_if<SpectralDiscretization>(&spec)) return assemble_homogenized_spectral(hm, s->n_modes);
    const auto& fd = std::get<FiniteDifferenceDiscretization>(spec);
    return assemble_eps_operators(homogenized_problem(hm, fd.cells));
}

}  // namespace thermowave

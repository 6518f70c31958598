#pragma once

#include <array>
#include <variant>
#include <vector>

#include "thermowave/eps_solver.hpp"
#include "thermowave/model.hpp"
#include "thermowave/spectral_assembly.hpp"

namespace thermowave {

inline constexpr std::size_t kMeanPanels = std::size_t{1} << 12;

/// int_0^1 field(y) dy. Tables are integrated exactly; smooth kinds use
/// composite Gauss-Legendre on `panels` panels.
double mean_value(const CoefficientField& field, std::size_t panels = kMeanPanels);
double mean_value(const ScalarProfile& profile, std::size_t panels = kMeanPanels);

/// Periodic corrector sampled at y_i = i/N, i = 0..N (the last sample repeats the first).
struct CellCorrector {
    std::vector<double> y;
    std::vector<double> values;
    double effective = 0.0;
};

/// Solves -(a(y)(1 + M'))' = 0 with M periodic and zero mean, in flux form:
/// the flux a(1 + M') is the constant (int 1/a)^-1. `grid` is the number of cells.
CellCorrector cell_corrector_1d(const ScalarProfile& a, std::size_t grid);
CellCorrector cell_corrector_1d(const CoefficientField& a, std::size_t grid);

/// Same cell problem with periodic P1 finite elements (cell-mean coefficients).
/// Converges to the flux-form value at second order; used as a cross-check.
CellCorrector cell_corrector_fem_1d(const ScalarProfile& a, std::size_t grid);

struct EffectiveTensor {
    TensorRank rank = TensorRank::scalar;
    std::array<double, 2> diag{0.0, 0.0};

    double scalar() const;
};

/// Effective tensor of a diagonal laminate diag(a1(y1), a2(y1)): harmonic mean
/// across the layers, arithmetic mean along them. Throws for y2 dependence.
EffectiveTensor laminate_homogenize(const CoefficientField& a, std::size_t grid = std::size_t{1} << 14);

struct HomogenizedModel {
    double mean_c = 0.0;
    double mean_d = 0.0;
    double mean_gamma = 0.0;
    EffectiveTensor a_hom;
    EffectiveTensor b_hom;
    CellCorrector corrector_a;  // M (first direction)
    CellCorrector corrector_b;  // N
    std::size_t cell_grid_size = 0;
};

/// Means of c, d, gamma and effective a, b. Scalar a, b give the 1D model;
/// diagonal laminates give diagonal tensors.
HomogenizedModel homogenize(const EpsCoefficients& coeffs, std::size_t grid = std::size_t{1} << 14);

/// Constant-coefficient model (a_hom, b_hom, <c>, <d>, <gamma>) without cell data.
HomogenizedModel constant_model(double a_hom, double b_hom, double mean_c, double mean_d, double mean_gamma);

struct SpectralDiscretization {
    int n_modes = 8;
};
struct FiniteDifferenceDiscretization {
    int cells = 64;
};
using DiscretizationSpec = std::variant<SpectralDiscretization, FiniteDifferenceDiscretization>;

/// Modal homogenized dynamic on (0, pi) with the sine basis:
///   [[0, s D, 0], [-s D, 0, -<gamma>/<c> I], [0, <gamma>/<d> I, -(b_hom/<d>) D^2]],  s = sqrt(a_hom/<c>).
/// With all coefficients 1 this is the weak-coupling dynamic.
DiscreteDynamic assemble_homogenized_spectral(const HomogenizedModel& hm, int n_modes);

/// Constant-coefficient eps problem on (0,1) built from the homogenized model.
EpsProblem homogenized_problem(const HomogenizedModel& hm, int cells);

using HomogenizedOperator = std::variant<DiscreteDynamic, EpsOperators>;

/// Dispatches on the discretization. Throws std::invalid_argument for tensor
/// (non-scalar) effective coefficients, which have no 1D discretization.
HomogenizedOperator assemble_homogenized_dynamic(const HomogenizedModel& hm, const DiscretizationSpec& spec);

}  // namespace thermowave

#pragma once

#include <array>
#include <complex>
#include <vector>

#include "thermowave/spectral_assembly.hpp"

namespace thermowave {

using Complex = std::complex<double>;

struct SpectrumReport {
    std::vector<Complex> eigenvalues;  // 3n values, sorted by (re desc, im asc)
    std::vector<double> residuals;     // ||Av - lambda v|| / ||A||_F per eigenvalue
    double abscissa = 0.0;             // max Re lambda
    double min_distance = 0.0;         // min(-Re lambda)
    double asymptote_ref = 0.0;        // -gamma^2 / 2
    double max_residual = 0.0;
};

/// Dense nonsymmetric eigensolve of the modal dynamic: balancing, Hessenberg
/// reduction and shifted QR, then one inverse-iteration step per eigenvalue
/// to certify ||Av - lambda v|| <= tol ||A||_F.
/// tol must lie in (0, 1e-6]. Throws NumericalError naming the matrix on failure.
SpectrumReport compute_spectrum(const DiscreteDynamic& dyn, double tol = 1e-10);

/// Roots of the per-mode cubic lambda^3 + j^2 lambda^2 + (j^2+gamma^2) lambda + j^4
/// for j = 1..n. Valid for the weak system only; uses bisection and Vieta,
/// not a matrix eigensolver.
std::vector<Complex> per_mode_oracle(int n, double gamma);

/// The three roots for a single mode j.
std::array<Complex, 3> mode_cubic_roots(int j, double gamma);

struct MultisetMatch {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in a, index in b)
    double max_distance = 0.0;
};

/// Greedy nearest-neighbour matching of two equally sized multisets: all
/// cross distances are sorted and accepted when both ends are free.
MultisetMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct MinDistanceRow {
    int n = 0;
    double min_neg_re = 0.0;
    double abscissa = 0.0;
    double asymptote = 0.0;
};

/// One spectrum per n (parallel over n), reporting min(-Re lambda).
std::vector<MinDistanceRow> min_distance_table(SystemId system, double gamma, const std::vector<int>& n_list,
                                               BlockConvention convention = BlockConvention::dissipative,
                                               double tol = 1e-10);

}  // namespace thermowave

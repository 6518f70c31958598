#include "thermowave/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "thermowave/errors.hpp"
#include "thermowave/parallel.hpp"

namespace thermowave {

namespace {

using CVector = Eigen::VectorXcd;

// Parlett-Reinsch balancing with radix-2 scalings (exact in floating point).
// On return B = S^-1 A S with S = diag(scale).
Eigen::VectorXd balance(Eigen::MatrixXd& B) {
    constexpr double radix = 2.0;
    constexpr double radix_sq = radix * radix;
    const Eigen::Index N = B.rows();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(N);
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < N; ++i) {
            double c = B.col(i).cwiseAbs().sum() - std::abs(B(i, i));
            double r = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix_sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix_sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                scale(i) *= f;
                B.row(i) /= f;
                B.col(i) *= f;
            }
        }
    }
    return scale;
}

// Solve (H - shift I) x = b for upper Hessenberg H by Gaussian elimination
// with adjacent-row pivoting. Zero pivots are nudged to `tiny`.
CVector hessenberg_solve(const Eigen::MatrixXd& H, Complex shift, CVector b, double tiny) {
    const Eigen::Index N = H.rows();
    Eigen::MatrixXcd U = H.cast<Complex>();
    U.diagonal().array() -= shift;
    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        if (std::abs(U(k + 1, k)) > std::abs(U(k, k))) {
            U.row(k).segment(k, N - k).swap(U.row(k + 1).segment(k, N - k));
            std::swap(b(k), b(k + 1));
        }
        if (U(k, k) == Complex{}) U(k, k) = tiny;
        const Complex m = U(k + 1, k) / U(k, k);
        if (m != Complex{}) {
            U.row(k + 1).segment(k, N - k) -= m * U.row(k).segment(k, N - k);
            b(k + 1) -= m * b(k);
        }
    }
    if (U(N - 1, N - 1) == Complex{}) U(N - 1, N - 1) = tiny;
    for (Eigen::Index k = N - 1; k >= 0; --k) {
        Complex acc = b(k);
        for (Eigen::Index j = k + 1; j < N; ++j) acc -= U(k, j) * b(j);
        b(k) = acc / U(k, k);
    }
    return b;
}

void enforce_conjugate_pairs(std::vector<Complex>& eig, double tol, const std::string& label) {
    std::vector<bool> used(eig.size(), false);
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (used[i] || eig[i].imag() <= 0.0) continue;
        std::size_t best = eig.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < eig.size(); ++k) {
            if (used[k] || k == i || eig[k].imag() >= 0.0) continue;
            const double d = std::abs(eig[k] - std::conj(eig[i]));
            if (d < best_d) best_d = d, best = k;
        }
        if (best == eig.size() || best_d > tol)
            throw NumericalError("conjugate symmetry violated in spectrum of " + label);
        const Complex avg = 0.5 * (eig[i] + std::conj(eig[best]));
        eig[i] = avg;
        eig[best] = std::conj(avg);
        used[i] = used[best] = true;
    }
    for (std::size_t i = 0; i < eig.size(); ++i)
        if (!used[i] && eig[i].imag() < 0.0)
            throw NumericalError("unpaired complex eigenvalue in spectrum of " + label);
}

double eval_cubic(double lambda, double j2, double g2) {
    return ((lambda + j2) * lambda + (j2 + g2)) * lambda + j2 * j2;
}

}  // namespace

SpectrumReport compute_spectrum(const DiscreteDynamic& dyn, double tol) {
    if (!(tol > 0.0 && tol <= 1e-6)) throw std::invalid_argument("compute_spectrum: tol must lie in (0, 1e-6]");
    const Eigen::MatrixXd& A = dyn.matrix;
    const Eigen::Index N = A.rows();
    if (N == 0 || A.cols() != N) throw std::invalid_argument("compute_spectrum: matrix must be square and non-empty");
    const std::string label = dyn.label();
    if (!A.allFinite()) throw NumericalError("non-finite entries in " + label);
    const double normA = A.norm();

    Eigen::MatrixXd B = A;
    const Eigen::VectorXd scale = balance(B);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(B, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("QR iteration did not converge for " + label);

    std::vector<Complex> eig(solver.eigenvalues().begin(), solver.eigenvalues().end());
    enforce_conjugate_pairs(eig, tol * std::max(1.0, normA), label);
    std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
        return std::make_tuple(-a.real(), a.imag()) < std::make_tuple(-b.real(), b.imag());
    });

    // Certificates: one inverse-iteration step on the Hessenberg form.
    Eigen::HessenbergDecomposition<Eigen::MatrixXd> hess(B);
    const Eigen::MatrixXd H = hess.matrixH();
    const Eigen::MatrixXd Q = hess.matrixQ();
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, H.norm());
    const CVector start = CVector::Ones(N);

    SpectrumReport report;
    report.eigenvalues = eig;
    report.residuals.resize(eig.size());
    for (std::size_t k = 0; k < eig.size(); ++k) {
        const CVector x = hessenberg_solve(H, eig[k], start, tiny);
        CVector v = scale.cast<Complex>().asDiagonal() * (Q.cast<Complex>() * x);
        const double vn = v.norm();
        if (!std::isfinite(vn) || vn == 0.0) throw NumericalError("inverse iteration failed for " + label);
        v /= vn;
        const CVector r = A.cast<Complex>() * v - eig[k] * v;
        report.residuals[k] = r.norm() / std::max(normA, std::numeric_limits<double>::min());
    }
    report.max_residual = *std::max_element(report.residuals.begin(), report.residuals.end());
    if (report.max_residual > tol)
        throw NumericalError("eigenvalue certification failed for " + label + ": residual " +
                             std::to_string(report.max_residual) + " exceeds tol");

    report.abscissa = -std::numeric_limits<double>::infinity();
    report.min_distance = std::numeric_limits<double>::infinity();
    for (const auto& l : eig) {
        report.abscissa = std::max(report.abscissa, l.real());
        report.min_distance = std::min(report.min_distance, -l.real());
    }
    report.asymptote_ref = -0.5 * dyn.gamma * dyn.gamma;
    return report;
}

std::array<Complex, 3> mode_cubic_roots(int j, double gamma) {
    if (j < 1) throw std::invalid_argument("mode_cubic_roots: j must be >= 1");
    const double j2 = static_cast<double>(j) * j;
    const double g2 = gamma * gamma;

    // p(-j^2-1) < 0 < p(0) = j^4
    double lo = -j2 - 1.0;
    double hi = 0.0;
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (eval_cubic(mid, j2, g2) < 0.0 ? lo : hi) = mid;
    }
    const double plo = std::abs(eval_cubic(lo, j2, g2));
    const double phi = std::abs(eval_cubic(hi, j2, g2));
    const double r = plo <= phi ? lo : hi;

    // Remaining pair from Vieta: sum = -j^2 - r, product = -j^4 / r.
    const double sum = -j2 - r;
    const double prod = -j2 * j2 / r;
    const double disc = sum * sum - 4.0 * prod;
    std::array<Complex, 3> roots;
    roots[0] = r;
    if (disc < 0.0) {
        const double im = 0.5 * std::sqrt(-disc);
        roots[1] = {0.5 * sum, im};
        roots[2] = {0.5 * sum, -im};
    } else {
        const double q = -0.5 * (-sum + std::copysign(std::sqrt(disc), -sum));
        const double x1 = q;
        const double x2 = q != 0.0 ? prod / q : 0.0;
        roots[1] = x1;
        roots[2] = x2;
    }
    return roots;
}

std::vector<Complex> per_mode_oracle(int n, double gamma) {
    if (n < 1) throw std::invalid_argument("per_mode_oracle: n must be >= 1");
    std::vector<Complex> out;
    out.reserve(3 * static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
        for (const auto& z : mode_cubic_roots(j, gamma)) out.push_back(z);
    return out;
}

MultisetMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("match_multisets: sizes differ");
    std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
    cand.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) cand.emplace_back(std::abs(a[i] - b[k]), i, k);
    std::sort(cand.begin(), cand.end());
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    MultisetMatch m;
    for (const auto& [d, i, k] : cand) {
        if (used_a[i] || used_b[k]) continue;
        used_a[i] = used_b[k] = true;
        m.pairs.emplace_back(i, k);
        m.max_distance = std::max(m.max_distance, d);
        if (m.pairs.size() == a.size()) break;
    }
    return m;
}

std::vector<MinDistanceRow> min_distance_table(SystemId system, double gamma, const std::vector<int>& n_list,
                                               BlockConvention convention, double tol) {
    std::vector<MinDistanceRow> rows(n_list.size());
    parallel_for(n_list.size(), [&](std::size_t i) {
        const ModelParameters params{system, gamma, n_list[i], convention};
        const auto report = compute_spectrum(assemble_dynamic(params), tol);
        rows[i] = {n_list[i], report.min_distance, report.abscissa, report.asymptote_ref};
    });
    return rows;
}

}  // namespace thermowave

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "thermowave/homog.hpp"
#include "thermowave/spectrum.hpp"

using namespace thermowave;

namespace {

CoefficientField field(const char* name, ScalarProfile p) {
    return CoefficientField::scalar(name, p, consistent_alpha(p));
}

// Midpoint-rule harmonic mean on a very fine grid.
double harmonic_reference(const ScalarProfile& a, int N = 1 << 20) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += 1.0 / a((i + 0.5) / N);
    return N / s;
}

}  // namespace

TEST(Mean, Examples) {
    EXPECT_NEAR(mean_value(field("c", ScalarProfile::affine_sine(2, 1))), 2.0, 1e-12);
    EXPECT_DOUBLE_EQ(mean_value(field("c", ScalarProfile::table({1, 3}))), 2.0);
    EXPECT_DOUBLE_EQ(mean_value(CoefficientField::coupling("gamma", ScalarProfile::constant(0.5))), 0.5);
}

TEST(Corrector, ConstantHasZeroCorrector) {
    const auto c = cell_corrector_1d(field("a", ScalarProfile::constant(3)), 256);
    EXPECT_NEAR(c.effective, 3.0, 1e-14);
    for (double m : c.values) EXPECT_NEAR(m, 0.0, 1e-14);
}

TEST(Corrector, CosineHarmonicMean) {
    const auto c = cell_corrector_1d(field("a", ScalarProfile::affine_cos(2, 1)), 1 << 14);
    EXPECT_NEAR(c.effective, std::sqrt(3.0), 1e-8);
    EXPECT_NEAR(harmonic_reference(ScalarProfile::affine_cos(2, 1)), std::sqrt(3.0), 1e-10);
}

TEST(Corrector, PiecewiseHarmonicMean) {
    const auto c = cell_corrector_1d(field("a", ScalarProfile::table({1, 3})), 1 << 14);
    EXPECT_NEAR(c.effective, 1.5, 1e-13);
}

TEST(Corrector, ShapeSolvesCellProblem) {
    const auto a = ScalarProfile::affine_cos(2, 1);
    const std::size_t N = 4096;
    const auto c = cell_corrector_1d(a, N);
    ASSERT_EQ(c.values.size(), N + 1);
    EXPECT_EQ(c.values.front(), c.values.back());
    double mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) mean += c.values[i];
    EXPECT_NEAR(mean / N, 0.0, 1e-14);
    // flux a(1+M') constant and equal to a_hom
    for (std::size_t i = 0; i < N; i += 97) {
        const double slope = (c.values[i + 1] - c.values[i]) * N;
        const double ymid = (i + 0.5) / N;
        EXPECT_NEAR(a(ymid) * (1.0 + slope), c.effective, 1e-6);
    }
}

TEST(Corrector, FemConvergesAtSecondOrder) {
    const auto a = ScalarProfile::affine_cos(2, 1);
    std::vector<double> err;
    for (std::size_t N : {32, 64, 128, 256}) err.push_back(std::abs(cell_corrector_fem_1d(a, N).effective - std::sqrt(3.0)));
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GE(std::log2(err[k - 1] / err[k]), 1.9);
}

TEST(Corrector, FemExactForTables) {
    const auto c = cell_corrector_fem_1d(ScalarProfile::table({1, 3}), 64);
    EXPECT_NEAR(c.effective, 1.5, 1e-12);
}

TEST(Corrector, RejectsInvalidField) {
    EXPECT_THROW(cell_corrector_1d(CoefficientField::scalar("a", ScalarProfile::affine_cos(2, 1), 0.9), 64),
                 std::invalid_argument);
}

TEST(Laminate, Examples) {
    const auto p = ScalarProfile::table({1, 3});
    const auto t = laminate_homogenize(CoefficientField::diagonal("a", p, p, 1.0 / 3.0));
    EXPECT_NEAR(t.diag[0], 1.5, 1e-13);
    EXPECT_NEAR(t.diag[1], 2.0, 1e-13);
    EXPECT_THROW(t.scalar(), std::invalid_argument);

    const auto k = laminate_homogenize(
        CoefficientField::diagonal("a", ScalarProfile::constant(2), ScalarProfile::constant(5), 0.2));
    EXPECT_NEAR(k.diag[0], 2.0, 1e-14);
    EXPECT_NEAR(k.diag[1], 5.0, 1e-14);

    const auto q = ScalarProfile::affine_cos(2, 1);
    const auto c = laminate_homogenize(CoefficientField::diagonal("a", q, q, 1.0 / 3.0));
    EXPECT_NEAR(c.diag[0], std::sqrt(3.0), 1e-8);
    EXPECT_NEAR(c.diag[1], 2.0, 1e-12);
}

TEST(Laminate, RejectsY2Dependence) {
    const auto f = CoefficientField::diagonal("a", ScalarProfile::constant(1), ScalarProfile::affine_cos(2, 1), 1.0 / 3.0,
                                              Axis::y1, Axis::y2);
    EXPECT_THROW(laminate_homogenize(f), std::invalid_argument);
}

TEST(Property, VoigtReussBracketing) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.2, 5.0);
    for (int k = 0; k < 40; ++k) {
        std::vector<double> v(1 + k % 7 + 1);
        for (auto& x : v) x = U(rng);
        const auto p = ScalarProfile::table(v);
        const double ahom = cell_corrector_1d(field("a", p), 1024).effective;
        const double arith = mean_value(p);
        double inv = 0.0;
        for (double x : v) inv += 1.0 / x;
        const double harm = v.size() / inv;
        EXPECT_NEAR(ahom, harm, 1e-12 * harm);
        EXPECT_LT(ahom, arith);
    }
}

TEST(Homogenize, DefaultModel) {
    EpsCoefficients c{field("a", ScalarProfile::affine_cos(2, 1)), field("b", ScalarProfile::table({1, 3})),
                      field("c", ScalarProfile::affine_sine(2, 1)), field("d", ScalarProfile::constant(1)),
                      CoefficientField::coupling("gamma", ScalarProfile::affine_sine(0.5, 0.2))};
    const auto hm = homogenize(c);
    EXPECT_NEAR(hm.a_hom.scalar(), std::sqrt(3.0), 1e-8);
    EXPECT_NEAR(hm.b_hom.scalar(), 1.5, 1e-12);
    EXPECT_NEAR(hm.mean_c, 2.0, 1e-12);
    EXPECT_NEAR(hm.mean_d, 1.0, 1e-14);
    EXPECT_NEAR(hm.mean_gamma, 0.5, 1e-12);
}

TEST(Homogenize, UnitModelMatchesWeakDynamic) {
    const auto hm = constant_model(1, 1, 1, 1, 0.4);
    for (int n : {1, 5, 12}) {
        const auto A0 = assemble_homogenized_spectral(hm, n);
        EXPECT_TRUE(A0.matrix.isApprox(assemble_dynamic({SystemId::weak, 0.4, n}).matrix));
    }
}

TEST(Homogenize, StiffWaveDoublesFrequencies) {
    // a_hom = 4: per-mode polynomial lambda^3 + j^2 lambda^2 + (4 j^2 + g^2) lambda + 4 j^4.
    const double g = 0.5;
    const auto A0 = assemble_homogenized_spectral(constant_model(4, 1, 1, 1, g), 6);
    EXPECT_TRUE(A0.matrix.block(0, 6, 6, 6).isApprox(2.0 * build_D(6)));
    const auto rep = compute_spectrum(A0);
    for (const auto& l : rep.eigenvalues) {
        double best = 1e300;
        for (int j = 1; j <= 6; ++j) {
            const double j2 = j * j;
            best = std::min(best, std::abs(((l + j2) * l + (4 * j2 + g * g)) * l + 4 * j2 * j2) / (j2 * j2));
        }
        EXPECT_LT(best, 1e-10);
    }
}

TEST(Homogenize, TensorRejectedByOneDimensionalAssembly) {
    const auto p = ScalarProfile::table({1, 3});
    EpsCoefficients c{CoefficientField::diagonal("a", p, p, 1.0 / 3.0), field("b", ScalarProfile::constant(1)),
                      field("c", ScalarProfile::constant(1)), field("d", ScalarProfile::constant(1)),
                      CoefficientField::coupling("gamma", ScalarProfile::constant(0.5))};
    const auto hm = homogenize(c);
    EXPECT_EQ(hm.a_hom.rank, TensorRank::diagonal2);
    EXPECT_THROW(assemble_homogenized_dynamic(hm, SpectralDiscretization{8}), std::invalid_argument);
    EXPECT_THROW(assemble_homogenized_dynamic(hm, FiniteDifferenceDiscretization{64}), std::invalid_argument);
}

TEST(Homogenize, FiniteDifferenceVariantMatchesEpsAssembly) {
    const auto hm = constant_model(2, 3, 1.5, 0.5, 0.25);
    const auto op = std::get<EpsOperators>(assemble_homogenized_dynamic(hm, FiniteDifferenceDiscretization{64}));
    const auto direct = assemble_eps_operators(homogenized_problem(hm, 64));
    EXPECT_TRUE(Eigen::MatrixXd(op.stiffness_a).isApprox(Eigen::MatrixXd(direct.stiffness_a)));
    EXPECT_TRUE(op.mass_c.isApprox(direct.mass_c));
    EXPECT_NEAR(op.cell_b(10), 3.0, 1e-13);
}

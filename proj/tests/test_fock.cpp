// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fastgate/fock.hpp"

namespace fastgate {
namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const ComplexMatrix &m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix random_matrix(int d, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = {g(rng), g(rng)};
    return m;
}

// Anti-Hermitian matrix with spectral-ish scale `norm` (Frobenius normalised).
ComplexMatrix random_anti_hermitian(int d, double norm, std::mt19937_64 &rng) {
    const ComplexMatrix m = random_matrix(d, rng);
    ComplexMatrix h = (m - m.adjoint()) / 2.0;
    return h * (norm / h.norm());
}

// exp(M) by scaling to norm < 1/2, a 40-term Taylor series, and squaring back.
ComplexMatrix taylor_exp(const ComplexMatrix &m) {
    int s = 0;
    double n = m.cwiseAbs().colwise().sum().maxCoeff();
    while (n > 0.5) {
        n /= 2.0;
        ++s;
    }
    const ComplexMatrix a = m / std::ldexp(1.0, s);
    ComplexMatrix term = ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix sum = term;
    for (int k = 1; k <= 40; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i)
        sum = sum * sum;
    return sum;
}

TEST(FockBasis, RejectsTooSmall) {
    EXPECT_THROW(FockBasis(1), std::invalid_argument);
    EXPECT_THROW(FockBasis(0), std::invalid_argument);
    EXPECT_EQ(FockBasis(2).dim(), 2);
}

TEST(Ladder, TwoStateHasSingleEntry) {
    const auto [a, adag] = ladder(FockBasis(2));
    EXPECT_EQ(a(0, 1), Complex(1.0));
    EXPECT_EQ(a(0, 0), Complex(0.0));
    EXPECT_EQ(a(1, 0), Complex(0.0));
    EXPECT_EQ(a(1, 1), Complex(0.0));
    EXPECT_EQ(max_abs(adag - a.adjoint()), 0.0);
}

TEST(Ladder, NumberOperatorIsDiagonal) {
    const int d = 12;
    const auto [a, adag] = ladder(FockBasis(d));
    const ComplexMatrix num = adag * a;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            EXPECT_NEAR(std::abs(num(i, j) - Complex(i == j ? i : 0.0)), 0.0, 1e-13);
}

TEST(Ladder, CommutatorMatchesEntrywiseOracle) {
    const int d = 9;
    const auto [a, adag] = ladder(FockBasis(d));
    const ComplexMatrix c = a * adag - adag * a;
    // Direct arithmetic: (a adag)_nn = n + 1 for n < d-1, (adag a)_nn = n.
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double expected = 0.0;
            if (i == j)
                expected = (i < d - 1 ? i + 1.0 : 0.0) - i;
            EXPECT_NEAR(std::abs(c(i, j) - expected), 0.0, 1e-13) << i << "," << j;
        }
    EXPECT_NEAR(c(d - 1, d - 1).real(), -(d - 1.0), 1e-13);
}

TEST(MatrixExp, ZeroIsIdentity) {
    const ComplexMatrix z = ComplexMatrix::Zero(5, 5);
    EXPECT_EQ(max_abs(matrix_exp(z) - ComplexMatrix::Identity(5, 5)), 0.0);
}

TEST(MatrixExp, DiagonalPhases) {
    ComplexVector th(4);
    th << 0.3, -1.7, 12.0, 100.0;
    const ComplexMatrix e = matrix_exp((kI * th).asDiagonal().toDenseMatrix());
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(std::abs(e(k, k) - std::exp(kI * th(k))), 0.0, 1e-12);
}

TEST(MatrixExp, PauliBitFlip) {
    ComplexMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    EXPECT_LT(max_abs(matrix_exp(-kI * (kPi / 2.0) * x) - (-kI * x)), 1e-14);
}

TEST(MatrixExp, RejectsBadInput) {
    EXPECT_THROW(matrix_exp(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(matrix_exp(m), std::invalid_argument);
    m(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(matrix_exp(m), std::invalid_argument);
}

TEST(MatrixExp, AgreesWithTaylorOracle) {
    std::mt19937_64 rng(7);
    for (double norm : {0.01, 0.2, 0.9, 2.0, 5.0, 10.0}) {
        for (int rep = 0; rep < 5; ++rep) {
            const ComplexMatrix h = random_anti_hermitian(8, norm, rng);
            EXPECT_LT(max_abs(matrix_exp(h) - taylor_exp(h)), 1e-10) << "norm " << norm;
        }
    }
}

TEST(MatrixExp, GeneralMatrixAgreesWithTaylorOracle) {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 5; ++rep) {
        const ComplexMatrix m = random_matrix(6, rng) * 0.7;
        const ComplexMatrix ref = taylor_exp(m);
        EXPECT_LT(max_abs(matrix_exp(m) - ref) / max_abs(ref), 1e-12);
    }
}

TEST(MatrixExp, AntiHermitianGivesUnitary) {
    std::mt19937_64 rng(9);
    for (double norm : {0.5, 30.0, 400.0}) {
        const ComplexMatrix h = random_anti_hermitian(40, norm, rng);
        EXPECT_LT(unitarity_defect(matrix_exp(h)), 1e-10) << "norm " << norm;
    }
}

TEST(Displacement, ZeroIsIdentity) {
    const FockBasis b(20);
    EXPECT_LT(max_abs(displacement(0.0, b) - ComplexMatrix::Identity(20, 20)), 1e-15);
}

TEST(Displacement, InversePairOnLowerHalf) {
    const int d = 60;
    const FockBasis b(d);
    const Complex alpha(0.8, -1.1);
    const ComplexMatrix p = displacement(alpha, b) * displacement(-alpha, b);
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    EXPECT_LT(max_abs((p - id).leftCols(d / 2)), 1e-8);
}

TEST(Displacement, VacuumOverlapMatchesPowerSeries) {
    const FockBasis b(80);
    for (Complex alpha : {Complex(0.3, 0.0), Complex(1.0, 1.0), Complex(-1.5, 0.7), Complex(0.0, 2.2)}) {
        const double x = std::norm(alpha) / 2.0;
        // e^{-x} summed term by term.
        double series = 0.0, term = 1.0;
        for (int k = 0; k < 80; ++k) {
            series += term;
            term *= -x / (k + 1);
        }
        const Complex overlap = displacement(alpha, b)(0, 0);
        EXPECT_NEAR(overlap.real(), series, 1e-12);
        EXPECT_NEAR(overlap.imag(), 0.0, 1e-12);
    }
}

TEST(Displacement, ColumnsOrthonormalOnLowerThreeQuarters) {
    const int d = 80;
    const ComplexMatrix dm = displacement(Complex(1.2, -0.4), FockBasis(d));
    const int keep = 3 * d / 4;
    const ComplexMatrix g = dm.leftCols(keep).adjoint() * dm.leftCols(keep);
    EXPECT_LT(max_abs(g - ComplexMatrix::Identity(keep, keep)), 1e-8);
}

TEST(Rotation, IdentityCases) {
    const FockBasis b(15);
    const ComplexMatrix id = ComplexMatrix::Identity(15, 15);
    EXPECT_EQ(max_abs(rotation(0.0, b) - id), 0.0);
    EXPECT_LT(max_abs(rotation(2.0 * kPi, b) - id), 1e-12);
}

TEST(Rotation, Composes) {
    const FockBasis b(25);
    for (auto [t1, t2] : {std::pair{0.4, 1.3}, {-2.0, 7.5}, {100.0, -3.0}})
        EXPECT_LT(max_abs(rotation(t1, b) * rotation(t2, b) - rotation(t1 + t2, b)), 1e-12);
}

TEST(Rotation, ConjugatesCreationOperator) {
    const int d = 16;
    const FockBasis b(d);
    const auto [a, adag] = ladder(b);
    const double theta = 0.77;
    const ComplexMatrix lhs = rotation(theta, b) * adag * rotation(-theta, b);
    const ComplexMatrix rhs = std::exp(-kI * theta) * adag;
    EXPECT_LT(max_abs((lhs - rhs).topLeftCorner(d - 1, d - 1)), 1e-13);
}

TEST(Kron, IdentityBlocks) {
    EXPECT_EQ(max_abs(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)) -
                      ComplexMatrix::Identity(6, 6)),
              0.0);
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    const ComplexMatrix k = kron(z, ComplexMatrix::Identity(3, 3));
    for (int i = 0; i < 6; ++i) {
        ComplexVector e = ComplexVector::Zero(6);
        e(i) = 1.0;
        const ComplexVector out = k * e;
        EXPECT_EQ(out(i), Complex(i < 3 ? 1.0 : -1.0));
    }
}

TEST(Kron, MixedProductOracle) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(2, rng);
        const ComplexMatrix c = random_matrix(2, rng), d = random_matrix(2, rng);
        EXPECT_LT(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)), 1e-12);
    }
}

TEST(Quadrature, ReconstructsPositionOperator) {
    const int d = 40;
    const FockBasis b(d);
    const auto [a, adag] = ladder(b);
    const QuadratureBasis q = quadrature_basis(b);
    const RealMatrix x = q.vectors * q.values.asDiagonal() * q.vectors.transpose();
    EXPECT_LT(max_abs(x.cast<Complex>() - (a + adag)), 1e-11);
    EXPECT_LT((q.vectors.transpose() * q.vectors - RealMatrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quadrature, FunctionMatchesMatrixExp) {
    const FockBasis b(30);
    const auto [a, adag] = ladder(b);
    const double k = 0.37;
    const ComplexMatrix direct = matrix_exp(kI * k * (a + adag));
    const ComplexMatrix spectral =
        quadrature_function(quadrature_basis(b), [&](double x) { return std::exp(kI * k * x); });
    EXPECT_LT(max_abs(direct - spectral), 1e-11);
}

TEST(Quadrature, CacheReturnsSharedInstance) {
    const auto p1 = cached_quadrature_basis(FockBasis(33));
    const auto p2 = cached_quadrature_basis(FockBasis(33));
    EXPECT_EQ(p1.get(), p2.get());
    EXPECT_NE(p1.get(), cached_quadrature_basis(FockBasis(34)).get());
}

TEST(UnitarityDefect, BlockRestriction) {
    const int d = 30;
    ComplexMatrix m = displacement(Complex(0.9, 0.0), FockBasis(d));
    m.col(d - 1) *= 0.5; // damage only the top of the basis
    const ComplexMatrix full = kron(ComplexMatrix::Identity(2, 2), m);
    EXPECT_GT(unitarity_defect(full), 0.1);
    EXPECT_LT(unitarity_defect_on_block(full, d, d / 2), 1e-12);
}

} // namespace
} // namespace fastgate

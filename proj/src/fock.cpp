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

#include "fastgate/fock.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace fastgate {

FockBasis::FockBasis(int dim) : dim_(dim) {
    if (dim < 2)
        throw std::invalid_argument("FockBasis: dim must be >= 2, got " + std::to_string(dim));
}

LadderOperators ladder(const FockBasis &basis) {
    const int d = basis.dim();
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    for (int n = 1; n < d; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    ComplexMatrix adag = a.adjoint();
    return {std::move(a), std::move(adag)};
}

namespace {

// Pade coefficients b_0..b_m and the 1-norm thresholds theta_m from
// Higham, "The scaling and squaring method for the matrix exponential revisited".
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const ComplexMatrix &m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Fills u (odd part) and v (even part) so that r = (v - u)^{-1} (v + u).
template <std::size_t N>
void pade_low(const ComplexMatrix &a, const std::array<double, N> &b, ComplexMatrix &u,
              ComplexMatrix &v) {
    const Eigen::Index d = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix a2 = a * a;
    ComplexMatrix power = id;
    ComplexMatrix odd = b[1] * id;
    ComplexMatrix even = b[0] * id;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        even += b[k] * power;
        odd += b[k + 1] * power;
    }
    u = a * odd;
    v = std::move(even);
}

void pade13(const ComplexMatrix &a, ComplexMatrix &u, ComplexMatrix &v) {
    const auto &b = kPade13;
    const Eigen::Index d = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    ComplexMatrix inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    u = a * (a6 * inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    v = a6 * inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

} // namespace

ComplexMatrix matrix_exp(const ComplexMatrix &m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("matrix_exp: matrix is not square");
    if (!m.allFinite())
        throw std::invalid_argument("matrix_exp: matrix has non-finite entries");
    const Eigen::Index d = m.rows();
    if (d == 0)
        return m;

    const double norm = one_norm(m);
    ComplexMatrix u, v;
    int squarings = 0;
    if (norm <= kTheta3) {
        pade_low(m, kPade3, u, v);
    } else if (norm <= kTheta5) {
        pade_low(m, kPade5, u, v);
    } else if (norm <= kTheta7) {
        pade_low(m, kPade7, u, v);
    } else if (norm <= kTheta9) {
        pade_low(m, kPade9, u, v);
    } else {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
        const ComplexMatrix scaled = m / std::ldexp(1.0, squarings);
        pade13(scaled, u, v);
    }
    ComplexMatrix result = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k)
        result = result * result;
    return result;
}

ComplexMatrix displacement(Complex alpha, const FockBasis &basis) {
    const auto [a, adag] = ladder(basis);
    return matrix_exp(alpha * adag - std::conj(alpha) * a);
}

ComplexMatrix rotation(double theta, const FockBasis &basis) {
    const int d = basis.dim();
    ComplexVector diag(d);
    for (int n = 0; n < d; ++n)
        diag(n) = std::exp(-kI * (theta * n));
    return diag.asDiagonal();
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double unitarity_defect(const ComplexMatrix &m) {
    const ComplexMatrix g = m.adjoint() * m - ComplexMatrix::Identity(m.cols(), m.cols());
    return g.cwiseAbs().maxCoeff();
}

double unitarity_defect_on_block(const ComplexMatrix &m, int dim, int block) {
    const ComplexMatrix g = m.adjoint() * m - ComplexMatrix::Identity(m.cols(), m.cols());
    const int sectors = static_cast<int>(m.cols()) / dim;
    double worst = 0.0;
    for (int si = 0; si < sectors; ++si)
        for (int sj = 0; sj < sectors; ++sj)
            worst = std::max(worst, g.block(si * dim, sj * dim, block, block).cwiseAbs().maxCoeff());
    return worst;
}

QuadratureBasis quadrature_basis(const FockBasis &basis) {
    const int d = basis.dim();
    RealVector diag = RealVector::Zero(d);
    RealVector sub(d - 1);
    for (int n = 1; n < d; ++n)
        sub(n - 1) = std::sqrt(static_cast<double>(n));
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("quadrature_basis: eigen decomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

std::shared_ptr<const QuadratureBasis> cached_quadrature_basis(const FockBasis &basis) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const QuadratureBasis>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(basis.dim()); it != cache.end())
            return it->second;
    }
    auto computed = std::make_shared<const QuadratureBasis>(quadrature_basis(basis));
    std::lock_guard lock(mutex);
    return cache.try_emplace(basis.dim(), std::move(computed)).first->second;
}

} // namespace fastgate

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

#ifndef FASTGATE_FOCK_HPP
#define FASTGATE_FOCK_HPP

#include <complex>
#include <memory>

#include <Eigen/Dense>

namespace fastgate {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Truncated number basis |0>, ..., |dim-1>.
class FockBasis {
  public:
    explicit FockBasis(int dim);

    int dim() const { return dim_; }

    bool operator==(const FockBasis &) const = default;

  private:
    int dim_;
};

struct LadderOperators {
    ComplexMatrix a;
    ComplexMatrix adag;
};

/// Annihilation and creation operators on the truncated basis.
LadderOperators ladder(const FockBasis &basis);

/// exp(M) by scaling and squaring with diagonal Pade approximants (orders 3..13).
/// Throws std::invalid_argument for non-square or non-finite input.
ComplexMatrix matrix_exp(const ComplexMatrix &m);

/// exp(alpha a^dag - conj(alpha) a), exponentiated on the truncated basis.
ComplexMatrix displacement(Complex alpha, const FockBasis &basis);

/// diag(exp(-i theta n)).
ComplexMatrix rotation(double theta, const FockBasis &basis);

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// max_ij |(M^dag M - I)_ij|.
double unitarity_defect(const ComplexMatrix &m);

/// max_ij |(M^dag M - I)_ij| restricted to the leading `block` rows/cols of
/// every internal sub-block of size `dim` (the non-truncated part).
double unitarity_defect_on_block(const ComplexMatrix &m, int dim, int block);

/// Spectral decomposition of the truncated quadrature X = a + a^dag.
///
/// Every operator that depends on the motion only through a function of X
/// (momentum kicks, e^{i z k x}) is diagonal in this basis. `vectors` is real
/// orthogonal with X = vectors * diag(values) * vectors^T.
struct QuadratureBasis {
    RealVector values;
    RealMatrix vectors;
};

QuadratureBasis quadrature_basis(const FockBasis &basis);

/// Process-wide cache of quadrature_basis results keyed by dim. Thread-safe.
std::shared_ptr<const QuadratureBasis> cached_quadrature_basis(const FockBasis &basis);

/// f(X) for a scalar function evaluated on the quadrature spectrum.
template <typename F> ComplexMatrix quadrature_function(const QuadratureBasis &q, F &&f) {
    const Eigen::Index d = q.values.size();
    ComplexVector diag(d);
    for (Eigen::Index j = 0; j < d; ++j)
        diag(j) = f(q.values(j));
    ComplexMatrix v = q.vectors.cast<Complex>();
    return v * diag.asDiagonal() * v.transpose();
}

} // namespace fastgate

#endif

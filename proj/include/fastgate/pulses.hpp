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

#ifndef FASTGATE_PULSES_HPP
#define FASTGATE_PULSES_HPP

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "fastgate/fock.hpp"
#include "fastgate/ion_chain.hpp"

namespace fastgate {

/// Two-ion internal basis. Index = 2 * ion1 + ion2 with e = 0, g = 1, so the
/// state vector layout is internal-major: index = internal * dim + n.
enum class InternalState { ee = 0, eg = 1, ge = 2, gg = 3 };

inline constexpr std::array<InternalState, 4> kInternalStates = {InternalState::ee, InternalState::eg,
                                                                  InternalState::ge, InternalState::gg};

std::string_view to_string(InternalState s);
InternalState parse_internal_state(std::string_view text);

/// Pauli-Z eigenvalue of ion `ion` (0 or 1): +1 for e, -1 for g.
int pauli_z(InternalState s, int ion);

struct IdealPulses {};

/// Finite square pulses without the rotating-wave approximation.
struct NonRwaPulses {
    double tau;      ///< pulse duration (s)
    double phi;      ///< optical phase (rad)
    double omega_at; ///< atomic transition angular frequency (rad/s)
};

/// Square pulses of area xi * pi under the rotating-wave approximation, phi = 0.
struct PulseAreaError {
    double xi;
};

using ErrorModel = std::variant<IdealPulses, NonRwaPulses, PulseAreaError>;

/// Throws std::invalid_argument if the model parameters are out of range.
void validate(const ErrorModel &model);

std::string describe(const ErrorModel &model);

/// Thrown when population reaches the top of the truncated number basis.
class TruncationOverflow : public std::runtime_error {
  public:
    TruncationOverflow(const std::string &what, double tail_population)
        : std::runtime_error(what), tail_population_(tail_population) {}
    double tail_population() const { return tail_population_; }

  private:
    double tail_population_;
};

inline constexpr double kTailTolerance = 1e-8;

/// Population in the top 10% of each internal block of a state vector.
double tail_population(const ComplexVector &state, int dim);

/// Single motional mode joined to the two-ion internal space.
///
/// kx(i) = b_i eta (a + a^dag) for gate ion i in {0, 1}.
class SectorSpace {
  public:
    SectorSpace(ModeData mode, FockBasis basis, int ion_a = 0, int ion_b = 1);

    const ModeData &mode() const { return mode_; }
    const FockBasis &basis() const { return basis_; }
    int dim() const { return basis_.dim(); }
    int total_dim() const { return 4 * basis_.dim(); }

    /// Coupling of gate ion i (0 or 1) to this mode.
    double coupling(int ion) const { return coupling_[ion]; }

    /// Dense kx matrix, built on demand (Hermitian).
    ComplexMatrix kx(int ion) const;
    const QuadratureBasis &quadrature() const { return *quadrature_; }

  private:
    ModeData mode_;
    FockBasis basis_;
    std::array<double, 2> coupling_;
    std::shared_ptr<const QuadratureBasis> quadrature_;
};

// Full-matrix pulse operators on the internal x motional space (4 dim square).
// These are built directly by exponentiating the generators and serve as the
// reference for the propagator used by the gate simulator.

/// Free motion: exp(-i nu_p dt a^dag a) on the motion, identity on the ions.
ComplexMatrix free_evolution(const SectorSpace &space, double dt);

/// |z| ideal pulse pairs with first-pulse direction sign(z): per internal
/// state, displacement(-2i sign(z) (b1 s1 + b2 s2) eta) applied |z| times.
/// Throws TruncationOverflow if any |n> with n <= n_check leaks more than
/// kTailTolerance into the top 10% of the basis.
ComplexMatrix ideal_kick(const SectorSpace &space, int z, int n_check = 0);

/// One non-RWA pulse of direction +-1 starting at absolute time t_start.
ComplexMatrix nonrwa_pulse(const SectorSpace &space, int direction, double t_start,
                           const NonRwaPulses &model);

/// Two-ion pulse of area xi pi, direction +-1.
ComplexMatrix two_ion_pulse_xi(const SectorSpace &space, int direction, double xi, double phi = 0.0);

/// Counter-propagating pair: two_ion_pulse_xi(-z_dir) * two_ion_pulse_xi(z_dir).
ComplexMatrix pair_pulse_xi(const SectorSpace &space, int z_dir, const PulseAreaError &model);

/// Closed-form single-ion pair matrix in {e, g} for a c-number kx.
std::array<std::array<Complex, 2>, 2> pair_matrix_closed_form(int z, double xi, double kx, double phi);

/// Worst-case single-qubit overlap between an ideal pi pulse and a xi pi pulse,
/// minimized numerically over the Bloch sphere.
double rotation_fidelity(double xi);

/// 1 - (1 - xi)^2 pi^2 / 4.
double rotation_fidelity_approx(double xi);

/// Pulse-area fraction xi <= 1 whose rotation infidelity equals `infidelity`.
double xi_for_rotation_infidelity(double infidelity);

} // namespace fastgate

#endif

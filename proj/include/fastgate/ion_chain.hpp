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

#ifndef FASTGATE_ION_CHAIN_HPP
#define FASTGATE_ION_CHAIN_HPP

#include <vector>

namespace fastgate {

namespace constants {
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27; // kg
inline constexpr double kElectronMass = 9.1093837015e-31;    // kg
} // namespace constants

/// Trap, laser and crystal parameters. Frequencies are angular (rad/s).
struct TrapConfig {
    double nu;         ///< axial trap frequency
    double mass;       ///< ion mass (kg)
    double wavenumber; ///< laser wavenumber k (1/m)
    double omega_at;   ///< atomic transition frequency
    double detuning = 0.0;
    int num_ions = 2;

    /// 40Ca+, 393 nm, nu = 2 pi x 1 MHz, omega_at = 2 pi x 1e15 rad/s.
    static TrapConfig calcium40();

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct ModeData {
    double nu_p;           ///< mode angular frequency
    std::vector<double> b; ///< ion-mode coupling vector, unit norm
    double eta;            ///< Lamb-Dicke parameter
};

/// eta = k sqrt(hbar / (2 M nu_p)).
double lamb_dicke(const TrapConfig &config, double nu_p);

struct TwoIonModes {
    ModeData com;
    ModeData stretch;
};

/// Closed-form axial modes of a two-ion crystal: nu and sqrt(3) nu.
TwoIonModes two_ion_modes(const TrapConfig &config);

/// Dimensionless equilibrium positions of an L-ion axial chain, in units of
/// (e^2 / (4 pi eps0 M nu^2))^(1/3), sorted ascending. Solved by damped Newton.
std::vector<double> equilibrium_positions(int num_ions);

/// Axial normal modes of an L-ion chain, ascending in frequency. Each coupling
/// vector is unit norm with its first nonzero component made non-negative.
std::vector<ModeData> chain_modes(const TrapConfig &config);

} // namespace fastgate

#endif

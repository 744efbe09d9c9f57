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

#ifndef FASTGATE_GATESIM_HPP
#define FASTGATE_GATESIM_HPP

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fastgate/fock.hpp"
#include "fastgate/ion_chain.hpp"
#include "fastgate/pulses.hpp"
#include "fastgate/schemes.hpp"

namespace fastgate {

/// Number-basis size used for a scheme multiplier n: 50 (n = 1), 70 (n <= 5), 130 otherwise.
int default_basis_dim(int n);

/// Upper bound for the adaptive basis search.
inline constexpr int kMaxBasisDim = 4096;

/// Basis size after one failed attempt: 5/4 of the previous size rounded up to a multiple of 10.
int grown_basis_dim(int dim);

/// Same-state sectors (gg, ee) or opposite-state sectors (ge, eg).
enum class Sector { same, opposite };

Sector sector_of(InternalState s);

struct SimulationRequest {
    PulseScheme scheme;
    TrapConfig trap = TrapConfig::calcium40();
    ErrorModel error_model = IdealPulses{};
    std::vector<int> n_init = {0, 0}; ///< initial number state per mode
    bool snapshots = false;
    std::optional<int> basis_dim;     ///< fixed size; disables the adaptive search
    int max_basis_dim = kMaxBasisDim;
};

struct SectorResult {
    InternalState initial = InternalState::gg;
    Sector sector = Sector::same;
    ModeData mode;
    int n_init = 0;
    int dim = 0;
    Complex amplitude;               ///< <s n|U|s n>
    ComplexVector final_state;       ///< internal-major, index = internal * dim + n
    std::vector<ComplexVector> snapshots;
    double max_tail_population = 0.0;
};

/// Folds [free, kick_1, free, ..., kick_6, free] over the scheme for one mode,
/// starting from |initial> (x) |n_init>. The leading and trailing free segments
/// have zero length. Snapshots (when requested) are taken after every one of
/// the 13 events. Throws TruncationOverflow if the top 10% of the basis holds
/// more than kTailTolerance population after any event.
SectorResult simulate_sector(const PulseScheme &scheme, const ErrorModel &model, const ModeData &mode,
                             InternalState initial, int n_init, int basis_dim, bool snapshots = false,
                             int ion_a = 0, int ion_b = 1);

/// Smallest adaptive starting size for a sector: at least default_basis_dim(n),
/// enlarged when the classical displacement envelope plus the initial number
/// state would already reach the top 10% of that basis.
int initial_basis_dim(const PulseScheme &scheme, const ModeData &mode, InternalState initial, int n_init,
                      int ion_a = 0, int ion_b = 1);

/// simulate_sector with a fixed size when `basis_dim` is set; otherwise starts
/// at initial_basis_dim and grows with grown_basis_dim on TruncationOverflow
/// until the run passes or max_dim is exceeded (then the last overflow is rethrown).
SectorResult simulate_sector_adaptive(const PulseScheme &scheme, const ErrorModel &model, const ModeData &mode,
                                      InternalState initial, int n_init, std::optional<int> basis_dim,
                                      bool snapshots = false, int ion_a = 0, int ion_b = 1,
                                      int max_dim = kMaxBasisDim);

/// Two-ion convenience: same-state sectors run on the COM mode, opposite-state
/// sectors on the stretch mode.
SectorResult simulate_sector(const SimulationRequest &req, InternalState initial);

/// Closed-form average over Haar-random two-qubit inputs:
/// F = 3/10 (|A'|^2 + |B'|^2) + 2/5 Re(A' conj(B')).
double average_fidelity(Complex a_prime, Complex b_prime);

/// Removes the free-evolution and ideal-gate phases from the sector amplitudes
/// (A' = e^{i(nu_c T_G n_c - pi/4)} A, B' = e^{i(nu_r T_G n_r + pi/4)} B) and
/// returns the state-averaged fidelity.
double state_averaged_fidelity(Complex a, Complex b, const PulseScheme &scheme, const TwoIonModes &modes,
                               std::span<const int> n_init);

struct OccupationStats {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and standard deviation of the phonon number, traced over the ions.
OccupationStats mode_occupation_stats(const SectorResult &result);
OccupationStats occupation_stats(const ComplexVector &state, int dim);

using PopulationMap = std::map<InternalState, std::vector<double>>;

PopulationMap populations(const SectorResult &result);
PopulationMap populations(const ComplexVector &state, int dim);

struct GateReport {
    double fidelity = 0.0;
    Complex same_amplitude;
    Complex opposite_amplitude;
    OccupationStats same_occupation;     ///< COM, from |gg>
    OccupationStats opposite_occupation; ///< stretch, from |ge>
    PopulationMap populations;           ///< from the same-state run
    double gate_time = 0.0;
    int same_dim = 0;     ///< basis size used for the same-state sector
    int opposite_dim = 0; ///< basis size used for the opposite-state sector
};

/// Runs the gg (COM) and ge (stretch) sectors and the state-averaged fidelity.
GateReport run_gate(const SimulationRequest &req);

struct ModeAmplitudes {
    ModeData mode;
    Complex same;     ///< <gg n_p|U_p|gg n_p>
    Complex opposite; ///< <ge n_p|U_p|ge n_p>
    int n_init = 0;
    double ideal_phase = 0.0; ///< phi_p
};

/// Product of per-mode sector amplitudes with each mode's free-evolution phase
/// and ideal phase e^{i phi_p sz sz} removed, averaged as for two ions.
double multimode_fidelity(std::span<const ModeAmplitudes> modes, const PulseScheme &scheme);

/// Simulates both sectors on every mode of an L-ion chain (gate ions ion_a,
/// ion_b) and returns the per-mode amplitudes for multimode_fidelity.
std::vector<ModeAmplitudes> multimode_amplitudes(const PulseScheme &scheme, const ErrorModel &model,
                                                 std::span<const ModeData> modes, std::span<const int> n_init,
                                                 std::optional<int> basis_dim = std::nullopt, int ion_a = 0,
                                                 int ion_b = 1);

/// Classical centre of a coherent state through the gate: alternating free
/// rotation alpha -> alpha e^{-i nu_p dt} and kicks alpha -> alpha - 2 i z
/// (b_a s_a + b_b s_b) eta. Returns alpha after each of the 13 events.
std::vector<Complex> phase_space_trajectory(const PulseScheme &scheme, const ModeData &mode,
                                            InternalState internal, Complex alpha0, int ion_a = 0,
                                            int ion_b = 1);

} // namespace fastgate

#endif

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

#ifndef FASTGATE_SCHEMES_HPP
#define FASTGATE_SCHEMES_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fastgate/ion_chain.hpp"

namespace fastgate {

enum class SchemeKind { FRAG, GZC };

std::string_view to_string(SchemeKind kind);
/// Accepts "frag"/"gzc" in any case. Throws std::invalid_argument otherwise.
SchemeKind parse_scheme_kind(std::string_view text);

inline constexpr int kKickEvents = 6;

/// Six antisymmetric kick events: z[k] pulse pairs at time t[k].
///
/// The sign of z[k] is the direction of the first pulse of each pair. Times are
/// centred on zero: t = (-tau1, -tau2, -tau3, tau3, tau2, tau1).
struct PulseScheme {
    SchemeKind kind = SchemeKind::GZC;
    int n = 1;
    std::array<int, kKickEvents> z{};
    std::array<double, kKickEvents> t{};
    double gate_time = 0.0;
    /// Closure residual per mode followed by the phase residual.
    std::vector<double> residuals;

    /// (tau1, tau2, tau3)
    std::array<double, 3> half_times() const { return {t[5], t[4], t[3]}; }
};

std::array<int, kKickEvents> kick_vector(SchemeKind kind, int n);

/// Builds a scheme with the given (tau1, tau2, tau3); no solving.
PulseScheme make_scheme(SchemeKind kind, int n, const std::array<double, 3> &taus);

/// Thrown when no timing root is found in the search window.
class NoSolution : public std::runtime_error {
  public:
    NoSolution(const std::string &what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

  private:
    double best_residual_;
};

struct SchemeSearchOptions {
    int grid_points = 200;          ///< per tau axis
    double window_periods = 1.5;    ///< tau1 < window_periods * 2 pi / nu_ref
    double max_residual = 1e-10;    ///< acceptance threshold on every residual
    int gate_ion_a = 0;
    int gate_ion_b = 1;
    /// Return the ordered candidate with the smallest residual even if it
    /// misses max_residual (overdetermined systems, more than two active modes).
    bool least_squares = false;
};

/// Solves the timing conditions: phase-space closure of every mode that couples
/// to the gate ions, and a total sigma_z sigma_z phase of pi/4. With more than
/// two such modes the system is overdetermined and is solved in least squares;
/// the result is accepted only if every residual is below `max_residual`.
/// Among accepted roots the one with the smallest tau1 is returned.
PulseScheme build_scheme(SchemeKind kind, int n, std::span<const ModeData> modes,
                         const SchemeSearchOptions &options = {});

/// Coefficient of sigma_1^z sigma_2^z accumulated through `mode`.
double ideal_phase(const PulseScheme &scheme, const ModeData &mode, int ion_a = 0,
                   int ion_b = 1);

/// sum_k |z_k|: 10n for FRAG, 14n for GZC.
int total_pulse_pairs(const PulseScheme &scheme);

/// sum_{j=1..3} z_j sin(nu tau_j) for the first three events.
double closure_residual(const PulseScheme &scheme, double nu);

/// Residual vector (closures, then phase) for the given modes.
std::vector<double> scheme_residuals(const PulseScheme &scheme, std::span<const ModeData> modes,
                                     int ion_a = 0, int ion_b = 1);

} // namespace fastgate

#endif

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

#include "fastgate/gatesim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastgate/propagator.hpp"

namespace fastgate {

using constants::kPi;

int default_basis_dim(int n) {
    if (n <= 1)
        return 50;
    if (n <= 5)
        return 70;
    return 130;
}

int grown_basis_dim(int dim) { return (dim * 5 / 4 + 9) / 10 * 10; }

int initial_basis_dim(const PulseScheme &scheme, const ModeData &mode, InternalState initial, int n_init,
                      int ion_a, int ion_b) {
    double reach = 0.0;
    for (Complex a : phase_space_trajectory(scheme, mode, initial, 0.0, ion_a, ion_b))
        reach = std::max(reach, std::abs(a));
    // Number-state width sqrt(n) plus a few standard deviations of vacuum noise.
    const double r = reach + std::sqrt(static_cast<double>(n_init)) + 3.0;
    const int envelope = static_cast<int>(std::ceil(r * r / 0.9));
    return std::max({default_basis_dim(scheme.n), envelope, 4 * n_init + 10});
}

SectorResult simulate_sector_adaptive(const PulseScheme &scheme, const ErrorModel &model, const ModeData &mode,
                                      InternalState initial, int n_init, std::optional<int> basis_dim,
                                      bool snapshots, int ion_a, int ion_b, int max_dim) {
    if (basis_dim)
        return simulate_sector(scheme, model, mode, initial, n_init, *basis_dim, snapshots, ion_a, ion_b);
    int dim = initial_basis_dim(scheme, mode, initial, n_init, ion_a, ion_b);
    while (true) {
        try {
            return simulate_sector(scheme, model, mode, initial, n_init, dim, snapshots, ion_a, ion_b);
        } catch (const TruncationOverflow &) {
            if (grown_basis_dim(dim) > max_dim)
                throw;
            dim = grown_basis_dim(dim);
        }
    }
}

Sector sector_of(InternalState s) {
    return (s == InternalState::gg || s == InternalState::ee) ? Sector::same : Sector::opposite;
}

SectorResult simulate_sector(const PulseScheme &scheme, const ErrorModel &model, const ModeData &mode,
                             InternalState initial, int n_init, int basis_dim, bool snapshots, int ion_a,
                             int ion_b) {
    validate(model);
    if (n_init < 0 || 4 * n_init >= basis_dim)
        throw std::invalid_argument("simulate_sector: initial number state " + std::to_string(n_init) +
                                    " needs a basis larger than " + std::to_string(basis_dim));
    const SectorPropagator prop(SectorSpace(mode, FockBasis(basis_dim), ion_a, ion_b));
    const int d = basis_dim;
    const int start = static_cast<int>(initial) * d + n_init;

    SectorResult result;
    result.initial = initial;
    result.sector = sector_of(initial);
    result.mode = mode;
    result.n_init = n_init;
    result.dim = d;
    ComplexVector state = ComplexVector::Zero(4 * d);
    state(start) = 1.0;

    int event = 0;
    auto after_event = [&]() {
        const double tail = tail_population(state, d);
        result.max_tail_population = std::max(result.max_tail_population, tail);
        if (tail > kTailTolerance)
            throw TruncationOverflow("simulate_sector: " + std::to_string(tail) +
                                         " population in the top 10% of a " + std::to_string(d) +
                                         "-state basis after event " + std::to_string(event) + " (" +
                                         describe(model) + "); increase the basis size",
                                     tail);
        if (snapshots)
            result.snapshots.push_back(state);
        ++event;
    };

    prop.free_evolve(state, 0.0);
    after_event();
    for (int k = 0; k < kKickEvents; ++k) {
        prop.kick_event(state, scheme.z[k], scheme.t[k], model);
        after_event();
        const double dt = k + 1 < kKickEvents ? scheme.t[k + 1] - scheme.t[k] : 0.0;
        prop.free_evolve(state, dt);
        after_event();
    }
    result.amplitude = state(start);
    result.final_state = std::move(state);
    return result;
}

SectorResult simulate_sector(const SimulationRequest &req, InternalState initial) {
    const TwoIonModes modes = two_ion_modes(req.trap);
    if (req.n_init.size() != 2)
        throw std::invalid_argument("simulate_sector: two-ion request needs (n_c, n_r)");
    const bool same = sector_of(initial) == Sector::same;
    return simulate_sector_adaptive(req.scheme, req.error_model, same ? modes.com : modes.stretch, initial,
                                    req.n_init[same ? 0 : 1], req.basis_dim, req.snapshots, 0, 1,
                                    req.max_basis_dim);
}

double average_fidelity(Complex a_prime, Complex b_prime) {
    return 0.3 * (std::norm(a_prime) + std::norm(b_prime)) + 0.4 * std::real(a_prime * std::conj(b_prime));
}

double state_averaged_fidelity(Complex a, Complex b, const PulseScheme &scheme, const TwoIonModes &modes,
                               std::span<const int> n_init) {
    const double tg = scheme.gate_time;
    const Complex ap = std::exp(kI * (modes.com.nu_p * tg * n_init[0] - kPi / 4.0)) * a;
    const Complex bp = std::exp(kI * (modes.stretch.nu_p * tg * n_init[1] + kPi / 4.0)) * b;
    return average_fidelity(ap, bp);
}

OccupationStats occupation_stats(const ComplexVector &state, int dim) {
    double m1 = 0.0, m2 = 0.0;
    for (int s = 0; s < 4; ++s)
        for (int n = 0; n < dim; ++n) {
            const double p = std::norm(state(s * dim + n));
            m1 += n * p;
            m2 += static_cast<double>(n) * n * p;
        }
    return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

OccupationStats mode_occupation_stats(const SectorResult &result) {
    return occupation_stats(result.final_state, result.dim);
}

PopulationMap populations(const ComplexVector &state, int dim) {
    PopulationMap out;
    for (InternalState s : kInternalStates) {
        std::vector<double> p(dim);
        for (int n = 0; n < dim; ++n)
            p[n] = std::norm(state(static_cast<int>(s) * dim + n));
        out.emplace(s, std::move(p));
    }
    return out;
}

PopulationMap populations(const SectorResult &result) { return populations(result.final_state, result.dim); }

GateReport run_gate(const SimulationRequest &req) {
    const TwoIonModes modes = two_ion_modes(req.trap);
    const SectorResult same = simulate_sector(req, InternalState::gg);
    const SectorResult opposite = simulate_sector(req, InternalState::ge);
    GateReport report;
    report.same_amplitude = same.amplitude;
    report.opposite_amplitude = opposite.amplitude;
    report.fidelity = state_averaged_fidelity(same.amplitude, opposite.amplitude, req.scheme, modes, req.n_init);
    report.same_occupation = mode_occupation_stats(same);
    report.opposite_occupation = mode_occupation_stats(opposite);
    report.populations = populations(same);
    report.gate_time = req.scheme.gate_time;
    report.same_dim = same.dim;
    report.opposite_dim = opposite.dim;
    return report;
}

double multimode_fidelity(std::span<const ModeAmplitudes> modes, const PulseScheme &scheme) {
    Complex ap = 1.0, bp = 1.0;
    for (const auto &m : modes) {
        const Complex free = std::exp(kI * (m.mode.nu_p * scheme.gate_time * m.n_init));
        ap *= free * std::exp(-kI * m.ideal_phase) * m.same;
        bp *= free * std::exp(kI * m.ideal_phase) * m.opposite;
    }
    return average_fidelity(ap, bp);
}

std::vector<ModeAmplitudes> multimode_amplitudes(const PulseScheme &scheme, const ErrorModel &model,
                                                 std::span<const ModeData> modes, std::span<const int> n_init,
                                                 std::optional<int> basis_dim, int ion_a, int ion_b) {
    if (n_init.size() != modes.size())
        throw std::invalid_argument("multimode_amplitudes: one initial number state per mode required");
    std::vector<ModeAmplitudes> out;
    for (std::size_t p = 0; p < modes.size(); ++p) {
        const SectorResult same = simulate_sector_adaptive(scheme, model, modes[p], InternalState::gg, n_init[p],
                                                           basis_dim, false, ion_a, ion_b);
        const SectorResult opposite = simulate_sector_adaptive(scheme, model, modes[p], InternalState::ge,
                                                               n_init[p], basis_dim, false, ion_a, ion_b);
        out.push_back({modes[p], same.amplitude, opposite.amplitude, n_init[p],
                       ideal_phase(scheme, modes[p], ion_a, ion_b)});
    }
    return out;
}

std::vector<Complex> phase_space_trajectory(const PulseScheme &scheme, const ModeData &mode,
                                            InternalState internal, Complex alpha0, int ion_a, int ion_b) {
    const double w = mode.b.at(ion_a) * pauli_z(internal, 0) + mode.b.at(ion_b) * pauli_z(internal, 1);
    std::vector<Complex> out;
    out.reserve(2 * kKickEvents + 1);
    Complex alpha = alpha0;
    out.push_back(alpha);
    for (int k = 0; k < kKickEvents; ++k) {
        alpha += -2.0 * kI * static_cast<double>(scheme.z[k]) * w * mode.eta;
        out.push_back(alpha);
        const double dt = k + 1 < kKickEvents ? scheme.t[k + 1] - scheme.t[k] : 0.0;
        alpha *= std::exp(-kI * (mode.nu_p * dt));
        out.push_back(alpha);
    }
    return out;
}

} // namespace fastgate

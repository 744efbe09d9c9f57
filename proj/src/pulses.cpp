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

#include "fastgate/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fastgate/propagator.hpp"

namespace fastgate {

using constants::kPi;

std::string_view to_string(InternalState s) {
    switch (s) {
    case InternalState::ee:
        return "ee";
    case InternalState::eg:
        return "eg";
    case InternalState::ge:
        return "ge";
    case InternalState::gg:
        return "gg";
    }
    return "??";
}

InternalState parse_internal_state(std::string_view text) {
    for (InternalState s : kInternalStates)
        if (text == to_string(s))
            return s;
    throw std::invalid_argument("unknown internal state '" + std::string(text) + "'");
}

int pauli_z(InternalState s, int ion) {
    const int bits = static_cast<int>(s);
    const int level = ion == 0 ? (bits >> 1) & 1 : bits & 1;
    return level == 0 ? 1 : -1;
}

void validate(const ErrorModel &model) {
    if (const auto *m = std::get_if<NonRwaPulses>(&model)) {
        if (!(m->tau > 0.0))
            throw std::invalid_argument("NonRWA model: pulse duration must be positive");
        if (!(m->omega_at > 0.0))
            throw std::invalid_argument("NonRWA model: omega_at must be positive");
    } else if (const auto *m = std::get_if<PulseAreaError>(&model)) {
        if (!(m->xi > 0.0 && m->xi <= 1.05))
            throw std::invalid_argument("PulseArea model: xi must lie in (0, 1.05]");
    }
}

std::string describe(const ErrorModel &model) {
    char buf[160];
    if (std::holds_alternative<IdealPulses>(model))
        return "ideal";
    if (const auto *m = std::get_if<NonRwaPulses>(&model)) {
        std::snprintf(buf, sizeof buf, "nonrwa(tau=%.6g s, phi=%.6g, omega_at=%.6g)", m->tau, m->phi, m->omega_at);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "pulse_area(xi=%.12g)", std::get<PulseAreaError>(model).xi);
    return buf;
}

double tail_population(const ComplexVector &state, int dim) {
    const int top = std::max(1, dim / 10);
    const int blocks = static_cast<int>(state.size()) / dim;
    double tail = 0.0;
    for (int s = 0; s < blocks; ++s)
        tail += state.segment(s * dim + dim - top, top).squaredNorm();
    return tail;
}

SectorSpace::SectorSpace(ModeData mode, FockBasis basis, int ion_a, int ion_b)
    : mode_(std::move(mode)), basis_(basis), quadrature_(cached_quadrature_basis(basis)) {
    coupling_ = {mode_.b.at(ion_a), mode_.b.at(ion_b)};
}

ComplexMatrix SectorSpace::kx(int ion) const {
    const auto [a, adag] = ladder(basis_);
    return coupling_.at(ion) * mode_.eta * (a + adag);
}

namespace {

ComplexMatrix pauli_plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0; // |e><g|
    return m;
}

ComplexMatrix ion_operator(const ComplexMatrix &op, int ion) {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return ion == 0 ? kron(op, id) : kron(id, op);
}

// sum over gate ions of sigma_i^+ (x) A_i + h.c.
ComplexMatrix transfer_generator(const SectorSpace &space, const std::array<ComplexMatrix, 2> &a) {
    const ComplexMatrix sp = pauli_plus();
    const ComplexMatrix sm = sp.adjoint();
    ComplexMatrix g = ComplexMatrix::Zero(space.total_dim(), space.total_dim());
    for (int i = 0; i < 2; ++i) {
        g += kron(ion_operator(sp, i), a[i]);
        g += kron(ion_operator(sm, i), a[i].adjoint());
    }
    return g;
}

void check_direction(int direction) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("pulse direction must be +1 or -1");
}

// (e^{2 i w t_f} - e^{2 i w t_i}) / (2 i w), divided by tau.
Complex counter_rotating_integral_over_tau(double t_start, const NonRwaPulses &m) {
    const double w2 = 2.0 * m.omega_at;
    const Complex ei = std::exp(kI * std::fmod(w2 * t_start, 2.0 * kPi));
    const Complex ef = ei * std::exp(kI * std::fmod(w2 * m.tau, 2.0 * kPi));
    return (ef - ei) / (kI * w2 * m.tau);
}

} // namespace

ComplexMatrix free_evolution(const SectorSpace &space, double dt) {
    if (dt < 0.0)
        throw std::invalid_argument("free_evolution: dt must be >= 0");
    return kron(ComplexMatrix::Identity(4, 4), rotation(space.mode().nu_p * dt, space.basis()));
}

ComplexMatrix ideal_kick(const SectorSpace &space, int z, int n_check) {
    if (z == 0)
        throw std::invalid_argument("ideal_kick: z must be nonzero");
    const int d = space.dim();
    const int dir = z > 0 ? 1 : -1;
    ComplexMatrix out = ComplexMatrix::Zero(space.total_dim(), space.total_dim());
    for (InternalState s : kInternalStates) {
        const double w = space.coupling(0) * pauli_z(s, 0) + space.coupling(1) * pauli_z(s, 1);
        const Complex alpha = -2.0 * kI * static_cast<double>(dir) * w * space.mode().eta;
        const ComplexMatrix one = displacement(alpha, space.basis());
        ComplexMatrix block = ComplexMatrix::Identity(d, d);
        for (int k = 0; k < std::abs(z); ++k)
            block = one * block;
        const int top = std::max(1, d / 10);
        for (int n = 0; n <= std::min(n_check, d - 1); ++n) {
            const double tail = block.col(n).tail(top).squaredNorm();
            if (tail > kTailTolerance)
                throw TruncationOverflow("ideal_kick: displacement leaks " + std::to_string(tail) +
                                             " population into the top of a " + std::to_string(d) +
                                             "-state basis",
                                         tail);
        }
        const int idx = static_cast<int>(s);
        out.block(idx * d, idx * d, d, d) = block;
    }
    return out;
}

ComplexMatrix nonrwa_pulse(const SectorSpace &space, int direction, double t_start, const NonRwaPulses &model) {
    check_direction(direction);
    validate(ErrorModel{model});
    const Complex cr = counter_rotating_integral_over_tau(t_start, model);
    const Complex phase = std::exp(kI * model.phi);
    std::array<ComplexMatrix, 2> a;
    for (int i = 0; i < 2; ++i) {
        const ComplexMatrix e = matrix_exp(kI * static_cast<double>(direction) * space.kx(i)) * phase;
        a[i] = e + cr * e.adjoint();
    }
    // -i pi/(2 tau) times the time-integrated Hamiltonian; a[i] is already divided by tau.
    return matrix_exp(-kI * (kPi / 2.0) * transfer_generator(space, a));
}

ComplexMatrix two_ion_pulse_xi(const SectorSpace &space, int direction, double xi, double phi) {
    check_direction(direction);
    std::array<ComplexMatrix, 2> a;
    for (int i = 0; i < 2; ++i)
        a[i] = matrix_exp(kI * static_cast<double>(direction) * space.kx(i)) * std::exp(kI * phi);
    return matrix_exp(-kI * (xi * kPi / 2.0) * transfer_generator(space, a));
}

ComplexMatrix pair_pulse_xi(const SectorSpace &space, int z_dir, const PulseAreaError &model) {
    check_direction(z_dir);
    return two_ion_pulse_xi(space, -z_dir, model.xi) * two_ion_pulse_xi(space, z_dir, model.xi);
}

std::array<std::array<Complex, 2>, 2> pair_matrix_closed_form(int z, double xi, double kx, double phi) {
    const double zf = static_cast<double>(z);
    const double c = std::cos(kx), s = std::sin(kx);
    const double cx = std::cos(kPi * xi), sx = std::sin(kPi * xi);
    return {{{std::exp(-kI * zf * kx) * (c * cx + kI * zf * s), c * sx * (-kI * std::cos(phi) + std::sin(phi))},
             {c * sx * (-kI * std::cos(phi) - std::sin(phi)), std::exp(kI * zf * kx) * (c * cx - kI * zf * s)}}};
}

namespace {

double overlap_sq(const Mat2 &w, double theta, double varphi) {
    const Complex c0 = std::cos(theta / 2.0);
    const Complex c1 = std::exp(kI * varphi) * std::sin(theta / 2.0);
    const Complex wc0 = w.ee * c0 + w.eg * c1;
    const Complex wc1 = w.ge * c0 + w.gg * c1;
    return std::norm(std::conj(c0) * wc0 + std::conj(c1) * wc1);
}

} // namespace

double rotation_fidelity(double xi) {
    if (xi == 1.0)
        return 1.0;
    // Reference motional configuration kx = 0; the result does not depend on it.
    // Both pulses are rotations about x there, so U'^dag U is one of area (xi - 1) pi.
    const Mat2 w = pulse_block_xi(1, xi - 1.0, 0.0, 0.0);

    constexpr int kTheta = 64, kPhi = 128;
    double best = 2.0, bt = 0.0, bp = 0.0;
    for (int i = 0; i <= kTheta; ++i)
        for (int j = 0; j < kPhi; ++j) {
            const double th = kPi * i / kTheta, ph = 2.0 * kPi * j / kPhi;
            const double v = overlap_sq(w, th, ph);
            if (v < best) {
                best = v;
                bt = th;
                bp = ph;
            }
        }
    // Compass search refinement.
    double step = kPi / kTheta;
    while (step > 1e-12) {
        bool improved = false;
        for (const auto &[dt, dp] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            const double th = bt + dt * step, ph = bp + dp * step;
            const double v = overlap_sq(w, th, ph);
            if (v < best) {
                best = v;
                bt = th;
                bp = ph;
                improved = true;
            }
        }
        if (!improved)
            step *= 0.5;
    }
    return std::clamp(best, 0.0, 1.0);
}

double rotation_fidelity_approx(double xi) { return 1.0 - (1.0 - xi) * (1.0 - xi) * kPi * kPi / 4.0; }

double xi_for_rotation_infidelity(double infidelity) {
    if (!(infidelity >= 0.0 && infidelity <= 1.0))
        throw std::invalid_argument("xi_for_rotation_infidelity: infidelity must lie in [0, 1]");
    // Worst-case overlap is cos^2((1 - xi) pi / 2).
    return 1.0 - 2.0 / kPi * std::asin(std::sqrt(infidelity));
}

// ---------------------------------------------------------------------------
// Propagator

Mat2 ideal_kick_block(int z, double kx) {
    const double a = 2.0 * z * kx;
    return {std::exp(-kI * a), 0.0, 0.0, std::exp(kI * a)};
}

Mat2 pulse_block_xi(int direction, double xi, double kx, double phi) {
    const Complex e = std::exp(kI * (direction * kx + phi));
    const double c = std::cos(xi * kPi / 2.0), s = std::sin(xi * kPi / 2.0);
    return {c, -kI * s * e, -kI * s * std::conj(e), c};
}

Mat2 pulse_block_nonrwa(int direction, double t_start, double kx, const NonRwaPulses &model) {
    const Complex e = std::exp(kI * (direction * kx + model.phi));
    const Complex w = e + counter_rotating_integral_over_tau(t_start, model) * std::conj(e);
    const double r = std::abs(w);
    if (r == 0.0)
        return {};
    const double angle = kPi / 2.0 * r;
    const Complex u = -kI * std::sin(angle) / r;
    return {std::cos(angle), u * w, u * std::conj(w), std::cos(angle)};
}

Mat2 kick_event_block(int z, double t_start, double kx, const ErrorModel &model) {
    const int dir = z > 0 ? 1 : -1;
    const int pairs = std::abs(z);
    if (std::holds_alternative<IdealPulses>(model))
        return ideal_kick_block(z, kx);
    if (const auto *m = std::get_if<PulseAreaError>(&model)) {
        const Mat2 pair = pulse_block_xi(-dir, m->xi, kx, 0.0) * pulse_block_xi(dir, m->xi, kx, 0.0);
        Mat2 out;
        for (int k = 0; k < pairs; ++k)
            out = pair * out;
        return out;
    }
    const auto &m = std::get<NonRwaPulses>(model);
    Mat2 out;
    for (int k = 0; k < 2 * pairs; ++k) {
        const int d = (k % 2 == 0) ? dir : -dir;
        out = pulse_block_nonrwa(d, t_start + k * m.tau, kx, m) * out;
    }
    return out;
}

SectorPropagator::SectorPropagator(SectorSpace space) : space_(std::move(space)) {}

void SectorPropagator::free_evolve(ComplexVector &state, double dt) const {
    const int d = space_.dim();
    const double theta = space_.mode().nu_p * dt;
    for (int n = 0; n < d; ++n) {
        const Complex ph = std::exp(-kI * (theta * n));
        for (int s = 0; s < 4; ++s)
            state(s * d + n) *= ph;
    }
}

void SectorPropagator::kick_event(ComplexVector &state, int z, double t_start, const ErrorModel &model) const {
    if (z == 0)
        return;
    const int d = space_.dim();
    const auto &q = space_.quadrature();
    // Columns are internal blocks; rows are quadrature eigenvalues.
    Eigen::MatrixXcd blocks(d, 4);
    for (int s = 0; s < 4; ++s)
        blocks.col(s) = q.vectors.transpose() * state.segment(s * d, d);

    const double c0 = space_.coupling(0) * space_.mode().eta;
    const double c1 = space_.coupling(1) * space_.mode().eta;
    for (int j = 0; j < d; ++j) {
        const double x = q.values(j);
        const Mat2 m0 = kick_event_block(z, t_start, c0 * x, model);
        const Mat2 m1 = kick_event_block(z, t_start, c1 * x, model);
        const std::array<Complex, 4> v = {blocks(j, 0), blocks(j, 1), blocks(j, 2), blocks(j, 3)};
        const std::array<std::array<Complex, 2>, 2> a = {{{m0.ee, m0.eg}, {m0.ge, m0.gg}}};
        const std::array<std::array<Complex, 2>, 2> b = {{{m1.ee, m1.eg}, {m1.ge, m1.gg}}};
        for (int i1 = 0; i1 < 2; ++i1)
            for (int i2 = 0; i2 < 2; ++i2) {
                Complex acc = 0.0;
                for (int k1 = 0; k1 < 2; ++k1)
                    for (int k2 = 0; k2 < 2; ++k2)
                        acc += a[i1][k1] * b[i2][k2] * v[2 * k1 + k2];
                blocks(j, 2 * i1 + i2) = acc;
            }
    }
    for (int s = 0; s < 4; ++s)
        state.segment(s * d, d) = q.vectors * blocks.col(s);
}

} // namespace fastgate

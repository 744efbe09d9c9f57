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

#include "fastgate/ion_chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fastgate {

using constants::kPi;

TrapConfig TrapConfig::calcium40() {
    TrapConfig c;
    c.nu = 2.0 * kPi * 1.0e6;
    c.mass = 39.962590863 * constants::kAtomicMassUnit - constants::kElectronMass;
    c.wavenumber = 2.0 * kPi / 393.0e-9;
    c.omega_at = 2.0 * kPi * 1.0e15;
    c.detuning = 0.0;
    c.num_ions = 2;
    return c;
}

void TrapConfig::validate() const {
    if (!(nu > 0.0))
        throw std::invalid_argument("TrapConfig: nu must be positive");
    if (!(mass > 0.0))
        throw std::invalid_argument("TrapConfig: mass must be positive");
    if (!(wavenumber > 0.0))
        throw std::invalid_argument("TrapConfig: wavenumber must be positive");
    if (!(omega_at > 0.0))
        throw std::invalid_argument("TrapConfig: omega_at must be positive");
    if (detuning != 0.0)
        throw std::invalid_argument("TrapConfig: only resonant driving (detuning = 0) is supported");
    if (num_ions < 2)
        throw std::invalid_argument("TrapConfig: num_ions must be >= 2");
}

double lamb_dicke(const TrapConfig &config, double nu_p) {
    if (!(nu_p > 0.0))
        throw std::invalid_argument("lamb_dicke: mode frequency must be positive");
    return config.wavenumber * std::sqrt(constants::kHbar / (2.0 * config.mass * nu_p));
}

TwoIonModes two_ion_modes(const TrapConfig &config) {
    config.validate();
    if (config.num_ions != 2)
        throw std::invalid_argument("two_ion_modes: requires exactly 2 ions, got " +
                                    std::to_string(config.num_ions));
    const double r = 1.0 / std::sqrt(2.0);
    const double nu_r = std::sqrt(3.0) * config.nu;
    return {ModeData{config.nu, {r, r}, lamb_dicke(config, config.nu)},
            ModeData{nu_r, {-r, r}, lamb_dicke(config, nu_r)}};
}

namespace {

// Gradient of V(u) = sum u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|.
Eigen::VectorXd chain_force(const Eigen::VectorXd &u) {
    const Eigen::Index n = u.size();
    Eigen::VectorXd g = u;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const double d = u(i) - u(j);
            g(i) -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    return g;
}

Eigen::MatrixXd chain_hessian(const Eigen::VectorXd &u) {
    const Eigen::Index n = u.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j)
                continue;
            const double c = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
            h(i, i) += c;
            h(i, j) -= c;
        }
    return h;
}

double chain_energy(const Eigen::VectorXd &u) {
    double e = 0.5 * u.squaredNorm();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (Eigen::Index j = i + 1; j < u.size(); ++j)
            e += 1.0 / std::abs(u(i) - u(j));
    return e;
}

} // namespace

std::vector<double> equilibrium_positions(int num_ions) {
    if (num_ions < 2)
        throw std::invalid_argument("equilibrium_positions: num_ions must be >= 2");
    const int n = num_ions;
    // Chain half-width grows roughly as L^0.56.
    Eigen::VectorXd u(n);
    const double half_width = 1.05 * std::pow(static_cast<double>(n), 0.56);
    for (int i = 0; i < n; ++i)
        u(i) = -half_width + 2.0 * half_width * i / (n - 1);

    constexpr double kTol = 1e-12;
    for (int iter = 0; iter < 200; ++iter) {
        const Eigen::VectorXd g = chain_force(u);
        if (g.cwiseAbs().maxCoeff() < kTol)
            break;
        const Eigen::VectorXd step = chain_hessian(u).ldlt().solve(-g);
        const double e0 = chain_energy(u);
        double lambda = 1.0;
        Eigen::VectorXd trial = u + step;
        // Damp until ordering is preserved and the energy does not increase.
        while (lambda > 1e-8) {
            trial = u + lambda * step;
            bool ordered = true;
            for (int i = 1; i < n; ++i)
                ordered = ordered && trial(i) > trial(i - 1);
            if (ordered && chain_energy(trial) <= e0 + 1e-12 * std::abs(e0))
                break;
            lambda *= 0.5;
        }
        u = trial;
    }
    const double residual = chain_force(u).cwiseAbs().maxCoeff();
    if (!(residual < kTol))
        throw std::runtime_error("equilibrium_positions: Newton iteration did not converge (residual " +
                                 std::to_string(residual) + ")");
    return {u.data(), u.data() + n};
}

std::vector<ModeData> chain_modes(const TrapConfig &config) {
    config.validate();
    const int n = config.num_ions;
    const std::vector<double> pos = equilibrium_positions(n);
    const Eigen::MatrixXd h = chain_hessian(Eigen::Map<const Eigen::VectorXd>(pos.data(), n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("chain_modes: Hessian diagonalization failed");

    std::vector<ModeData> modes;
    modes.reserve(n);
    for (int p = 0; p < n; ++p) {
        Eigen::VectorXd b = solver.eigenvectors().col(p).normalized();
        for (int i = 0; i < n; ++i) {
            if (std::abs(b(i)) > 1e-12) {
                if (b(i) < 0)
                    b = -b;
                break;
            }
        }
        const double nu_p = config.nu * std::sqrt(solver.eigenvalues()(p));
        modes.push_back(ModeData{nu_p, {b.data(), b.data() + n}, lamb_dicke(config, nu_p)});
    }
    return modes;
}

} // namespace fastgate

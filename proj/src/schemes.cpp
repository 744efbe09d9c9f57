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

#include "fastgate/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <tuple>

#include <Eigen/Dense>

namespace fastgate {

using constants::kPi;

std::string_view to_string(SchemeKind kind) { return kind == SchemeKind::FRAG ? "frag" : "gzc"; }

SchemeKind parse_scheme_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "frag")
        return SchemeKind::FRAG;
    if (lower == "gzc")
        return SchemeKind::GZC;
    throw std::invalid_argument("unknown scheme kind '" + std::string(text) + "' (expected frag or gzc)");
}

std::array<int, kKickEvents> kick_vector(SchemeKind kind, int n) {
    if (n < 1)
        throw std::invalid_argument("kick_vector: n must be >= 1");
    if (kind == SchemeKind::FRAG)
        return {-n, 2 * n, -2 * n, 2 * n, -2 * n, n};
    return {-2 * n, 3 * n, -2 * n, 2 * n, -3 * n, 2 * n};
}

PulseScheme make_scheme(SchemeKind kind, int n, const std::array<double, 3> &taus) {
    PulseScheme s;
    s.kind = kind;
    s.n = n;
    s.z = kick_vector(kind, n);
    s.t = {-taus[0], -taus[1], -taus[2], taus[2], taus[1], taus[0]};
    s.gate_time = 2.0 * taus[0];
    return s;
}

int total_pulse_pairs(const PulseScheme &scheme) {
    int total = 0;
    for (int z : scheme.z)
        total += std::abs(z);
    return total;
}

double closure_residual(const PulseScheme &scheme, double nu) {
    double r = 0.0;
    for (int j = 0; j < 3; ++j)
        r += scheme.z[j] * std::sin(nu * -scheme.t[j]);
    return r;
}

namespace {

double pair_sum(const std::array<int, kKickEvents> &z, const std::array<double, kKickEvents> &t, double nu) {
    double s = 0.0;
    for (int m = 1; m < kKickEvents; ++m)
        for (int k = 0; k < m; ++k)
            s += z[m] * z[k] * std::sin(nu * (t[m] - t[k]));
    return s;
}

// Which half-time each event uses, and its sign: t = (-x1,-x2,-x3,x3,x2,x1).
constexpr std::array<int, kKickEvents> kTimeIndex = {0, 1, 2, 2, 1, 0};
constexpr std::array<int, kKickEvents> kTimeSign = {-1, -1, -1, 1, 1, 1};

struct ActiveMode {
    double ratio;        // nu_p / nu_ref
    double phase_weight; // 8 eta^2 b_a b_b
};

// Residual system in dimensionless half-times x_j = nu_ref * tau_j.
class TimingSystem {
  public:
    TimingSystem(const std::array<int, kKickEvents> &z, std::vector<ActiveMode> modes)
        : z_(z), modes_(std::move(modes)) {
        closure_scale_ = std::abs(z[0]) + std::abs(z[1]) + std::abs(z[2]);
    }

    int size() const { return static_cast<int>(modes_.size()) + 1; }
    double closure_scale() const { return closure_scale_; }

    // Closures are divided by closure_scale_ so all rows are O(1).
    void evaluate(const Eigen::Vector3d &x, Eigen::VectorXd &r, Eigen::MatrixXd *jac) const {
        const int m_count = static_cast<int>(modes_.size());
        r.resize(m_count + 1);
        if (jac)
            jac->setZero(m_count + 1, 3);
        double phase = -kPi / 4.0;
        for (int p = 0; p < m_count; ++p) {
            const double w = modes_[p].ratio;
            double c = 0.0;
            for (int j = 0; j < 3; ++j) {
                c += z_[j] * std::sin(w * x(j));
                if (jac)
                    (*jac)(p, j) = z_[j] * w * std::cos(w * x(j)) / closure_scale_;
            }
            r(p) = c / closure_scale_;

            double s = 0.0;
            for (int m = 1; m < kKickEvents; ++m)
                for (int k = 0; k < m; ++k) {
                    const double dt = kTimeSign[m] * x(kTimeIndex[m]) - kTimeSign[k] * x(kTimeIndex[k]);
                    const double zz = z_[m] * z_[k];
                    s += zz * std::sin(w * dt);
                    if (jac) {
                        const double d = zz * w * std::cos(w * dt) * modes_[p].phase_weight;
                        (*jac)(m_count, kTimeIndex[m]) += d * kTimeSign[m];
                        (*jac)(m_count, kTimeIndex[k]) -= d * kTimeSign[k];
                    }
                }
            phase += modes_[p].phase_weight * s;
        }
        r(m_count) = phase;
    }

    const std::vector<ActiveMode> &modes() const { return modes_; }
    const std::array<int, kKickEvents> &z() const { return z_; }

  private:
    std::array<int, kKickEvents> z_;
    std::vector<ActiveMode> modes_;
    double closure_scale_ = 1.0;
};

// Levenberg-Marquardt; returns the final scaled residual norm.
double polish(const TimingSystem &system, Eigen::Vector3d &x) {
    Eigen::VectorXd r, r_trial;
    Eigen::MatrixXd jac;
    system.evaluate(x, r, &jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    for (int iter = 0; iter < 300 && cost > 1e-32; ++iter) {
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d g = jac.transpose() * r;
        Eigen::Matrix3d lhs = jtj;
        for (int i = 0; i < 3; ++i)
            lhs(i, i) += lambda * std::max(jtj(i, i), 1e-12);
        const Eigen::Vector3d step = lhs.ldlt().solve(-g);
        if (!step.allFinite())
            break;
        const Eigen::Vector3d trial = x + step;
        system.evaluate(trial, r_trial, nullptr);
        const double trial_cost = r_trial.squaredNorm();
        if (trial_cost < cost) {
            x = trial;
            cost = trial_cost;
            system.evaluate(x, r, &jac);
            lambda = std::max(lambda / 5.0, 1e-15);
            if (step.norm() < 1e-16 * (1.0 + x.norm()))
                break;
        } else {
            lambda *= 4.0;
            if (lambda > 1e12)
                break;
        }
    }
    return std::sqrt(cost);
}

struct Candidate {
    float cost;
    int i1, i2, i3;
};

std::vector<Candidate> grid_minima(const TimingSystem &system, int n_grid, double h) {
    const auto &modes = system.modes();
    const int m_count = static_cast<int>(modes.size());
    const auto &z = system.z();
    const double scale = system.closure_scale();

    // sin/cos tables per mode for x = i * h, i = 0..n_grid.
    std::vector<std::vector<double>> sn(m_count), cs(m_count);
    for (int p = 0; p < m_count; ++p) {
        sn[p].resize(n_grid + 1);
        cs[p].resize(n_grid + 1);
        for (int i = 0; i <= n_grid; ++i) {
            sn[p][i] = std::sin(modes[p].ratio * i * h);
            cs[p][i] = std::cos(modes[p].ratio * i * h);
        }
    }

    const int stride = n_grid + 1;
    const float inf = std::numeric_limits<float>::infinity();
    std::vector<float> cost(static_cast<std::size_t>(stride) * stride * stride, inf);
    auto at = [&](int i1, int i2, int i3) -> float & {
        return cost[(static_cast<std::size_t>(i1) * stride + i2) * stride + i3];
    };

    std::array<int, 3> idx{};
    for (int i1 = 3; i1 <= n_grid; ++i1) {
        idx[0] = i1;
        for (int i2 = 2; i2 < i1; ++i2) {
            idx[1] = i2;
            for (int i3 = 1; i3 < i2; ++i3) {
                idx[2] = i3;
                double total = 0.0;
                double phase = -kPi / 4.0;
                for (int p = 0; p < m_count; ++p) {
                    const auto &s = sn[p];
                    const auto &c = cs[p];
                    const double closure = (z[0] * s[i1] + z[1] * s[i2] + z[2] * s[i3]) / scale;
                    total += closure * closure;
                    double pair = 0.0;
                    for (int m = 1; m < kKickEvents; ++m) {
                        const int a = idx[kTimeIndex[m]];
                        const double sa = kTimeSign[m] * s[a];
                        for (int k = 0; k < m; ++k) {
                            const int b = idx[kTimeIndex[k]];
                            // sin(w (sa xa - sb xb)) by angle addition.
                            const double v = sa * c[b] - kTimeSign[k] * c[a] * s[b];
                            pair += z[m] * z[k] * v;
                        }
                    }
                    phase += modes[p].phase_weight * pair;
                }
                total += phase * phase;
                at(i1, i2, i3) = static_cast<float>(total);
            }
        }
    }

    std::vector<Candidate> minima;
    for (int i1 = 3; i1 <= n_grid; ++i1)
        for (int i2 = 2; i2 < i1; ++i2)
            for (int i3 = 1; i3 < i2; ++i3) {
                const float v = at(i1, i2, i3);
                bool is_min = true;
                for (int d1 = -1; d1 <= 1 && is_min; ++d1)
                    for (int d2 = -1; d2 <= 1 && is_min; ++d2)
                        for (int d3 = -1; d3 <= 1 && is_min; ++d3) {
                            if (d1 == 0 && d2 == 0 && d3 == 0)
                                continue;
                            const int j1 = i1 + d1, j2 = i2 + d2, j3 = i3 + d3;
                            if (j1 > n_grid || j3 < 0)
                                continue;
                            if (at(j1, j2, j3) < v)
                                is_min = false;
                        }
                if (is_min)
                    minima.push_back({v, i1, i2, i3});
            }
    std::sort(minima.begin(), minima.end(), [](const Candidate &a, const Candidate &b) {
        if (a.cost != b.cost)
            return a.cost < b.cost;
        return std::tie(a.i1, a.i2, a.i3) < std::tie(b.i1, b.i2, b.i3);
    });
    return minima;
}

} // namespace

std::vector<double> scheme_residuals(const PulseScheme &scheme, std::span<const ModeData> modes, int ion_a,
                                     int ion_b) {
    std::vector<double> out;
    double phase = 0.0;
    for (const auto &mode : modes) {
        if (std::abs(mode.b.at(ion_a)) + std::abs(mode.b.at(ion_b)) < 1e-12)
            continue;
        out.push_back(closure_residual(scheme, mode.nu_p));
        phase += ideal_phase(scheme, mode, ion_a, ion_b);
    }
    out.push_back(phase - kPi / 4.0);
    return out;
}

PulseScheme build_scheme(SchemeKind kind, int n, std::span<const ModeData> modes,
                         const SchemeSearchOptions &options) {
    if (n < 1)
        throw std::invalid_argument("build_scheme: n must be >= 1");
    if (modes.empty())
        throw std::invalid_argument("build_scheme: no modes");
    if (options.grid_points < 8)
        throw std::invalid_argument("build_scheme: grid_points must be >= 8");

    double nu_ref = modes[0].nu_p;
    for (const auto &m : modes)
        nu_ref = std::min(nu_ref, m.nu_p);

    std::vector<ActiveMode> active;
    for (const auto &m : modes) {
        const double ba = m.b.at(options.gate_ion_a);
        const double bb = m.b.at(options.gate_ion_b);
        if (std::abs(ba) + std::abs(bb) < 1e-12)
            continue;
        active.push_back({m.nu_p / nu_ref, 8.0 * m.eta * m.eta * ba * bb});
    }
    const TimingSystem system(kick_vector(kind, n), active);

    const double window = options.window_periods * 2.0 * kPi;
    const double h = window / options.grid_points;
    const std::vector<Candidate> minima = grid_minima(system, options.grid_points, h);

    struct Root {
        Eigen::Vector3d x;
        double worst;
    };
    std::vector<Root> roots;
    double best_residual = std::numeric_limits<double>::infinity();
    constexpr std::size_t kMaxCandidates = 4000;
    for (std::size_t c = 0; c < minima.size() && c < kMaxCandidates; ++c) {
        Eigen::Vector3d x(minima[c].i1 * h, minima[c].i2 * h, minima[c].i3 * h);
        polish(system, x);
        PulseScheme trial = make_scheme(kind, n, {x(0) / nu_ref, x(1) / nu_ref, x(2) / nu_ref});
        const std::vector<double> res =
            scheme_residuals(trial, modes, options.gate_ion_a, options.gate_ion_b);
        double worst = 0.0;
        for (double v : res)
            worst = std::max(worst, std::abs(v));
        const bool ordered = x(0) > x(1) && x(1) > x(2) && x(2) > 0.0 && x(0) < window;
        if (ordered)
            best_residual = std::min(best_residual, worst);
        if (!ordered || !(options.least_squares || worst < options.max_residual))
            continue;
        bool duplicate = false;
        for (const auto &r : roots)
            duplicate = duplicate || (r.x - x).cwiseAbs().maxCoeff() < 1e-8;
        if (!duplicate)
            roots.push_back({x, worst});
    }
    if (roots.empty()) {
        char best[32], window_text[32];
        std::snprintf(best, sizeof best, "%.3g", best_residual);
        std::snprintf(window_text, sizeof window_text, "%g", options.window_periods);
        throw NoSolution("build_scheme: no timing root for " + std::string(to_string(kind)) +
                             " n=" + std::to_string(n) + " with tau1 below " +
                             window_text + " trap periods (best residual " +
                             best + ")",
                         best_residual);
    }

    auto best = std::min_element(roots.begin(), roots.end(), [](const Root &a, const Root &b) {
        return std::tie(a.x(0), a.x(1), a.x(2)) < std::tie(b.x(0), b.x(1), b.x(2));
    });
    if (options.least_squares)
        best = std::min_element(roots.begin(), roots.end(), [](const Root &a, const Root &b) {
            return std::tie(a.worst, a.x(0), a.x(1), a.x(2)) < std::tie(b.worst, b.x(0), b.x(1), b.x(2));
        });
    PulseScheme scheme = make_scheme(kind, n, {best->x(0) / nu_ref, best->x(1) / nu_ref, best->x(2) / nu_ref});
    scheme.residuals = scheme_residuals(scheme, modes, options.gate_ion_a, options.gate_ion_b);
    return scheme;
}

double ideal_phase(const PulseScheme &scheme, const ModeData &mode, int ion_a, int ion_b) {
    const double weight = 8.0 * mode.eta * mode.eta * mode.b.at(ion_a) * mode.b.at(ion_b);
    return weight * pair_sum(scheme.z, scheme.t, mode.nu_p);
}

} // namespace fastgate

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

#ifndef FASTGATE_CLI_HPP
#define FASTGATE_CLI_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fastgate/gatesim.hpp"
#include "fastgate/pulses.hpp"
#include "fastgate/schemes.hpp"

namespace fastgate::cli {

/// Bad flags or config; maps to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct SchemeSpec {
    SchemeKind kind;
    int n;
};

struct InitialState {
    int n_c = 0;
    int n_r = 0;
};

/// Parsed JSON config. Empty lists mean "use the subcommand default".
struct RunConfig {
    TrapConfig trap = TrapConfig::calcium40();
    std::vector<SchemeSpec> schemes;
    std::vector<InitialState> initial_states;
    std::vector<double> tau_fs;
    int phi_samples = 16;
    bool summary = true;
    std::vector<double> xi;
    std::vector<double> rotation_infidelity;
    std::optional<ErrorModel> error_model;
    InternalState internal_state = InternalState::ee;
    Complex alpha0 = 0.0;
    std::optional<int> basis_dim;
    std::optional<int> threads;
    std::optional<std::string> out;
};

/// Throws UsageError on unknown keys, wrong types, or invalid grids.
RunConfig parse_run_config(const nlohmann::ordered_json &j);
RunConfig load_run_config(const std::string &path);

/// Uniform grid 2 pi k / samples, k = 0..samples-1.
std::vector<double> phi_grid(int samples);

/// Mean and population standard deviation.
OccupationStats mean_std(const std::vector<double> &values);

/// Runs fn(i) for i in [0, count) on `threads` workers and returns the
/// results in index order. If any call throws, the exception of the lowest
/// failing index is rethrown after all workers finish.
template <typename R, typename F> std::vector<R> parallel_map(std::size_t count, int threads, F &&fn) {
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(count);
    for (auto &s : slots)
        out.push_back(std::move(*s));
    return out;
}

/// Solves the scheme for the configured trap (least squares for more than two ions).
PulseScheme solve_scheme(const TrapConfig &trap, SchemeKind kind, int n);

void cmd_solve(const RunConfig &config, SchemeKind kind, int n, std::ostream &out);
void cmd_run(const RunConfig &config, std::ostream &out);
void cmd_sweep_duration(const RunConfig &config, int threads, std::ostream &out, std::ostream *summary);
void cmd_sweep_xi(const RunConfig &config, int threads, std::ostream &out);
void cmd_populations(const RunConfig &config, int threads, std::ostream &out);

/// Snapshot streams are written in the order ideal, pulse_area, nonrwa when given.
struct SnapshotStreams {
    std::ostream *ideal = nullptr;
    std::ostream *pulse_area = nullptr;
    std::ostream *nonrwa = nullptr;
};
void cmd_trajectory(const RunConfig &config, std::ostream &out, const SnapshotStreams &snapshots);

/// Entry point; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace fastgate::cli

#endif

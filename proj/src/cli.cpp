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

#include "fastgate/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "fastgate/serialization.hpp"

namespace fastgate::cli {

using constants::kPi;
using json = nlohmann::ordered_json;

namespace {

constexpr double kFemtosecond = 1e-15;

template <typename T> T get_as(const json &j, const std::string &key) {
    try {
        return j.get<T>();
    } catch (const json::exception &) {
        throw UsageError("config: '" + key + "' has the wrong type");
    }
}

void check_keys(const json &j, const std::string &where, const std::set<std::string> &allowed) {
    if (!j.is_object())
        throw UsageError("config: " + where + " must be a JSON object");
    for (const auto &[key, value] : j.items())
        if (!allowed.count(key))
            throw UsageError("config: unknown key '" + key + "' in " + where);
}

std::vector<double> monotone_grid(const json &j, const std::string &key) {
    const auto v = get_as<std::vector<double>>(j, key);
    if (v.empty())
        throw UsageError("config: '" + key + "' must not be empty");
    bool up = true, down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    if (v.size() > 1 && !up && !down)
        throw UsageError("config: '" + key + "' must be strictly monotone");
    for (double x : v)
        if (!std::isfinite(x))
            throw UsageError("config: '" + key + "' has a non-finite entry");
    return v;
}

TrapConfig parse_trap(const json &j) {
    check_keys(j, "trap",
               {"trap_frequency_hz", "mass_amu", "wavelength_nm", "atomic_frequency_hz", "detuning", "num_ions"});
    TrapConfig t = TrapConfig::calcium40();
    if (j.contains("trap_frequency_hz"))
        t.nu = 2.0 * kPi * get_as<double>(j["trap_frequency_hz"], "trap_frequency_hz");
    if (j.contains("mass_amu"))
        t.mass = get_as<double>(j["mass_amu"], "mass_amu") * constants::kAtomicMassUnit;
    if (j.contains("wavelength_nm"))
        t.wavenumber = 2.0 * kPi / (get_as<double>(j["wavelength_nm"], "wavelength_nm") * 1e-9);
    if (j.contains("atomic_frequency_hz"))
        t.omega_at = 2.0 * kPi * get_as<double>(j["atomic_frequency_hz"], "atomic_frequency_hz");
    if (j.contains("detuning"))
        t.detuning = get_as<double>(j["detuning"], "detuning");
    if (j.contains("num_ions"))
        t.num_ions = get_as<int>(j["num_ions"], "num_ions");
    try {
        t.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return t;
}

SchemeKind parse_kind(const std::string &text) {
    try {
        return parse_scheme_kind(text);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
}

std::vector<SchemeSpec> parse_schemes(const json &j) {
    if (!j.is_array() || j.empty())
        throw UsageError("config: 'schemes' must be a non-empty array");
    std::vector<SchemeSpec> out;
    for (const auto &item : j) {
        check_keys(item, "schemes entry", {"kind", "n"});
        if (!item.contains("kind") || !item.contains("n"))
            throw UsageError("config: every 'schemes' entry needs 'kind' and 'n'");
        const SchemeKind kind = parse_kind(get_as<std::string>(item["kind"], "kind"));
        const std::vector<int> ns =
            item["n"].is_array() ? get_as<std::vector<int>>(item["n"], "n") : std::vector<int>{get_as<int>(item["n"], "n")};
        for (int n : ns) {
            if (n < 1)
                throw UsageError("config: scheme multiplier n must be >= 1");
            out.push_back({kind, n});
        }
    }
    return out;
}

ErrorModel parse_error_model(const json &j, const TrapConfig &trap) {
    check_keys(j, "error_model", {"type", "tau_fs", "phi", "xi", "rotation_infidelity"});
    const std::string type = get_as<std::string>(j.value("type", json("ideal")), "type");
    ErrorModel model;
    if (type == "ideal") {
        model = IdealPulses{};
    } else if (type == "nonrwa") {
        if (!j.contains("tau_fs"))
            throw UsageError("config: nonrwa error_model needs 'tau_fs'");
        model = NonRwaPulses{get_as<double>(j["tau_fs"], "tau_fs") * kFemtosecond,
                             get_as<double>(j.value("phi", json(0.0)), "phi"), trap.omega_at};
    } else if (type == "pulse_area") {
        if (j.contains("xi") == j.contains("rotation_infidelity"))
            throw UsageError("config: pulse_area error_model needs exactly one of 'xi', 'rotation_infidelity'");
        const double xi = j.contains("xi")
                              ? get_as<double>(j["xi"], "xi")
                              : xi_for_rotation_infidelity(get_as<double>(j["rotation_infidelity"], "rotation_infidelity"));
        model = PulseAreaError{xi};
    } else {
        throw UsageError("config: unknown error_model type '" + type + "' (ideal, nonrwa, pulse_area)");
    }
    try {
        validate(model);
    } catch (const std::invalid_argument &e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    return model;
}

std::string scheme_label(SchemeKind kind) { return std::string(to_string(kind)); }

std::string context(const PulseScheme &s) {
    return scheme_label(s.kind) + " n=" + std::to_string(s.n);
}

// Re-throws with a prefix naming the sweep point, keeping the overflow type.
template <typename F> auto with_context(const std::string &where, F &&fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const TruncationOverflow &e) {
        throw TruncationOverflow(where + ": " + e.what(), e.tail_population());
    } catch (const NoSolution &e) {
        throw NoSolution(where + ": " + e.what(), e.best_residual());
    } catch (const std::exception &e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

void require_two_ions(const RunConfig &config, const std::string &command) {
    if (config.trap.num_ions != 2)
        throw UsageError(command + " supports two-ion traps only (num_ions = 2)");
}

std::vector<PulseScheme> solve_all(const RunConfig &config, const std::vector<SchemeSpec> &specs, int threads) {
    return parallel_map<PulseScheme>(specs.size(), threads, [&](std::size_t i) {
        return with_context("solve " + scheme_label(specs[i].kind) + " n=" + std::to_string(specs[i].n),
                            [&] { return solve_scheme(config.trap, specs[i].kind, specs[i].n); });
    });
}

double gate_fidelity(const PulseScheme &scheme, const TwoIonModes &modes, const ErrorModel &model,
                     const InitialState &init, std::optional<int> basis_dim) {
    const SectorResult same =
        simulate_sector_adaptive(scheme, model, modes.com, InternalState::gg, init.n_c, basis_dim);
    const SectorResult opposite =
        simulate_sector_adaptive(scheme, model, modes.stretch, InternalState::ge, init.n_r, basis_dim);
    const std::array<int, 2> n_init = {init.n_c, init.n_r};
    return state_averaged_fidelity(same.amplitude, opposite.amplitude, scheme, modes, n_init);
}

std::vector<double> xi_values(const RunConfig &config, std::vector<double> fallback_infidelity) {
    std::vector<double> xi = config.xi;
    const auto &rinf = config.rotation_infidelity.empty() && config.xi.empty() ? fallback_infidelity
                                                                             : config.rotation_infidelity;
    for (double r : rinf)
        xi.push_back(xi_for_rotation_infidelity(r));
    for (double x : xi)
        validate(ErrorModel{PulseAreaError{x}});
    return xi;
}

const ModeData &mode_for(const TwoIonModes &modes, InternalState s) {
    return sector_of(s) == Sector::same ? modes.com : modes.stretch;
}

int n_for(const InitialState &init, InternalState s) {
    return sector_of(s) == Sector::same ? init.n_c : init.n_r;
}

} // namespace

RunConfig parse_run_config(const json &j) {
    check_keys(j, "config",
               {"trap", "schemes", "initial_states", "tau_fs", "phi_samples", "summary", "xi", "rotation_infidelity",
                "error_model", "internal_state", "alpha0", "basis_dim", "threads", "out"});
    RunConfig c;
    if (j.contains("trap"))
        c.trap = parse_trap(j["trap"]);
    if (j.contains("schemes"))
        c.schemes = parse_schemes(j["schemes"]);
    if (j.contains("initial_states")) {
        const auto states = get_as<std::vector<std::vector<int>>>(j["initial_states"], "initial_states");
        if (states.empty())
            throw UsageError("config: 'initial_states' must not be empty");
        for (const auto &s : states) {
            if (s.size() != 2 || s[0] < 0 || s[1] < 0)
                throw UsageError("config: each initial state is [n_c, n_r] with non-negative entries");
            c.initial_states.push_back({s[0], s[1]});
        }
    }
    if (j.contains("tau_fs")) {
        c.tau_fs = monotone_grid(j["tau_fs"], "tau_fs");
        for (double t : c.tau_fs)
            if (!(t > 0.0))
                throw UsageError("config: 'tau_fs' entries must be positive");
    }
    if (j.contains("phi_samples")) {
        c.phi_samples = get_as<int>(j["phi_samples"], "phi_samples");
        if (c.phi_samples < 1)
            throw UsageError("config: 'phi_samples' must be >= 1");
    }
    if (j.contains("summary"))
        c.summary = get_as<bool>(j["summary"], "summary");
    if (c.summary && c.phi_samples < 8)
        throw UsageError("config: a phase summary needs 'phi_samples' >= 8 (or set 'summary': false)");
    if (j.contains("xi"))
        c.xi = monotone_grid(j["xi"], "xi");
    if (j.contains("rotation_infidelity")) {
        c.rotation_infidelity = monotone_grid(j["rotation_infidelity"], "rotation_infidelity");
        for (double r : c.rotation_infidelity)
            if (!(r >= 0.0 && r <= 1.0))
                throw UsageError("config: 'rotation_infidelity' entries must lie in [0, 1]");
    }
    for (double x : c.xi)
        if (!(x > 0.0 && x <= 1.05))
            throw UsageError("config: 'xi' entries must lie in (0, 1.05]");
    if (j.contains("error_model"))
        c.error_model = parse_error_model(j["error_model"], c.trap);
    if (j.contains("internal_state")) {
        try {
            c.internal_state = parse_internal_state(get_as<std::string>(j["internal_state"], "internal_state"));
        } catch (const std::invalid_argument &e) {
            throw UsageError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("alpha0")) {
        const auto a = get_as<std::vector<double>>(j["alpha0"], "alpha0");
        if (a.size() != 2)
            throw UsageError("config: 'alpha0' is [re, im]");
        c.alpha0 = {a[0], a[1]};
    }
    if (j.contains("basis_dim")) {
        c.basis_dim = get_as<int>(j["basis_dim"], "basis_dim");
        if (*c.basis_dim < 2)
            throw UsageError("config: 'basis_dim' must be >= 2");
    }
    if (j.contains("threads")) {
        c.threads = get_as<int>(j["threads"], "threads");
        if (*c.threads < 1)
            throw UsageError("config: 'threads' must be >= 1");
    }
    if (j.contains("out"))
        c.out = get_as<std::string>(j["out"], "out");
    return c;
}

RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

std::vector<double> phi_grid(int samples) {
    if (samples < 1)
        throw std::invalid_argument("phi_grid: samples must be >= 1");
    std::vector<double> out(samples);
    for (int k = 0; k < samples; ++k)
        out[k] = 2.0 * kPi * k / samples;
    return out;
}

OccupationStats mean_std(const std::vector<double> &values) {
    if (values.empty())
        return {};
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values)
        var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

PulseScheme solve_scheme(const TrapConfig &trap, SchemeKind kind, int n) {
    trap.validate();
    if (trap.num_ions == 2) {
        const TwoIonModes m = two_ion_modes(trap);
        const std::array<ModeData, 2> modes = {m.com, m.stretch};
        return build_scheme(kind, n, modes);
    }
    SchemeSearchOptions options;
    options.least_squares = true;
    return build_scheme(kind, n, chain_modes(trap), options);
}

void cmd_solve(const RunConfig &config, SchemeKind kind, int n, std::ostream &out) {
    if (n < 1)
        throw UsageError("--n must be >= 1");
    out << scheme_to_json(solve_scheme(config.trap, kind, n)).dump(2) << '\n';
}

void cmd_run(const RunConfig &config, std::ostream &out) {
    const SchemeSpec spec = config.schemes.empty() ? SchemeSpec{SchemeKind::GZC, 1} : config.schemes.front();
    const InitialState init = config.initial_states.empty() ? InitialState{} : config.initial_states.front();
    const ErrorModel model = config.error_model.value_or(IdealPulses{});
    const PulseScheme scheme = solve_scheme(config.trap, spec.kind, spec.n);
    json j;
    if (config.trap.num_ions == 2) {
        SimulationRequest req{scheme, config.trap, model, {init.n_c, init.n_r}, false, config.basis_dim};
        j = report_to_json(run_gate(req));
    } else {
        const std::vector<ModeData> modes = chain_modes(config.trap);
        std::vector<int> n_init(modes.size(), 0);
        n_init[0] = init.n_c;
        n_init[1] = init.n_r;
        const auto amps = multimode_amplitudes(scheme, model, modes, n_init, config.basis_dim);
        const double f = multimode_fidelity(amps, scheme);
        j = {{"fidelity", f}, {"infidelity", 1.0 - f}, {"T_G", scheme.gate_time}};
    }
    j["scheme"] = scheme_to_json(scheme);
    j["error_model"] = describe(model);
    out << j.dump(2) << '\n';
}

void cmd_sweep_duration(const RunConfig &config, int threads, std::ostream &out, std::ostream *summary) {
    require_two_ions(config, "sweep-duration");
    const std::vector<SchemeSpec> specs =
        !config.schemes.empty()
            ? config.schemes
            : std::vector<SchemeSpec>{{SchemeKind::GZC, 1}, {SchemeKind::GZC, 2}, {SchemeKind::GZC, 5},
                                      {SchemeKind::GZC, 10}, {SchemeKind::FRAG, 2}, {SchemeKind::FRAG, 5}};
    if (config.initial_states.size() > 1)
        throw UsageError("sweep-duration takes a single initial state");
    const InitialState init = config.initial_states.empty() ? InitialState{2, 2} : config.initial_states.front();
    std::vector<double> taus = config.tau_fs;
    if (taus.empty())
        for (int k = 1; k <= 10; ++k)
            taus.push_back(10.0 * k + 0.25);
    const std::vector<double> phis = phi_grid(config.phi_samples);

    const std::vector<PulseScheme> schemes = solve_all(config, specs, threads);
    const TwoIonModes modes = two_ion_modes(config.trap);
    const std::size_t per_scheme = taus.size() * phis.size();
    const std::vector<double> fid = parallel_map<double>(schemes.size() * per_scheme, threads, [&](std::size_t i) {
        const PulseScheme &s = schemes[i / per_scheme];
        const double tau = taus[(i % per_scheme) / phis.size()];
        const double phi = phis[i % phis.size()];
        return with_context(context(s) + " tau_fs=" + format_number(tau) + " phi=" + format_number(phi), [&] {
            const NonRwaPulses model{tau * kFemtosecond, phi, config.trap.omega_at};
            return gate_fidelity(s, modes, model, init, config.basis_dim);
        });
    });

    CsvWriter csv(out, {"scheme", "n", "tau_fs", "phi", "fidelity"});
    std::optional<CsvWriter> agg;
    if (summary)
        agg.emplace(*summary, std::vector<std::string>{"scheme", "n", "tau_fs", "phi_samples", "fidelity_mean",
                                                        "fidelity_std", "infidelity_mean"});
    for (std::size_t si = 0; si < schemes.size(); ++si)
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            std::vector<double> group;
            for (std::size_t pi = 0; pi < phis.size(); ++pi) {
                const double f = fid[si * per_scheme + ti * phis.size() + pi];
                group.push_back(f);
                csv.row({scheme_label(schemes[si].kind), std::to_string(schemes[si].n), format_number(taus[ti]),
                         format_number(phis[pi]), format_number(f)});
            }
            if (agg) {
                const OccupationStats st = mean_std(group);
                agg->row({scheme_label(schemes[si].kind), std::to_string(schemes[si].n), format_number(taus[ti]),
                          std::to_string(phis.size()), format_number(st.mean), format_number(st.std),
                          format_number(1.0 - st.mean)});
            }
        }
}

void cmd_sweep_xi(const RunConfig &config, int threads, std::ostream &out) {
    require_two_ions(config, "sweep-xi");
    const std::vector<SchemeSpec> specs =
        config.schemes.empty() ? std::vector<SchemeSpec>{{SchemeKind::GZC, 1}} : config.schemes;
    const std::vector<InitialState> inits =
        config.initial_states.empty() ? std::vector<InitialState>{{1, 1}} : config.initial_states;
    const std::vector<double> xis = xi_values(config, {1e-6, 1e-5, 1e-4, 1e-3});

    const std::vector<PulseScheme> schemes = solve_all(config, specs, threads);
    const TwoIonModes modes = two_ion_modes(config.trap);
    struct Row {
        double fidelity;
        OccupationStats occ;
    };
    const std::size_t per_scheme = inits.size() * xis.size();
    const std::vector<Row> rows = parallel_map<Row>(schemes.size() * per_scheme, threads, [&](std::size_t i) {
        const PulseScheme &s = schemes[i / per_scheme];
        const InitialState &init = inits[(i % per_scheme) / xis.size()];
        const double xi = xis[i % xis.size()];
        return with_context(context(s) + " xi=" + format_number(xi) + " n_c=" + std::to_string(init.n_c) +
                                " n_r=" + std::to_string(init.n_r),
                            [&] {
                                const PulseAreaError model{xi};
                                const double f = gate_fidelity(s, modes, model, init, config.basis_dim);
                                const SectorResult ee = simulate_sector_adaptive(
                                    s, model, modes.com, InternalState::ee, init.n_c, config.basis_dim);
                                return Row{f, mode_occupation_stats(ee)};
                            });
    });
    std::vector<double> rinf(xis.size());
    for (std::size_t k = 0; k < xis.size(); ++k)
        rinf[k] = 1.0 - rotation_fidelity(xis[k]);

    CsvWriter csv(out, {"scheme", "n", "xi", "rotation_infidelity", "n_c", "n_r", "fidelity", "occ_mean", "occ_std"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const PulseScheme &s = schemes[i / per_scheme];
        const InitialState &init = inits[(i % per_scheme) / xis.size()];
        const std::size_t k = i % xis.size();
        csv.row({scheme_label(s.kind), std::to_string(s.n), format_number(xis[k]), format_number(rinf[k]),
                 std::to_string(init.n_c), std::to_string(init.n_r), format_number(rows[i].fidelity),
                 format_number(rows[i].occ.mean), format_number(rows[i].occ.std)});
    }
}

void cmd_populations(const RunConfig &config, int threads, std::ostream &out) {
    require_two_ions(config, "populations");
    const SchemeSpec spec = config.schemes.empty() ? SchemeSpec{SchemeKind::GZC, 1} : config.schemes.front();
    const InitialState init = config.initial_states.empty() ? InitialState{2, 0} : config.initial_states.front();
    std::vector<double> xis = xi_values(config, {});
    if (xis.empty())
        xis = {0.95, 0.96, 0.97, 0.98, 0.99, 1.0};
    const PulseScheme scheme = with_context("solve", [&] { return solve_scheme(config.trap, spec.kind, spec.n); });
    const TwoIonModes modes = two_ion_modes(config.trap);
    const InternalState s0 = config.internal_state;
    const std::vector<SectorResult> results =
        parallel_map<SectorResult>(xis.size(), threads, [&](std::size_t k) {
            return with_context(context(scheme) + " xi=" + format_number(xis[k]), [&] {
                return simulate_sector_adaptive(scheme, PulseAreaError{xis[k]}, mode_for(modes, s0), s0,
                                                n_for(init, s0), config.basis_dim);
            });
        });
    CsvWriter csv(out, {"xi", "internal_state", "n", "probability"});
    for (std::size_t k = 0; k < xis.size(); ++k) {
        const PopulationMap pops = populations(results[k]);
        for (InternalState s : kInternalStates) {
            const auto &p = pops.at(s);
            for (std::size_t n = 0; n < p.size(); ++n)
                csv.row({format_number(xis[k]), std::string(to_string(s)), std::to_string(n), format_number(p[n])});
        }
    }
}

void cmd_trajectory(const RunConfig &config, std::ostream &out, const SnapshotStreams &snapshots) {
    require_two_ions(config, "trajectory");
    const SchemeSpec spec = config.schemes.empty() ? SchemeSpec{SchemeKind::GZC, 1} : config.schemes.front();
    const InitialState init = config.initial_states.empty() ? InitialState{2, 0} : config.initial_states.front();
    const PulseScheme scheme = with_context("solve", [&] { return solve_scheme(config.trap, spec.kind, spec.n); });
    const TwoIonModes modes = two_ion_modes(config.trap);
    const InternalState s0 = config.internal_state;
    const ModeData &mode = mode_for(modes, s0);

    CsvWriter csv(out, {"event_index", "re_alpha", "im_alpha"});
    const std::vector<Complex> path = phase_space_trajectory(scheme, mode, s0, config.alpha0);
    for (std::size_t e = 0; e < path.size(); ++e)
        csv.row({std::to_string(e), format_number(path[e].real()), format_number(path[e].imag())});

    const std::array<std::pair<std::ostream *, ErrorModel>, 3> models = {{
        {snapshots.ideal, IdealPulses{}},
        {snapshots.pulse_area, PulseAreaError{0.95}},
        {snapshots.nonrwa, NonRwaPulses{5.0 * kFemtosecond, 3.0 * kPi / 5.0, config.trap.omega_at}},
    }};
    for (const auto &[stream, model] : models) {
        if (!stream)
            continue;
        const SectorResult r = with_context(context(scheme) + " " + describe(model), [&] {
            return simulate_sector_adaptive(scheme, model, mode, s0, n_for(init, s0), config.basis_dim, true);
        });
        write_snapshots_csv(*stream, r.snapshots, r.dim);
    }
}

namespace {

std::filesystem::path sibling(const std::filesystem::path &out, const std::string &suffix) {
    const std::string ext = out.has_extension() ? out.extension().string() : std::string(".csv");
    return out.parent_path() / (out.stem().string() + suffix + ext);
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open output file '" + path.string() + "'");
    f << content;
    if (!f.flush())
        throw std::runtime_error("failed writing output file '" + path.string() + "'");
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"fastgate: pulsed fast-gate simulator for trapped ions"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out;
        int threads = 0;
    };
    Common common;
    std::string kind_text;
    int n = 0;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output path (stdout if omitted)");
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App *solve = app.add_subcommand("solve", "solve kick times for a scheme, print scheme JSON");
    add_common(solve);
    solve->add_option("--kind", kind_text, "frag or gzc")->required();
    solve->add_option("--n", n, "kick-strength multiplier")->required();
    CLI::App *run_cmd = app.add_subcommand("run", "simulate a single gate, print a JSON report");
    CLI::App *sweep_duration = app.add_subcommand("sweep-duration", "non-RWA pulse duration and phase sweep");
    CLI::App *sweep_xi = app.add_subcommand("sweep-xi", "pulse-area error sweep");
    CLI::App *pops = app.add_subcommand("populations", "final internal/number-state populations vs xi");
    CLI::App *traj = app.add_subcommand("trajectory", "phase-space trajectory and number-state snapshots");
    for (CLI::App *sub : {run_cmd, sweep_duration, sweep_xi, pops, traj})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig config = common.config.empty() ? RunConfig{} : load_run_config(common.config);
        const int threads = common.threads > 0                ? common.threads
                            : config.threads                  ? *config.threads
                                                              : std::max(1u, std::thread::hardware_concurrency());
        const std::string out_path = !common.out.empty() ? common.out : config.out.value_or("");

        std::ostringstream main_buf, summary_buf, snap_ideal, snap_xi, snap_nonrwa;
        if (solve->parsed()) {
            cmd_solve(config, parse_kind(kind_text), n, main_buf);
        } else if (run_cmd->parsed()) {
            cmd_run(config, main_buf);
        } else if (sweep_duration->parsed()) {
            const bool summary = config.summary && !out_path.empty();
            cmd_sweep_duration(config, threads, main_buf, summary ? &summary_buf : nullptr);
        } else if (sweep_xi->parsed()) {
            cmd_sweep_xi(config, threads, main_buf);
        } else if (pops->parsed()) {
            cmd_populations(config, threads, main_buf);
        } else if (traj->parsed()) {
            SnapshotStreams streams;
            if (!out_path.empty())
                streams = {&snap_ideal, &snap_xi, &snap_nonrwa};
            cmd_trajectory(config, main_buf, streams);
        }

        if (out_path.empty()) {
            out << main_buf.str();
            return kExitOk;
        }
        write_file(out_path, main_buf.str());
        if (sweep_duration->parsed() && config.summary)
            write_file(sibling(out_path, "_summary"), summary_buf.str());
        if (traj->parsed()) {
            write_file(sibling(out_path, "_snapshots_ideal"), snap_ideal.str());
            write_file(sibling(out_path, "_snapshots_pulse_area"), snap_xi.str());
            write_file(sibling(out_path, "_snapshots_nonrwa"), snap_nonrwa.str());
        }
        return kExitOk;
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace fastgate::cli

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

#include "fastgate/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fastgate {

using json = nlohmann::ordered_json;

std::string format_number(double value) {
    if (value == 0.0)
        return "0"; // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

CsvWriter::CsvWriter(std::ostream &os, std::vector<std::string> columns) : os_(os), columns_(std::move(columns)) {
    row(columns_);
}

void CsvWriter::row(const std::vector<std::string> &cells) {
    if (cells.size() != columns_.size())
        throw std::logic_error("CsvWriter: row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(columns_.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            os_ << ',';
        os_ << cells[i];
    }
    os_ << '\n';
}

json scheme_to_json(const PulseScheme &scheme) {
    json j;
    j["kind"] = std::string(to_string(scheme.kind));
    j["n"] = scheme.n;
    j["z"] = scheme.z;
    j["t"] = scheme.t;
    j["T_G"] = scheme.gate_time;
    j["residuals"] = scheme.residuals;
    return j;
}

PulseScheme scheme_from_json(const json &j) {
    try {
        const SchemeKind kind = parse_scheme_kind(j.at("kind").get<std::string>());
        const int n = j.at("n").get<int>();
        const auto z = j.at("z").get<std::array<int, kKickEvents>>();
        const auto t = j.at("t").get<std::array<double, kKickEvents>>();
        if (n < 1)
            throw std::invalid_argument("scheme: n must be >= 1");
        if (z != kick_vector(kind, n))
            throw std::invalid_argument("scheme: z does not match the kick vector of " +
                                        std::string(to_string(kind)) + " n=" + std::to_string(n));
        for (int k = 0; k < kKickEvents; ++k) {
            if (k > 0 && !(t[k] > t[k - 1]))
                throw std::invalid_argument("scheme: kick times must be strictly increasing");
            if (std::abs(t[k] + t[kKickEvents - 1 - k]) > 1e-12 * std::abs(t[k]))
                throw std::invalid_argument("scheme: kick times must be antisymmetric about 0");
        }
        PulseScheme s = make_scheme(kind, n, {t[5], t[4], t[3]});
        if (j.contains("residuals"))
            s.residuals = j.at("residuals").get<std::vector<double>>();
        return s;
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("scheme: ") + e.what());
    }
}

namespace {

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json occupation_json(const OccupationStats &o) { return {{"mean", o.mean}, {"std", o.std}}; }

} // namespace

json report_to_json(const GateReport &report) {
    json pops = json::object();
    for (const auto &[state, p] : report.populations)
        pops[std::string(to_string(state))] = p;
    return {{"fidelity", report.fidelity},
            {"infidelity", 1.0 - report.fidelity},
            {"T_G", report.gate_time},
            {"same_amplitude", complex_json(report.same_amplitude)},
            {"opposite_amplitude", complex_json(report.opposite_amplitude)},
            {"same_occupation", occupation_json(report.same_occupation)},
            {"opposite_occupation", occupation_json(report.opposite_occupation)},
            {"basis_dim", {{"same", report.same_dim}, {"opposite", report.opposite_dim}}},
            {"populations", pops}};
}

void write_snapshots_csv(std::ostream &os, const std::vector<ComplexVector> &snapshots, int dim) {
    CsvWriter csv(os, {"event_index", "internal_state", "n", "probability"});
    for (std::size_t e = 0; e < snapshots.size(); ++e)
        for (InternalState s : kInternalStates)
            for (int n = 0; n < dim; ++n)
                csv.row({std::to_string(e), std::string(to_string(s)), std::to_string(n),
                         format_number(std::norm(snapshots[e](static_cast<int>(s) * dim + n)))});
}

} // namespace fastgate

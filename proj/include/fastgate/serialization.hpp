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

#ifndef FASTGATE_SERIALIZATION_HPP
#define FASTGATE_SERIALIZATION_HPP

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fastgate/gatesim.hpp"
#include "fastgate/schemes.hpp"

namespace fastgate {

/// printf("%.12g"); the fixed format every CSV number goes through.
std::string format_number(double value);

/// Writes a header row on construction, then one comma-separated row per call.
class CsvWriter {
  public:
    CsvWriter(std::ostream &os, std::vector<std::string> columns);

    /// Cells are already-formatted strings; the count must match the header.
    void row(const std::vector<std::string> &cells);

    const std::vector<std::string> &columns() const { return columns_; }

  private:
    std::ostream &os_;
    std::vector<std::string> columns_;
};

/// {kind, n, z[6], t[6], T_G, residuals[3]}, times in seconds.
nlohmann::ordered_json scheme_to_json(const PulseScheme &scheme);

/// Inverse of scheme_to_json. z must match the kick vector of (kind, n) and t
/// must be antisymmetric and increasing; throws std::invalid_argument otherwise.
PulseScheme scheme_from_json(const nlohmann::ordered_json &j);

nlohmann::ordered_json report_to_json(const GateReport &report);

/// Columns event_index, internal_state, n, probability; one row per event,
/// internal state and number state.
void write_snapshots_csv(std::ostream &os, const std::vector<ComplexVector> &snapshots, int dim);

} // namespace fastgate

#endif

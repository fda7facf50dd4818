// SPDX-License-Identifier: Apache-2.0
//
// srbf - robust transmit beamforming for symbiotic radio
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SRBF_SCENARIO_IO_HPP
#define SRBF_SCENARIO_IO_HPP

#include "srbf/channel.hpp"

#include <string>
#include <utility>
#include <vector>

namespace srbf {

/// One `key = value` line of a scenario document.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits a flat key-value document. `#` starts a comment; blank lines are
/// skipped. Duplicate keys and lines without `=` are parse errors.
std::vector<KeyValue> parse_key_values(const std::string& text);

/// Reads a whole file; Error(io_error) if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Real literal, `pi`, or a product/quotient of those (e.g. `-pi/3`,
/// `2*pi/3`). A trailing `dBm` converts the value to watts.
double parse_real(const std::string& token);

std::vector<double> parse_real_list(const std::string& value);
std::vector<int> parse_int_list(const std::string& value);

/// Applies one scenario key to `cfg`. Returns false for keys that are not
/// SystemConfig fields (or `placement`).
bool apply_scenario_key(SystemConfig& cfg, const KeyValue& kv);

/// Broadcasts single-entry per-user lists to K entries, then validates.
void finalize_scenario(SystemConfig& cfg);

/// Parses a scenario document on top of SystemConfig::reference(). Presence of
/// `L_k` selects the clustered model, `L` the general model; both is an error.
/// Unknown keys are an error.
SystemConfig parse_scenario(const std::string& text);
SystemConfig load_scenario(const std::string& path);

/// Inverse of parse_scenario (round-trips to the last bit).
std::string format_scenario(const SystemConfig& cfg);

}  // namespace srbf

#endif  // SRBF_SCENARIO_IO_HPP

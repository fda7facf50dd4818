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

#include "srbf/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

namespace srbf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

double parse_factor(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "pi") return std::numbers::pi;
  if (s.empty()) parse_fail("empty number");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) parse_fail("bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    parse_fail("bad integer '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, int>) {
      out += std::to_string(v[i]);
    } else {
      out += format_double(v[i]);
    }
  }
  return out;
}

template <typename T>
void broadcast(std::vector<T>& v, int K) {
  if (v.size() == 1 && K > 1) v.assign(static_cast<std::size_t>(K), v.front());
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail("line " + std::to_string(number) + ": expected 'key = value'");
    }
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), number};
    if (kv.key.empty()) parse_fail("line " + std::to_string(number) + ": empty key");
    if (!seen.insert(kv.key).second) {
      parse_fail("line " + std::to_string(number) + ": duplicate key '" + kv.key + "'");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_real(const std::string& token) {
  std::string s = trim(token);
  bool dbm = false;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "dBm") == 0) {
    dbm = true;
    s = trim(s.substr(0, s.size() - 3));
  }
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+') && s.find_first_of("*/") != std::string::npos) {
    // leading sign applies to the whole product, e.g. -pi/3
    if (s[0] == '-') sign = -1.0;
    s = s.substr(1);
  }
  double value = 1.0;
  char op = '*';
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '*' || s[i] == '/') {
      const double f = parse_factor(s.substr(start, i - start));
      value = (op == '*') ? value * f : value / f;
      if (i < s.size()) op = s[i];
      start = i + 1;
    }
  }
  value *= sign;
  if (!std::isfinite(value)) parse_fail("non-finite value '" + token + "'");
  return dbm ? dbm_to_watts(value) : value;
}

std::vector<double> parse_real_list(const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_real(item));
  if (out.empty()) parse_fail("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_int(item));
  if (out.empty()) parse_fail("empty list");
  return out;
}

bool apply_scenario_key(SystemConfig& cfg, const KeyValue& kv) {
  const std::string& k = kv.key;
  const std::string& v = kv.value;
  if (k == "M") {
    cfg.M = parse_int(v);
  } else if (k == "K") {
    cfg.K = parse_int(v);
  } else if (k == "L") {
    cfg.model = ChannelModel::general;
    cfg.L = parse_int(v);
    cfg.L_k.clear();
  } else if (k == "L_k") {
    cfg.model = ChannelModel::clustered;
    cfg.L_k = parse_int_list(v);
  } else if (k == "alpha") {
    cfg.alpha = parse_real(v);
  } else if (k == "N") {
    cfg.N = parse_int(v);
  } else if (k == "noise_power_k") {
    cfg.noise_power_k = parse_real_list(v);
  } else if (k == "carrier_wavelength") {
    cfg.carrier_wavelength = parse_real(v);
  } else if (k == "antenna_gain_bs_db") {
    cfg.antenna_gain_bs_db = parse_real(v);
  } else if (k == "antenna_gain_user_db") {
    cfg.antenna_gain_user_db = parse_real(v);
  } else if (k == "pathloss_exponent") {
    cfg.pathloss_exponent = parse_real(v);
  } else if (k == "user_distances") {
    cfg.user_distances = parse_real_list(v);
  } else if (k == "doa_k") {
    cfg.doa_k = parse_real_list(v);
  } else if (k == "as_k") {
    cfg.as_k = parse_real_list(v);
  } else if (k == "reflective_deficit_db") {
    cfg.reflective_deficit_db = parse_real(v);
  } else if (k == "rate_target_cellular_k") {
    cfg.rate_target_cellular_k = parse_real_list(v);
  } else if (k == "rate_target_iot_k") {
    cfg.rate_target_iot_k = parse_real_list(v);
  } else if (k == "outage_target") {
    cfg.outage_target = parse_real(v);
  } else if (k == "placement") {
    if (v == "uniform_grid") {
      cfg.placement = Placement::uniform_grid;
    } else if (v == "seeded_random") {
      cfg.placement = Placement::seeded_random;
    } else {
      parse_fail("line " + std::to_string(kv.line) + ": unknown placement '" + v + "'");
    }
  } else {
    return false;
  }
  return true;
}

void finalize_scenario(SystemConfig& cfg) {
  broadcast(cfg.L_k, cfg.K);
  broadcast(cfg.noise_power_k, cfg.K);
  broadcast(cfg.user_distances, cfg.K);
  broadcast(cfg.doa_k, cfg.K);
  broadcast(cfg.as_k, cfg.K);
  broadcast(cfg.rate_target_cellular_k, cfg.K);
  broadcast(cfg.rate_target_iot_k, cfg.K);
  cfg.validate();
}

SystemConfig parse_scenario(const std::string& text) {
  SystemConfig cfg = SystemConfig::reference();
  bool has_L = false;
  bool has_Lk = false;
  for (const auto& kv : parse_key_values(text)) {
    has_L = has_L || kv.key == "L";
    has_Lk = has_Lk || kv.key == "L_k";
    if (!apply_scenario_key(cfg, kv)) {
      throw Error(ErrorCode::invalid_config,
                  "line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
  }
  if (has_L && has_Lk) throw Error(ErrorCode::invalid_config, "both L and L_k given");
  finalize_scenario(cfg);
  return cfg;
}

SystemConfig load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

std::string format_scenario(const SystemConfig& cfg) {
  std::ostringstream out;
  out << "M = " << cfg.M << '\n' << "K = " << cfg.K << '\n';
  if (cfg.model == ChannelModel::general) {
    out << "L = " << cfg.L << '\n';
  } else {
    out << "L_k = " << join(cfg.L_k) << '\n';
  }
  out << "placement = "
      << (cfg.placement == Placement::uniform_grid ? "uniform_grid" : "seeded_random") << '\n';
  out << "alpha = " << format_double(cfg.alpha) << '\n';
  out << "N = " << cfg.N << '\n';
  out << "noise_power_k = " << join(cfg.noise_power_k) << '\n';
  out << "carrier_wavelength = " << format_double(cfg.carrier_wavelength) << '\n';
  out << "antenna_gain_bs_db = " << format_double(cfg.antenna_gain_bs_db) << '\n';
  out << "antenna_gain_user_db = " << format_double(cfg.antenna_gain_user_db) << '\n';
  out << "pathloss_exponent = " << format_double(cfg.pathloss_exponent) << '\n';
  out << "user_distances = " << join(cfg.user_distances) << '\n';
  if (cfg.model == ChannelModel::clustered) {
    out << "doa_k = " << join(cfg.doa_k) << '\n';
    out << "as_k = " << join(cfg.as_k) << '\n';
  }
  out << "reflective_deficit_db = " << format_double(cfg.reflective_deficit_db) << '\n';
  out << "rate_target_cellular_k = " << join(cfg.rate_target_cellular_k) << '\n';
  out << "rate_target_iot_k = " << join(cfg.rate_target_iot_k) << '\n';
  out << "outage_target = " << format_double(cfg.outage_target) << '\n';
  return out.str();
}

}  // namespace srbf

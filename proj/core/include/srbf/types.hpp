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

#ifndef SRBF_TYPES_HPP
#define SRBF_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace srbf {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

enum class ErrorCode {
  invalid_probability,
  invalid_dof,
  not_hermitian,
  indefinite,
  dimension_mismatch,
  invalid_config,
  nonpositive_distance,
  not_rank_one,
  no_feasible_candidate,
  subproblem_infeasible,
  io_error,
  parse_error,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures surface as srbf::Error; code() identifies the contract
// that was violated so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_probability: return "invalid-probability";
    case ErrorCode::invalid_dof: return "invalid-dof";
    case ErrorCode::not_hermitian: return "not-hermitian";
    case ErrorCode::indefinite: return "indefinite";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::nonpositive_distance: return "nonpositive-distance";
    case ErrorCode::not_rank_one: return "not-rank-one";
    case ErrorCode::no_feasible_candidate: return "no-feasible-candidate";
    case ErrorCode::subproblem_infeasible: return "subproblem-infeasible";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::parse_error: return "parse-error";
  }
  return "unknown";
}

}  // namespace srbf

#endif  // SRBF_TYPES_HPP

// Copyright 2026 The cvmdi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Trial datasets on disk: a columnar CSV
//   # cvmdi-trials v1
//   alpha_re,alpha_im,beta_re,beta_im,gamma_re,gamma_im
// plus a JSON sidecar with params, attack, seed and n.

#ifndef CVMDI_DATASET_IO_HPP
#define CVMDI_DATASET_IO_HPP

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cvmdi/simulation.hpp"

namespace cvmdi {

inline constexpr const char* kTrialsSchema = "cvmdi-trials v1";
inline constexpr const char* kTrialsColumns =
    "alpha_re,alpha_im,beta_re,beta_im,gamma_re,gamma_im";

inline nlohmann::json to_json(const ProtocolParams& p) {
  return {{"mu", p.mu}, {"tau_a", p.tau_a}, {"tau_b", p.tau_b}};
}

inline nlohmann::json to_json(const TwoModeAttack& a) {
  return {{"omega_a", a.omega_a},
          {"omega_b", a.omega_b},
          {"g", a.g},
          {"g_prime", a.g_prime}};
}

inline nlohmann::json to_json(const CovarianceMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < cm.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < cm.dim(); ++j) row.push_back(cm(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json dataset_sidecar(const TrialDataset& data) {
  return {{"schema", kTrialsSchema},
          {"n", data.records.size()},
          {"seed", data.seed},
          {"params", to_json(data.params)},
          {"attack", to_json(data.attack)}};
}

inline void write_dataset_csv(const TrialDataset& data, std::ostream& os) {
  os << "# " << kTrialsSchema << '\n' << kTrialsColumns << '\n';
  os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : data.records) {
    os << r.alpha.real() << ',' << r.alpha.imag() << ',' << r.beta.real() << ','
       << r.beta.imag() << ',' << r.gamma.real() << ',' << r.gamma.imag()
       << '\n';
  }
}

/// Reads a dataset back from its CSV and sidecar. Throws ValidationError on
/// schema mismatch, malformed rows, or a row count that disagrees with n.
inline TrialDataset read_dataset(std::istream& csv,
                                 const nlohmann::json& sidecar) {
  TrialDataset data;
  std::size_t expected = 0;
  try {
    detail::require(sidecar.at("schema").get<std::string>() == kTrialsSchema,
                    "unsupported dataset schema");
    const auto& p = sidecar.at("params");
    data.params = {p.at("mu").get<double>(), p.at("tau_a").get<double>(),
                   p.at("tau_b").get<double>()};
    const auto& a = sidecar.at("attack");
    data.attack = {a.at("omega_a").get<double>(), a.at("omega_b").get<double>(),
                   a.at("g").get<double>(), a.at("g_prime").get<double>()};
    data.seed = sidecar.at("seed").get<std::uint64_t>();
    expected = sidecar.at("n").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed dataset sidecar: ") + e.what());
  }

  std::string line;
  detail::require(std::getline(csv, line) && line == std::string("# ") +
                                                         kTrialsSchema,
                  "dataset CSV is missing its schema line");
  detail::require(std::getline(csv, line) && line == kTrialsColumns,
                  "dataset CSV has an unexpected header");
  data.records.reserve(expected);
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[6];
    char sep = 0;
    for (int k = 0; k < 6; ++k) {
      detail::require(static_cast<bool>(row >> v[k]), "malformed dataset row");
      if (k < 5) {
        detail::require(row >> sep && sep == ',', "malformed dataset row");
      }
    }
    data.records.push_back({{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}});
  }
  detail::require(data.records.size() == expected,
                  "dataset row count does not match sidecar");
  return data;
}

}  // namespace cvmdi

#endif  // CVMDI_DATASET_IO_HPP

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rootstate/basis.hpp"
#include "rootstate/ehrenfest.hpp"
#include "rootstate/estimator.hpp"
#include "rootstate/inference.hpp"
#include "rootstate/sampling.hpp"
#include "rootstate/state.hpp"

namespace rootstate {

using json = nlohmann::ordered_json;

/// Thrown for malformed files; message carries path and line where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json continuous_basis_to_json(const ContinuousBasis& basis);
json discrete_basis_to_json(const DiscreteBasis& basis);

/// {"s": .., "re": [..], "im": [..], "basis": {..}}
json state_to_json(const StateVector& state, const json& basis = json());
StateVector state_from_json(const json& j);

json result_to_json(const EstimationResult& result, const json& basis = json());

json counts_to_json(const RegisterCounts& counts);
RegisterCounts counts_from_json(const json& j);
RegisterCounts read_counts_file(const std::string& path);
void write_counts_file(const std::string& path, const RegisterCounts& counts);

json test_report_to_json(const TestReport& report);
json cone_to_json(const ConfidenceCone& cone);
json ehrenfest_report_to_json(const EhrenfestReport& report);
json order_selection_to_json(const OrderSelection& selection);

/// Sample CSV: header "# space=coordinate|momentum scale=<a>", one
/// observation per line.
struct SampleFile {
  std::string space;  // "coordinate" or "momentum"
  double scale = 1.0;
  Eigen::VectorXd points;
};

void write_sample_file(const std::string& path, const SampleFile& sample);
SampleFile read_sample_file(const std::string& path);

}  // namespace rootstate

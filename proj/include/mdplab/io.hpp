#pragma once

#include "mdplab/ccrb.hpp"
#include "mdplab/estimators.hpp"
#include "mdplab/simulate.hpp"
#include "mdplab/theory_checks.hpp"
#include "mdplab/variance.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace mdplab {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

// { gamma, states, actions, P[s][a][s'], r_mean[s][a], r_std[s][a] }
json model_to_json(const MdpModel& model);
MdpModel model_from_json(const json& j);
std::string model_hash(const MdpModel& model);

// { crucial_states, arms: [{ label, overrides: { state: { row, r_mean, r_std } } }] }
// States may be given by name or by index.
json spec_to_json(const TreatmentSpec& spec, const MdpModel& model);
TreatmentSpec spec_from_json(const json& j, const MdpModel& model);

// { "pi": [[...]] } or { "actions": [...] }
PolicyMatrix policy_from_json(const json& j, const MdpModel& model);

// JSON lines: one header record, then one record per transition.
void write_trajectory(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory(std::istream& is);

json to_json(const Vector& v);
json to_json(const Matrix& m);
json to_json(const EstimateReport& r);
json to_json(const VarianceReport& r);
json to_json(const BoundReport& r);
json to_json(const ErgodicityCertificate& c);
json to_json(const ComparisonVerdict& v);

}  // namespace mdplab

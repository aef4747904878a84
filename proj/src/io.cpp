#include "mdplab/io.hpp"

#include "mdplab/hash.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace mdplab {

namespace {

int state_ref(const json& key, const MdpModel& model) {
  if (key.is_number_integer()) {
    int s = key.get<int>();
    if (s < 0 || s >= model.num_states()) throw ConfigError("state index out of range");
    return s;
  }
  std::string name = key.get<std::string>();
  for (int s = 0; s < model.num_states(); ++s)
    if (model.state_names()[s] == name) return s;
  bool digits = !name.empty() && name.find_first_not_of("0123456789") == std::string::npos;
  if (digits) return state_ref(json(std::stoi(name)), model);
  throw ConfigError("unknown state '" + name + "'");
}

Vector vec(const json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

json model_to_json(const MdpModel& model) {
  const int K = model.num_states();
  const int A = model.num_actions();
  json P = json::array(), rm = json::array(), rs = json::array();
  for (int s = 0; s < K; ++s) {
    json ps = json::array(), ms = json::array(), ss = json::array();
    for (int a = 0; a < A; ++a) {
      ps.push_back(to_json(model.row(s, a)));
      ms.push_back(model.r_mean()(s, a));
      ss.push_back(model.r_std()(s, a));
    }
    P.push_back(ps);
    rm.push_back(ms);
    rs.push_back(ss);
  }
  return {{"gamma", model.gamma()}, {"states", model.state_names()},
          {"actions", model.action_names()}, {"P", P}, {"r_mean", rm}, {"r_std", rs}};
}

MdpModel model_from_json(const json& j) {
  try {
    double gamma = j.at("gamma").get<double>();
    auto states = j.at("states").get<std::vector<std::string>>();
    auto actions = j.at("actions").get<std::vector<std::string>>();
    const int K = static_cast<int>(states.size());
    const int A = static_cast<int>(actions.size());
    const json& P = j.at("P");
    const json& rm = j.at("r_mean");
    const json& rs = j.at("r_std");
    if (static_cast<int>(P.size()) != K || static_cast<int>(rm.size()) != K ||
        static_cast<int>(rs.size()) != K) {
      throw ConfigError("P, r_mean and r_std need one entry per state");
    }
    std::vector<Matrix> Pa(A, Matrix::Zero(K, K));
    Matrix mean(K, A), sd(K, A);
    for (int s = 0; s < K; ++s) {
      if (static_cast<int>(P[s].size()) != A || static_cast<int>(rm[s].size()) != A ||
          static_cast<int>(rs[s].size()) != A) {
        throw ConfigError("each state needs one entry per action");
      }
      for (int a = 0; a < A; ++a) {
        Vector row = vec(P[s][a]);
        if (row.size() != K) throw ConfigError("transition rows need K entries");
        Pa[a].row(s) = row.transpose();
        mean(s, a) = rm[s][a].get<double>();
        sd(s, a) = rs[s][a].get<double>();
      }
    }
    return MdpModel(gamma, states, actions, std::move(Pa), mean, sd);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::string model_hash(const MdpModel& model) {
  return hex64(fnv1a64(model_to_json(model).dump()));
}

json spec_to_json(const TreatmentSpec& spec, const MdpModel& model) {
  json crucial = json::array();
  for (int s : spec.crucial_states()) crucial.push_back(model.state_names()[s]);
  json arms = json::array();
  for (const ArmSpec& a : spec.arms()) {
    json ov = json::object();
    for (const auto& [s, o] : a.overrides) {
      ov[model.state_names()[s]] = {{"row", to_json(o.row)}, {"r_mean", o.r_mean},
                                    {"r_std", o.r_std}};
    }
    arms.push_back({{"label", a.label}, {"overrides", ov}});
  }
  return {{"crucial_states", crucial}, {"arms", arms}};
}

TreatmentSpec spec_from_json(const json& j, const MdpModel& model) {
  try {
    std::vector<int> crucial;
    for (const json& s : j.at("crucial_states")) crucial.push_back(state_ref(s, model));
    std::vector<ArmSpec> arms;
    for (const json& a : j.at("arms")) {
      ArmSpec arm{a.at("label").get<std::string>(), {}};
      if (a.contains("overrides")) {
        for (const auto& [key, o] : a.at("overrides").items()) {
          StateOverride so;
          so.row = vec(o.at("row"));
          so.r_mean = o.at("r_mean").get<double>();
          so.r_std = o.value("r_std", 0.0);
          arm.overrides[state_ref(json(key), model)] = so;
        }
      }
      arms.push_back(std::move(arm));
    }
    return TreatmentSpec(crucial, arms);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("treatment spec: ") + e.what());
  }
}

PolicyMatrix policy_from_json(const json& j, const MdpModel& model) {
  try {
    if (j.contains("actions")) {
      std::vector<int> acts;
      for (const json& a : j.at("actions")) {
        int idx = a.is_number_integer() ? a.get<int>() : model.action_index(a.get<std::string>());
        acts.push_back(idx);
      }
      if (static_cast<int>(acts.size()) != model.num_states()) {
        throw ConfigError("policy needs one action per state");
      }
      return PolicyMatrix::deterministic(model.num_actions(), acts);
    }
    const json& pi = j.at("pi");
    Matrix m(model.num_states(), model.num_actions());
    if (static_cast<int>(pi.size()) != model.num_states()) throw ConfigError("policy shape");
    for (int s = 0; s < model.num_states(); ++s) {
      Vector row = vec(pi[s]);
      if (row.size() != model.num_actions()) throw ConfigError("policy shape");
      m.row(s) = row.transpose();
    }
    return PolicyMatrix(m);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
}

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  json head = {{"type", "header"},          {"seed", traj.seed},
               {"policy", traj.policy},     {"model_hash", traj.model_hash},
               {"num_states", traj.num_states}, {"num_actions", traj.num_actions},
               {"T", traj.steps.size()}};
  os << head.dump() << "\n";
  for (const Transition& x : traj.steps) {
    json rec = {{"s", x.s}, {"a", x.a}, {"s_next", x.s_next}, {"r", x.r}, {"arm", x.arm}};
    os << rec.dump() << "\n";
  }
}

Trajectory read_trajectory(std::istream& is) {
  Trajectory traj;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("trajectory: ") + e.what());
    }
    if (!have_header) {
      if (j.value("type", "") != "header") throw ConfigError("trajectory lacks a header record");
      traj.seed = j.at("seed").get<std::uint64_t>();
      traj.policy = j.at("policy").get<std::string>();
      traj.model_hash = j.at("model_hash").get<std::string>();
      traj.num_states = j.at("num_states").get<int>();
      traj.num_actions = j.at("num_actions").get<int>();
      have_header = true;
      continue;
    }
    traj.steps.push_back({j.at("s").get<int>(), j.at("a").get<int>(), j.at("s_next").get<int>(),
                          j.at("r").get<double>(), j.value("arm", j.at("a").get<int>())});
  }
  if (!have_header) throw ConfigError("empty trajectory file");
  return traj;
}

json to_json(const EstimateReport& r) {
  json j = {{"estimator", r.estimator}, {"target", r.target}, {"point", to_json(r.point)},
            {"flags", r.flags},         {"T", r.T},           {"inputs_hash", r.inputs_hash}};
  if (r.arm_i >= 0) {
    j["arm_i"] = r.arm_i;
    j["arm_j"] = r.arm_j;
  }
  if (r.plug_in_variance) j["plug_in_variance"] = to_json(*r.plug_in_variance);
  if (r.ci95) {
    json ci = json::array();
    for (const Interval& iv : *r.ci95) ci.push_back({iv.lo, iv.hi});
    j["ci95"] = ci;
  }
  return j;
}

json to_json(const VarianceReport& r) {
  json rho = json::array(), values = json::array();
  for (const Vector& v : r.rho) rho.push_back(to_json(v));
  for (const Vector& v : r.values) values.push_back(to_json(v));
  json j = {{"estimator", r.estimator}, {"state", r.state},       {"full", to_json(r.full)},
            {"at_state", r.at_state},   {"mu", to_json(r.mu)},    {"rho", rho},
            {"values", values}};
  if (r.arm_i >= 0) {
    j["arm_i"] = r.arm_i;
    j["arm_j"] = r.arm_j;
  }
  if (r.het) j["het"] = *r.het;
  if (r.hom) j["hom"] = *r.hom;
  return j;
}

json to_json(const BoundReport& r) {
  return {{"name", r.name}, {"matrix", to_json(r.matrix)}, {"num_parameters", r.num_parameters}};
}

json to_json(const ErgodicityCertificate& c) {
  json ladder = json::array();
  for (const auto& [k, tv] : c.tv_ladder) ladder.push_back({{"k", k}, {"tv", tv}});
  return {{"irreducible", c.irreducible}, {"aperiodic", c.aperiodic}, {"period", c.period},
          {"unreached", c.unreached},     {"tv_ladder", ladder},      {"mixing_ok", c.mixing_ok}};
}

json to_json(const ComparisonVerdict& v) {
  json checks = json::array();
  for (const Check& c : v.checks) {
    checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs},
                      {"relation", c.relation}, {"pass", c.pass}});
  }
  return {{"all_pass", v.all_pass()}, {"failures", v.failures()}, {"checks", checks}};
}

}  // namespace mdplab

#include "harness/config.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace bandlab::harness {

using nlohmann::json;

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::kLaplacian: return "laplacian";
    case ModelKind::kBetaLimit: return "beta_limit";
    case ModelKind::kWigner: return "wigner";
  }
  return "?";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "laplacian") return ModelKind::kLaplacian;
  if (name == "beta_limit") return ModelKind::kBetaLimit;
  if (name == "wigner") return ModelKind::kWigner;
  throw std::invalid_argument("unknown model: " + name);
}

namespace {

const std::vector<std::string> kExperiments{"local_law",   "trace_law",
                                            "entrywise_failure", "boundedness",
                                            "spectral_statistics", "concentration"};

void reject_unknown(const json& j, const std::vector<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
    throw std::invalid_argument("config: unknown experiment \"" + experiment + "\"");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (n_list.empty()) throw std::invalid_argument("config: N_list must be nonempty");
  for (auto n : n_list) {
    if (n < 2) throw std::invalid_argument("config: every N must be >= 2");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("config: epsilon must be in (0,1)");
  if (!(kappa > 0.0 && kappa < 2.0)) throw std::invalid_argument("config: kappa must be in (0,2)");
  if (removal_exponent < 1) throw std::invalid_argument("config: p must be >= 1");
  if (mesh.n_energy < 1 || mesh.n_eta < 1)
    throw std::invalid_argument("config: mesh sizes must be >= 1");
  if (entry_policy.kind == EntryPolicy::Kind::kSampled && entry_policy.random_pairs < 0) {
    throw std::invalid_argument("config: entry_policy.R must be >= 0");
  }
  noise.validate();
  if (experiment == "concentration" && !concentration) {
    throw std::invalid_argument("config: concentration experiment needs a concentration object");
  }
  if (experiment == "local_law" && model == ModelKind::kWigner) {
    for (auto n : n_list) {
      if (n > 256) {
        throw std::invalid_argument(
            "config: local_law with the wigner model needs N <= 256 (dense reference solves)");
      }
    }
  }
}

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["experiment"] = experiment;
  j["model"] = model_name(model);
  j["noise"] = json::parse(noise.to_json_string());
  j["N_list"] = n_list;
  j["epsilon"] = epsilon;
  j["kappa"] = kappa;
  j["p"] = removal_exponent;
  j["mesh"] = {{"nE", mesh.n_energy}, {"nEta", mesh.n_eta}};
  j["trials"] = trials;
  if (entry_policy.kind == EntryPolicy::Kind::kFull) {
    j["entry_policy"] = {{"type", "full"}};
  } else {
    j["entry_policy"] = {{"type", "sampled"}, {"R", entry_policy.random_pairs}};
  }
  j["master_seed"] = master_seed;
  j["output_dir"] = output_dir;
  if (concentration) {
    const auto& c = *concentration;
    j["concentration"] = {{"N", c.n},
                          {"alpha", c.alpha},
                          {"q_exponent", c.q_exponent},
                          {"xi_list", c.xi_list},
                          {"nu", c.nu},
                          {"replications", c.replications},
                          {"psi", c.psi},
                          {"psi_scale", c.psi_scale}};
  }
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  reject_unknown(j,
                 {"experiment", "model", "noise", "N_list", "epsilon", "kappa", "p", "mesh",
                  "trials", "entry_policy", "master_seed", "output_dir", "concentration"},
                 "top level");
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  if (j.contains("model")) c.model = model_from_name(j.at("model").get<std::string>());
  bool omega_given = false;
  if (j.contains("noise")) {
    c.noise = noise::NoiseSpec::from_json_string(j.at("noise").dump());
    omega_given = j.at("noise").contains("omega");
  } else {
    c.noise.family = noise::NoiseFamily::kZero;
  }
  if (j.contains("N_list")) c.n_list = j.at("N_list").get<std::vector<std::int64_t>>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
  if (j.contains("p")) c.removal_exponent = j.at("p").get<int>();
  if (j.contains("mesh")) {
    reject_unknown(j.at("mesh"), {"nE", "nEta"}, "mesh");
    if (j.at("mesh").contains("nE")) c.mesh.n_energy = j.at("mesh").at("nE").get<int>();
    if (j.at("mesh").contains("nEta")) c.mesh.n_eta = j.at("mesh").at("nEta").get<int>();
  }
  if (j.contains("trials")) c.trials = j.at("trials").get<int>();
  if (j.contains("entry_policy")) {
    const auto& ep = j.at("entry_policy");
    reject_unknown(ep, {"type", "R"}, "entry_policy");
    const auto type = ep.at("type").get<std::string>();
    if (type == "full") {
      c.entry_policy.kind = EntryPolicy::Kind::kFull;
    } else if (type == "sampled") {
      c.entry_policy.kind = EntryPolicy::Kind::kSampled;
      if (ep.contains("R")) c.entry_policy.random_pairs = ep.at("R").get<std::int64_t>();
    } else {
      throw std::invalid_argument("config: entry_policy.type must be full or sampled");
    }
  }
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("epsilon") || !omega_given) {
    // the truncation exponent omega binds to the run's epsilon unless the
    // noise object pins it explicitly
    if (!omega_given) c.noise.omega = c.epsilon;
  }
  if (j.contains("concentration")) {
    const auto& jc = j.at("concentration");
    reject_unknown(jc, {"N", "alpha", "q_exponent", "xi_list", "nu", "replications", "psi",
                        "psi_scale"},
                   "concentration");
    ConcentrationSpec s;
    if (jc.contains("N")) s.n = jc.at("N").get<std::int64_t>();
    if (jc.contains("alpha")) s.alpha = jc.at("alpha").get<double>();
    if (jc.contains("q_exponent")) s.q_exponent = jc.at("q_exponent").get<double>();
    if (jc.contains("xi_list")) s.xi_list = jc.at("xi_list").get<std::vector<int>>();
    if (jc.contains("nu")) s.nu = jc.at("nu").get<double>();
    if (jc.contains("replications")) s.replications = jc.at("replications").get<std::int64_t>();
    if (jc.contains("psi")) s.psi = jc.at("psi").get<std::string>();
    if (jc.contains("psi_scale")) s.psi_scale = jc.at("psi_scale").get<double>();
    if (s.psi != "ones" && s.psi != "ramp") {
      throw std::invalid_argument("config: concentration.psi must be ones or ramp");
    }
    c.concentration = s;
  }
  c.validate();
  return c;
}

}  // namespace bandlab::harness

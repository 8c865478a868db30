#include "fcdiff/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <numbers>
#include <sstream>

#include "fcdiff/builtins.hpp"

namespace fcdiff {

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

template <class T>
T as(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node || !node.IsScalar()) throw ConfigError(path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
  }
}

double number(const YAML::Node& map, const std::string& key, const std::string& path) {
  return as<double>(map[key], child(path, key), "a number");
}

double number_or(const YAML::Node& map, const std::string& key, const std::string& path, double fallback) {
  return map[key] ? number(map, key, path) : fallback;
}

void reject_unknown(const YAML::Node& map, std::initializer_list<const char*> known, const std::string& path) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(child(path, key), "unknown field");
  }
}

// Single-key map {kind: body}, or a bare scalar kind.
std::pair<std::string, YAML::Node> tagged(const YAML::Node& node, const std::string& path) {
  if (node.IsScalar()) return {node.Scalar(), YAML::Node()};
  if (!node.IsMap() || node.size() != 1) throw ConfigError(path, "expected a single-key map like {kind: ...}");
  const auto it = node.begin();
  return {it->first.as<std::string>(), it->second};
}

PowerProfile parse_profile(const YAML::Node& node, const std::string& path) {
  auto [kind, body] = tagged(node, path);
  const std::string p = child(path, kind);
  try {
    if (kind == "sinusoidal") {
      if (!body.IsMap()) throw ConfigError(p, "expected a map with beta and omega or period");
      reject_unknown(body, {"beta", "omega", "period"}, p);
      const double beta = number_or(body, "beta", p, 1.0);
      if (body["period"] && body["omega"]) throw ConfigError(p, "give either omega or period, not both");
      if (body["period"]) return PowerProfile::sinusoid_with_period(beta, number(body, "period", p));
      return PowerProfile(Sinusoidal{beta, number(body, "omega", p)});
    }
    if (kind == "pulsed") {
      if (!body.IsMap()) throw ConfigError(p, "expected a map with p1, p2, period, alpha");
      reject_unknown(body, {"p1", "p2", "period", "alpha"}, p);
      return PowerProfile(Pulsed{number(body, "p1", p), number(body, "p2", p),
                                 as<long>(body["period"], child(p, "period"), "an integer"), number(body, "alpha", p)});
    }
    if (kind == "constant") return PowerProfile(Constant{as<double>(body, p, "a number")});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p, e.what());
  }
  throw ConfigError(path, "unknown profile '" + kind + "' (sinusoidal, pulsed, constant)");
}

InputDistribution parse_distribution(const YAML::Node& node, const std::string& path) {
  auto [kind, body] = tagged(node, path);
  if (kind == "gaussian") return InputDistribution::gaussian();
  if (kind == "uniform") return InputDistribution::uniform();
  if (kind == "laplacian") return InputDistribution::laplacian();
  if (kind == "gaussian_fifth_power") return InputDistribution::gaussian_fifth_power();
  if (kind == "three_point") {
    const std::string p = child(path, kind);
    try {
      return InputDistribution::three_point(as<double>(body, p, "a kurtosis"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p, e.what());
    }
  }
  throw ConfigError(path,
                    "unknown distribution '" + kind + "' (gaussian, uniform, laplacian, gaussian_fifth_power, three_point)");
}

// Node entry merged over node_defaults.
NodeConfig parse_node(const YAML::Node& node, const YAML::Node& defaults, const std::string& path) {
  auto pick = [&](const char* key) -> std::pair<YAML::Node, std::string> {
    if (node[key]) return {node[key], child(path, key)};
    if (defaults && defaults[key]) return {defaults[key], child("node_defaults", key)};
    return {YAML::Node(), child(path, key)};
  };
  NodeConfig out;
  auto required = [&](const char* key) {
    auto r = pick(key);
    if (!r.first) throw ConfigError(r.second, "missing required field");
    return r;
  };
  {
    auto [n, p] = required("weight");
    out.weight = as<double>(n, p, "a number");
  }
  {
    auto [n, p] = required("step");
    out.step = as<double>(n, p, "a number");
  }
  {
    auto [n, p] = pick("noise_power");
    out.noise_power = n ? as<double>(n, p, "a number") : 0.0;
  }
  {
    auto [n, p] = required("profile");
    out.profile = parse_profile(n, p);
  }
  {
    auto [n, p] = required("distribution");
    out.dist = parse_distribution(n, p);
  }
  return out;
}

const char* const kNodeKeys[] = {"weight", "step", "noise_power", "profile", "distribution", "count"};

void check_node_keys(const YAML::Node& node, const std::string& path) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* k : kNodeKeys) ok = ok || key == k;
    if (!ok) throw ConfigError(child(path, key), "unknown field");
  }
}

}  // namespace

void ExperimentSpec::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  if (horizon < 1) throw ConfigError("horizon", "must be >= 1");
  try {
    network.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", std::string("constraint violation: ") + e.what());
  }
}

ExperimentSpec parse_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("YAML syntax error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("", "expected a mapping at the top level");
  reject_unknown(root,
                 {"name", "algorithm", "strategy", "taps", "nlms_epsilon", "runs", "horizon", "seed", "theory_model",
                  "output", "plant", "node_defaults", "nodes"},
                 "");

  ExperimentSpec spec;
  spec.name = as<std::string>(root["name"], "name", "a string");
  spec.output = root["output"] ? as<std::string>(root["output"], "output", "a string") : spec.name;
  if (root["runs"]) spec.runs = as<long>(root["runs"], "runs", "an integer");
  if (root["horizon"]) spec.horizon = as<long>(root["horizon"], "horizon", "an integer");
  if (root["seed"]) spec.master_seed = as<std::uint64_t>(root["seed"], "seed", "a non-negative integer");

  auto& net = spec.network;
  const auto algorithm = root["algorithm"] ? as<std::string>(root["algorithm"], "algorithm", "a string") : "dlms";
  if (algorithm == "dlms")
    net.algorithm = Algorithm::Dlms;
  else if (algorithm == "dnlms")
    net.algorithm = Algorithm::Dnlms;
  else
    throw ConfigError("algorithm", "expected dlms or dnlms, got '" + algorithm + "'");

  const auto strategy = root["strategy"] ? as<std::string>(root["strategy"], "strategy", "a string") : "cta";
  if (strategy == "cta")
    net.strategy = Strategy::Cta;
  else if (strategy == "atc")
    net.strategy = Strategy::Atc;
  else
    throw ConfigError("strategy", "expected cta or atc, got '" + strategy + "'");

  const auto model = root["theory_model"] ? as<std::string>(root["theory_model"], "theory_model", "a string") : "general";
  if (model == "general")
    spec.theory_model = TheoryModel::General;
  else if (model == "slow")
    spec.theory_model = TheoryModel::Slow;
  else if (model == "both")
    spec.theory_model = TheoryModel::Both;
  else
    throw ConfigError("theory_model", "expected general, slow or both, got '" + model + "'");

  net.nlms_epsilon = number_or(root, "nlms_epsilon", "", 0.0);
  net.plant.taps = as<long>(root["taps"], "taps", "an integer");
  if (net.plant.taps < 1) throw ConfigError("taps", "must be >= 1");

  const YAML::Node plant = root["plant"];
  if (!plant || !plant.IsMap()) throw ConfigError("plant", "expected a map with sigma_q2 and h0");
  reject_unknown(plant, {"sigma_q2", "h0"}, "plant");
  net.plant.sigma_q2 = number(plant, "sigma_q2", "plant");
  const YAML::Node h0 = plant["h0"];
  if (!h0) throw ConfigError("plant.h0", "missing required field");
  if (h0.IsSequence()) {
    net.plant.h0.resize(static_cast<Eigen::Index>(h0.size()));
    for (std::size_t i = 0; i < h0.size(); ++i)
      net.plant.h0[static_cast<Eigen::Index>(i)] = as<double>(h0[i], index("plant.h0", i), "a number");
  } else {
    auto [kind, body] = tagged(h0, "plant.h0");
    if (kind != "two_sided_exponential")
      throw ConfigError("plant.h0", "expected a list or {two_sided_exponential: decay}");
    net.plant.h0 = two_sided_exponential(net.plant.taps,
                                         as<double>(body, "plant.h0.two_sided_exponential", "a decay factor"));
  }
  if (net.plant.h0.size() != net.plant.taps)
    throw ConfigError("plant.h0", "must have exactly taps = " + std::to_string(net.plant.taps) + " entries");

  const YAML::Node defaults = root["node_defaults"];
  if (defaults) {
    if (!defaults.IsMap()) throw ConfigError("node_defaults", "expected a map");
    check_node_keys(defaults, "node_defaults");
  }
  const YAML::Node nodes = root["nodes"];
  if (!nodes || !nodes.IsSequence() || nodes.size() == 0) throw ConfigError("nodes", "expected a non-empty list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = index("nodes", i);
    if (!nodes[i].IsMap()) throw ConfigError(path, "expected a map");
    check_node_keys(nodes[i], path);
    const long count = nodes[i]["count"] ? as<long>(nodes[i]["count"], child(path, "count"), "an integer") : 1;
    if (count < 1) throw ConfigError(child(path, "count"), "must be >= 1");
    const NodeConfig node = parse_node(nodes[i], defaults, path);
    for (long k = 0; k < count; ++k) net.nodes.push_back(node);
  }

  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

namespace {

void emit_profile(YAML::Emitter& out, const PowerProfile& profile) {
  out << YAML::Flow << YAML::BeginMap;
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sinusoidal>) {
          out << YAML::Key << "sinusoidal" << YAML::Value << YAML::BeginMap << YAML::Key << "beta" << YAML::Value
              << v.beta << YAML::Key << "omega" << YAML::Value << v.omega << YAML::EndMap;
        } else if constexpr (std::is_same_v<T, Pulsed>) {
          out << YAML::Key << "pulsed" << YAML::Value << YAML::BeginMap << YAML::Key << "p1" << YAML::Value << v.p1
              << YAML::Key << "p2" << YAML::Value << v.p2 << YAML::Key << "period" << YAML::Value << v.period
              << YAML::Key << "alpha" << YAML::Value << v.alpha << YAML::EndMap;
        } else {
          out << YAML::Key << "constant" << YAML::Value << v.sigma2;
        }
      },
      profile.variant());
  out << YAML::EndMap;
}

void emit_distribution(YAML::Emitter& out, const InputDistribution& dist) {
  if (dist.kind() == DistributionKind::ThreePoint)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "three_point" << YAML::Value << dist.kurtosis()
        << YAML::EndMap;
  else
    out << dist.name();
}

}  // namespace

std::string dump_spec(const ExperimentSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  const auto& net = spec.network;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << spec.name;
  out << YAML::Key << "algorithm" << YAML::Value << to_string(net.algorithm);
  out << YAML::Key << "strategy" << YAML::Value << to_string(net.strategy);
  out << YAML::Key << "taps" << YAML::Value << net.taps();
  out << YAML::Key << "nlms_epsilon" << YAML::Value << net.nlms_epsilon;
  out << YAML::Key << "runs" << YAML::Value << spec.runs;
  out << YAML::Key << "horizon" << YAML::Value << spec.horizon;
  out << YAML::Key << "seed" << YAML::Value << spec.master_seed;
  out << YAML::Key << "theory_model" << YAML::Value << to_string(spec.theory_model);
  out << YAML::Key << "output" << YAML::Value << spec.output;
  out << YAML::Key << "plant" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sigma_q2" << YAML::Value << net.plant.sigma_q2;
  out << YAML::Key << "h0" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Eigen::Index i = 0; i < net.plant.h0.size(); ++i) out << net.plant.h0[i];
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& node : net.nodes) {
    out << YAML::BeginMap;
    out << YAML::Key << "weight" << YAML::Value << node.weight;
    out << YAML::Key << "step" << YAML::Value << node.step;
    out << YAML::Key << "noise_power" << YAML::Value << node.noise_power;
    out << YAML::Key << "distribution" << YAML::Value;
    emit_distribution(out, node.dist);
    out << YAML::Key << "profile" << YAML::Value;
    emit_profile(out, node.profile);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ExperimentSpec resolve_spec(const std::string& name_or_path) {
  if (auto b = builtin_spec(name_or_path)) return *b;
  return load_spec(name_or_path);
}

}  // namespace fcdiff

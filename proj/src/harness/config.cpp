#include "berglab/harness/config.hpp"

#include <fstream>
#include <set>

namespace berglab::harness {

namespace {

const std::set<std::string> kTopLevel{"domain", "weight", "p", "kernel", "quadrature", "seed", "knobs", "output"};

template <class T>
T get_or(const nlohmann::json& obj, const char* key, const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

void require_object(const nlohmann::json& v, const char* what) {
  if (!v.is_object()) throw ConfigError(std::string(what) + " must be an object");
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  require_object(doc, "config");
  for (const auto& [key, _] : doc.items())
    if (!kTopLevel.count(key)) throw ConfigError("unknown config key '" + key + "'");
  if (!doc.contains("seed")) throw ConfigError("config must set 'seed'");

  ExperimentConfig cfg;
  cfg.source = doc;
  cfg.domain = get_or<std::string>(doc, "domain", cfg.domain);
  cfg.p = get_or<double>(doc, "p", cfg.p);
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.output_dir = get_or<std::string>(doc, "output", cfg.output_dir);
  if (!(cfg.p > 1.0)) throw ConfigError("p must exceed 1");

  if (doc.contains("weight")) {
    const auto& w = doc.at("weight");
    require_object(w, "weight");
    cfg.weight.kind = get_or<std::string>(w, "kind", cfg.weight.kind);
    cfg.weight.value = get_or<double>(w, "value", cfg.weight.value);
    cfg.weight.t = get_or<double>(w, "t", cfg.weight.t);
    cfg.weight.path = get_or<std::string>(w, "path", cfg.weight.path);
    if (cfg.weight.kind != "constant" && cfg.weight.kind != "power" && cfg.weight.kind != "table")
      throw ConfigError("weight.kind must be constant, power or table");
    if (cfg.weight.kind == "constant" && !(cfg.weight.value > 0.0)) throw ConfigError("constant weight must be positive");
    if (cfg.weight.kind == "table" && cfg.weight.path.empty()) throw ConfigError("table weight needs a path");
  }
  if (doc.contains("kernel")) {
    const auto& k = doc.at("kernel");
    require_object(k, "kernel");
    const auto mode = get_or<std::string>(k, "mode", "closed_form");
    if (mode == "closed_form") cfg.kernel.mode = KernelMode::ClosedForm;
    else if (mode == "truncated") cfg.kernel.mode = KernelMode::TruncatedBasis;
    else throw ConfigError("kernel.mode must be closed_form or truncated");
    cfg.kernel.max_degree = get_or<int>(k, "max_degree", cfg.kernel.max_degree);
    if (cfg.kernel.max_degree < 1) throw ConfigError("kernel.max_degree must be positive");
  }
  if (doc.contains("quadrature")) {
    const auto& q = doc.at("quadrature");
    require_object(q, "quadrature");
    auto& s = cfg.quadrature;
    try {
      s.strategy = strategy_from_string(get_or<std::string>(q, "strategy", to_string(s.strategy)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    s.layer_count = get_or<int>(q, "layer_count", s.layer_count);
    s.radial_nodes = get_or<int>(q, "radial_nodes", s.radial_nodes);
    s.angular_nodes = get_or<int>(q, "angular_nodes", s.angular_nodes);
    s.n_samples = get_or<std::int64_t>(q, "n_samples", s.n_samples);
    s.rel_tolerance = get_or<double>(q, "rel_tolerance", s.rel_tolerance);
    s.depth_floor = get_or<double>(q, "depth_floor", s.depth_floor);
  }
  cfg.quadrature.seed = cfg.seed;
  if (doc.contains("knobs")) {
    require_object(doc.at("knobs"), "knobs");
    cfg.knobs = doc.at("knobs");
  }
  try {
    cfg.quadrature.validate();
    (void)cfg.make_domain();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(doc);
}

Domain ExperimentConfig::make_domain() const { return Domain::from_name(domain); }

Weight ExperimentConfig::make_weight(const Domain& d) const {
  if (weight.kind == "power") return Weight::power(d, weight.t, p);
  if (weight.kind == "table") {
    try {
      return Weight::table_from_csv(weight.path, d.dim(), p);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("weight table: ") + e.what());
    }
  }
  return Weight::constant(weight.value, p);
}

KernelEvaluator ExperimentConfig::make_kernel(const Domain& d) const {
  if (kernel.mode == KernelMode::TruncatedBasis) return KernelEvaluator::truncated(d, kernel.max_degree);
  return KernelEvaluator::closed_form(d);
}

}  // namespace berglab::harness

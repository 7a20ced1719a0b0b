#include "driftbandit/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

namespace driftbandit {

using Json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Rethrows a module validator's "field: message" error under `prefix`.
template <class F>
void validate_under(const std::string& prefix, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon == std::string::npos) throw ConfigError(prefix, what);
    throw ConfigError(join(prefix, what.substr(0, colon)), what.substr(colon + 2));
  }
}

class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void read(const std::string& key, std::size_t& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(join(path_, key), "expected a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }
  void read(const std::string& key, double& out) {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
      out = v->get<double>();
    }
  }
  void read(const std::string& key, std::optional<double>& out) {
    if (const Json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number or null");
      out = v->get<double>();
    }
  }
  void read(const std::string& key, std::optional<std::size_t>& out) {
    if (const Json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number_unsigned()) throw ConfigError(join(path_, key), "expected a nonnegative integer or null");
      out = v->get<std::size_t>();
    }
  }
  void read(const std::string& key, bool& out) {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const std::string& key, std::string& out) {
    if (const Json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
      out = v->get<std::string>();
    }
  }

  std::string require_string(const std::string& key) {
    if (!has(key)) throw ConfigError(join(path_, key), "required key missing");
    std::string out;
    read(key, out);
    return out;
  }

  const std::string& path() const { return path_; }

  /// Rejects keys never requested.
  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(join(path_, item.key()), "unknown key");
    }
  }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

EnvSpec read_env(const Json& j) {
  ObjectReader r(j, "env");
  EnvSpec env;
  const std::string kind = r.require_string("kind");
  if (kind == "flip") {
    env.kind = EnvKind::Flip;
    r.read("segments", env.segments);
    r.read("hi", env.hi);
    r.read("lo", env.lo);
  } else if (kind == "sinusoidal") {
    env.kind = EnvKind::Sinusoidal;
    r.read("budget", env.budget);
    r.read("amplitude", env.amplitude);
    r.read("active_fraction", env.active_fraction);
  } else {
    throw ConfigError("env.kind", "expected \"flip\" or \"sinusoidal\"");
  }
  r.finish();
  return env;
}

PolicySpec read_policy(const Json& j) {
  ObjectReader r(j, "policy");
  PolicySpec spec;
  try {
    spec.params.kind = parse_policy_kind(r.require_string("kind"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("policy.kind", e.what());
  }
  r.read("xi", spec.params.xi);
  r.read("gamma", spec.params.gamma);
  r.read("tau", spec.params.tau);
  r.read("eps_c", spec.params.eps_c);
  r.read("prior_a", spec.params.prior_a);
  r.read("prior_b", spec.params.prior_b);
  r.read("gamma_c", spec.gamma_c);
  r.read("tau_c", spec.tau_c);
  r.finish();
  return spec;
}

DriftModel read_incentive(const Json& j) {
  ObjectReader r(j, "incentive");
  DriftModel model;
  std::string kind = "linear";
  r.read("kind", kind);
  try {
    model.kind = parse_drift_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("incentive.kind", e.what());
  }
  r.read("l", model.lipschitz);
  r.read("cap", model.cap);
  r.finish();
  return model;
}

RestartSpec read_restart(const Json& j) {
  ObjectReader r(j, "restart");
  RestartSpec spec;
  r.read("sigma", spec.sigma);
  r.read("lambda", spec.lambda);
  r.finish();
  return spec;
}

OutputSpec read_outputs(const Json& j) {
  ObjectReader r(j, "outputs");
  OutputSpec out;
  r.read("trace", out.trace);
  r.read("trace_reps", out.trace_reps);
  r.read("curves", out.curves);
  r.read("summary", out.summary);
  r.finish();
  return out;
}

ExperimentConfig from_json(const Json& root) {
  ObjectReader r(root, "");
  ExperimentConfig config;
  r.read("T", config.T);
  r.read("K", config.K);
  r.read("reps", config.reps);
  static_assert(std::is_same_v<std::uint64_t, std::size_t> || sizeof(std::size_t) == 8);
  {
    std::size_t seed = config.base_seed;
    r.read("base_seed", seed);
    config.base_seed = seed;
  }
  if (const Json* env = r.find("env")) {
    config.env = read_env(*env);
  } else {
    throw ConfigError("env", "required key missing");
  }
  if (const Json* policy = r.find("policy")) {
    config.policy = read_policy(*policy);
  } else {
    throw ConfigError("policy", "required key missing");
  }
  if (const Json* incentive = r.find("incentive")) config.incentive = read_incentive(*incentive);
  if (const Json* restart = r.find("restart"); restart && !restart->is_null()) {
    config.restart = read_restart(*restart);
  }
  if (const Json* outputs = r.find("outputs")) config.outputs = read_outputs(*outputs);
  r.finish();
  config.validate();
  return config;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["T"] = c.T;
  j["K"] = c.K;
  j["reps"] = c.reps;
  j["base_seed"] = c.base_seed;
  Json env;
  if (c.env.kind == EnvKind::Flip) {
    env["kind"] = "flip";
    env["segments"] = c.env.segments;
    env["hi"] = c.env.hi;
    env["lo"] = c.env.lo;
  } else {
    env["kind"] = "sinusoidal";
    env["budget"] = c.env.budget;
    env["amplitude"] = c.env.amplitude;
    env["active_fraction"] = c.env.active_fraction;
  }
  j["env"] = env;
  Json policy;
  const auto& p = c.policy.params;
  policy["kind"] = std::string(to_string(p.kind));
  policy["xi"] = p.xi;
  policy["gamma"] = p.gamma;
  policy["tau"] = p.tau;
  policy["eps_c"] = p.eps_c;
  policy["prior_a"] = p.prior_a;
  policy["prior_b"] = p.prior_b;
  if (c.policy.gamma_c) policy["gamma_c"] = *c.policy.gamma_c;
  if (c.policy.tau_c) policy["tau_c"] = *c.policy.tau_c;
  j["policy"] = policy;
  Json incentive;
  incentive["kind"] = std::string(to_string(c.incentive.kind));
  incentive["l"] = c.incentive.lipschitz;
  incentive["cap"] = c.incentive.cap;
  j["incentive"] = incentive;
  if (c.restart) {
    Json restart;
    if (c.restart->sigma) restart["sigma"] = *c.restart->sigma;
    restart["lambda"] = c.restart->lambda;
    j["restart"] = restart;
  }
  Json outputs;
  outputs["trace"] = c.outputs.trace;
  outputs["trace_reps"] = c.outputs.trace_reps;
  outputs["curves"] = c.outputs.curves;
  outputs["summary"] = c.outputs.summary;
  j["outputs"] = outputs;
  return j;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
}

void apply_override(Json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must have the form KEY=VALUE");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (!node->is_object()) throw ConfigError(key, "path does not name an object member");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    // Intermediate objects may be absent (e.g. an optional "restart" block).
    if (!node->contains(part) || (*node)[part].is_null()) (*node)[part] = Json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (T < 2) throw ConfigError("T", "horizon must be >= 2");
  if (K != 2) throw ConfigError("K", "the flip and sinusoidal generators are two-armed; K must be 2");
  if (reps < 1) throw ConfigError("reps", "must be >= 1");
  if (env.kind == EnvKind::Flip) {
    if (env.segments < 1) throw ConfigError("env.segments", "must be >= 1");
    if (env.segments > T) throw ConfigError("env.segments", "must not exceed T");
    if (!(env.lo >= 0.0 && env.lo < env.hi && env.hi <= 1.0)) {
      throw ConfigError("env.hi", "need 0 <= lo < hi <= 1");
    }
  } else {
    if (!(env.budget >= 0.0) || !std::isfinite(env.budget)) throw ConfigError("env.budget", "must be >= 0");
    if (static_cast<double>(K) * env.budget > static_cast<double>(T)) {
      throw ConfigError("env.budget", "violates K * V_T <= T");
    }
    if (!(env.amplitude > 0.0 && env.amplitude <= 0.5)) {
      throw ConfigError("env.amplitude", "must lie in (0, 0.5]");
    }
    if (!(env.active_fraction > 0.0 && env.active_fraction <= 1.0)) {
      throw ConfigError("env.active_fraction", "must lie in (0, 1]");
    }
    if (env.budget > 0.0 && env.budget / (4.0 * env.amplitude) < 0.25) {
      throw ConfigError("env.budget", "less than a quarter period; cannot be exhausted");
    }
  }
  validate_under("policy", [&] { policy.params.validate(); });
  if (policy.gamma_c && !(*policy.gamma_c > 0.0)) throw ConfigError("policy.gamma_c", "must be > 0");
  if (policy.tau_c && !(*policy.tau_c > 0.0)) throw ConfigError("policy.tau_c", "must be > 0");
  validate_under("incentive", [&] { incentive.validate(); });
  if (restart) {
    if (restart->sigma && *restart->sigma < 1) throw ConfigError("restart.sigma", "must be >= 1");
    if (!(restart->lambda > 0.0)) throw ConfigError("restart.lambda", "must be > 0");
  }
  if (outputs.trace_reps < 1) throw ConfigError("outputs.trace_reps", "must be >= 1");
  if (outputs.summary.empty()) throw ConfigError("outputs.summary", "must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text) { return from_json(parse_json(json_text)); }

ExperimentConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides) {
  Json root = parse_json(json_text);
  for (const auto& o : overrides) apply_override(root, o);
  return from_json(root);
}

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace driftbandit

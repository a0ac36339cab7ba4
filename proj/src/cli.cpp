#include "ruin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ruin/asymptotics.hpp"
#include "ruin/field_analysis.hpp"
#include "ruin/gauss_constants.hpp"
#include "ruin/simulator.hpp"

namespace ruin {

const std::vector<FiniteTableRow>& finite_horizon_table() {
  static const std::vector<FiniteTableRow> rows{
      {5, 0.1, 1, 0.05, 20, 0.1, 0.0363},  {5, 0.1, 1, 0.05, 20, 0.2, 0.0402},
      {5, 0.1, 1, -0.05, 20, 0.2, 0.0455}, {5, 0.1, 1, 0.07, 20, 0.1, 0.0210},
      {5, 0.1, 1, 0.07, 30, 0.2, 0.0229},  {5, 0.1, 1, -0.07, 30, 0.2, 0.0349},
      {5, 0.1, 1, 0.1, 20, 0.1, 0.0090},   {5, 0.1, 1, 0.1, 30, 0.2, 0.0096},
      {5, 0.1, 1, -0.1, 30, 0.2, 0.0136},  {4, 0.1, 1, 0.1, 20, 0.1, 0.0312},
      {4, 0.1, 1, 0.1, 30, 0.2, 0.0333},   {4, 0.1, 1, -0.1, 30, 0.2, 0.0453},
  };
  return rows;
}

const std::vector<InfiniteTableRow>& infinite_horizon_table() {
  static const std::vector<InfiniteTableRow> rows{
      {5, 0.1, 1, 0.05, 0.1, 0.0467}, {5, 0.1, 1, 0.05, 0.2, 0.0526},
      {5, 0.1, 1, 0.07, 0.1, 0.0256}, {5, 0.1, 1, 0.07, 0.2, 0.0288},
      {5, 0.1, 1, 0.1, 0.1, 0.0113},  {5, 0.1, 1, 0.1, 0.2, 0.0128},
      {4, 0.1, 1, 0.1, 0.1, 0.0378},  {4, 0.1, 1, 0.1, 0.2, 0.0425},
  };
  return rows;
}

namespace {

using json = nlohmann::ordered_json;
using Rows = std::vector<json>;

constexpr double kInf = std::numeric_limits<double>::infinity();

json model_defaults() {
  return {{"u", 5.0},      {"c", 0.1}, {"sigma", 1.0},      {"delta", 0.05},
          {"gamma", 0.1},  {"T", 20.0}, {"infinite", false}};
}

json with(json base, const json& extra) {
  for (const auto& [k, v] : extra.items()) base[k] = v;
  return base;
}

json run_defaults() {
  return {{"seed", 1}, {"workers", 0}, {"format", "csv"}, {"out", ""}};
}

json estimator_defaults() {
  return {{"phat", nullptr}, {"phat_from_mc", false}, {"est_n_paths", 100000}, {"est_step", 0.005}};
}

std::map<std::string, json> command_defaults() {
  std::map<std::string, json> d;
  d["approx"] = with(with(with(model_defaults(), {{"kappa", kDefaultExponentFactor}}),
                          estimator_defaults()),
                     run_defaults());
  d["simulate"] = with(with(model_defaults(), {{"n_paths", 100000},
                                               {"step", 0.01},
                                               {"levels", 1},
                                               {"truncation", nullptr}}),
                       run_defaults());
  d["constant"] = with(json{{"family", "phat"},
                            {"a", 1.0},
                            {"f", 1.0},
                            {"b", nullptr},
                            {"c", 0.1},
                            {"sigma", 1.0},
                            {"delta", 0.05},
                            {"s1", 0.0},
                            {"s2", "inf"},
                            {"n_paths", 100000},
                            {"step", 0.005},
                            {"truncation", nullptr},
                            {"refinement_checks", true},
                            {"tail_tolerance", 1e-16}},
                       run_defaults());
  d["ruin-time"] = with(with(with(model_defaults(), {{"n_paths", 10000},
                                                     {"step", 0.01},
                                                     {"truncation", nullptr},
                                                     {"transform", "none"}}),
                             estimator_defaults()),
                        run_defaults());
  d["table"] = with(with(json{{"which", 1}}, estimator_defaults()), run_defaults());
  d["verify-lemmas"] = with(with(model_defaults(), {{"resolution", 200}}), run_defaults());
  d["verify-lemmas"]["format"] = "json";
  return d;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> d{
      {"approx", "asymptotic evaluation of the ruin probability"},
      {"simulate", "Monte Carlo ruin probability with optional grid refinement"},
      {"constant", "Monte Carlo estimate of a Brownian-functional constant"},
      {"ruin-time", "simulated ruin times and their conditional law"},
      {"table", "asymptotic evaluation of the reference finite (1) or infinite (2) horizon table"},
      {"verify-lemmas", "numeric checks of the variance and boundary-ratio maximisers"},
  };
  return d;
}

struct Binding {
  std::string key;
  CLI::Option* opt = nullptr;
  std::string text;
  bool flag = false;
};

std::string flag_name(const std::string& key) {
  if (key == "T") return "--T";
  if (key == "refinement_checks") return "--no-refine";
  std::string s = "--" + key;
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v))
    throw std::invalid_argument("invalid value for " + flag_name(key) + ": '" + text + "'");
  return v;
}

json convert(const std::string& key, const std::string& text, const json& def) {
  if (def.is_string()) return text;
  if (def.is_number_integer() || def.is_number_unsigned()) {
    const double v = parse_number(key, text);
    if (v != std::floor(v) || v < 0.0)
      throw std::invalid_argument("invalid value for " + flag_name(key) + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  return parse_number(key, text);
}

void overlay_file(json& cfg, const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json file;
  try {
    file = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (file.contains("config") && file["config"].is_object()) file = file["config"];
  if (!file.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [k, v] : file.items()) {
    if (k == "command") {
      if (v != command)
        throw std::invalid_argument("config file is for command '" + v.dump() + "', not '" + command + "'");
      continue;
    }
    if (!cfg.contains(k)) throw std::invalid_argument("unknown config key '" + k + "' for " + command);
    if (v.is_object() || v.is_array())
      throw std::invalid_argument("config key '" + k + "' must be a scalar (flat key-value JSON)");
    cfg[k] = v;
  }
}

// ---- resolved config accessors

double num(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> opt_num(const json& cfg, const char* key) {
  if (cfg.at(key).is_null()) return std::nullopt;
  return num(cfg, key);
}

std::uint64_t count(const json& cfg, const char* key) {
  const double v = num(cfg, key);
  if (v < 0.0 || v != std::floor(v))
    throw std::invalid_argument(std::string("config key '") + key + "' must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

bool flag(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_boolean()) throw std::invalid_argument(std::string("config key '") + key + "' must be true/false");
  return v.get<bool>();
}

std::string str(const json& cfg, const char* key) { return cfg.at(key).get<std::string>(); }

ModelParams model_from(const json& cfg) {
  ModelParams p;
  p.u = num(cfg, "u");
  p.c = num(cfg, "c");
  p.sigma = num(cfg, "sigma");
  p.delta = num(cfg, "delta");
  p.gamma = num(cfg, "gamma");
  p.horizon = flag(cfg, "infinite") ? Horizon::infinite() : Horizon::finite(num(cfg, "T"));
  return p;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

json estimate_fields(const MCEstimate& e) {
  return {{"estimate", e.estimate}, {"stderr", e.std_error}, {"n", e.n},
          {"ci_low", e.ci_low},     {"ci_high", e.ci_high}};
}

EstimatorConfig estimator_from(const json& cfg, const char* n_key, const char* step_key) {
  EstimatorConfig e;
  e.n_paths = count(cfg, n_key);
  e.step = num(cfg, step_key);
  e.seed = count(cfg, "seed");
  e.workers = static_cast<unsigned>(count(cfg, "workers"));
  return e;
}

/// The constant for the infinite-horizon asymptotic: given, or estimated.
MCEstimate resolve_phat(const json& cfg, double b) {
  if (auto v = opt_num(cfg, "phat")) {
    if (!(*v > 0.0)) throw std::invalid_argument("--phat must be > 0");
    MCEstimate e;
    e.estimate = *v;
    e.ci_low = e.ci_high = *v;
    return e;
  }
  if (!flag(cfg, "phat_from_mc"))
    throw std::invalid_argument("infinite horizon needs the constant: pass --phat or --phat-from-mc");
  const auto spec = ConstantSpec::generalized_phat(1.0, b, 0.0, kInf);
  return estimate_constant(spec, estimator_from(cfg, "est_n_paths", "est_step")).value;
}

SimConfig sim_from(const json& cfg) {
  SimConfig s;
  s.n_paths = count(cfg, "n_paths");
  s.step = num(cfg, "step");
  s.seed = count(cfg, "seed");
  s.workers = static_cast<unsigned>(count(cfg, "workers"));
  s.infinite_truncation = opt_num(cfg, "truncation");
  return s;
}

// ---- output

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return v.dump();
}

struct Output {
  Rows rows;
  std::optional<json> summary;
};

std::string render(const json& cfg, const std::string& command, const Output& o) {
  json header = {{"command", command}};
  for (const auto& [k, v] : cfg.items()) header[k] = v;
  std::ostringstream os;
  if (str(cfg, "format") == "json") {
    os << json{{"config", header}}.dump() << '\n';
    for (const auto& r : o.rows) os << r.dump() << '\n';
    if (o.summary) os << json{{"summary", *o.summary}}.dump() << '\n';
    return os.str();
  }
  os << "# config: " << header.dump() << '\n';
  if (!o.rows.empty()) {
    bool first = true;
    for (const auto& [k, v] : o.rows.front().items()) {
      os << (first ? "" : ",") << k;
      first = false;
    }
    os << '\n';
    for (const auto& r : o.rows) {
      first = true;
      for (const auto& [k, v] : r.items()) {
        os << (first ? "" : ",") << csv_cell(v);
        first = false;
      }
      os << '\n';
    }
  }
  if (o.summary) os << "# summary: " << o.summary->dump() << '\n';
  return os.str();
}

// ---- commands

Output cmd_approx(const json& cfg) {
  const ModelParams p = model_from(cfg);
  json row;
  if (is_zero_interest(p.delta) && !p.horizon.is_finite()) {
    const int kappa = static_cast<int>(count(cfg, "kappa"));
    const double v = zero_interest_ruin_probability(p.u, p.c, p.sigma, p.gamma, kappa);
    row = {{"regime", "zero_interest"}, {"kappa", kappa}, {"value", v},
           {"log_value", std::log(v)},  {"display", round4(v)}};
  } else if (p.horizon.is_finite()) {
    const auto q = finite_horizon_quantities(p);
    const auto a = finite_horizon_ruin_asymptotic(p);
    row = {{"regime", "finite"},       {"a_sq", q.a_sq},          {"prefactor", q.prefactor},
           {"psi_arg", q.psi_arg},     {"rate_lambda", q.rate_lambda}, {"value", a.value},
           {"log_value", a.log_value}, {"display", round4(a.value)}};
  } else {
    const auto q = infinite_horizon_quantities(p);
    p.validate();
    const MCEstimate phat = resolve_phat(cfg, q.b);
    const auto a = infinite_horizon_ruin_asymptotic(p, phat.estimate);
    row = {{"regime", "infinite"}, {"b", q.b},
           {"t_u", q.t_u},         {"m_u", q.m_u},
           {"phat", phat.estimate}, {"phat_stderr", phat.std_error},
           {"value", a.value},     {"log_value", a.log_value},
           {"display", round4(a.value)}};
  }
  return {{row}, std::nullopt};
}

Output cmd_simulate(const json& cfg) {
  const ModelParams p = model_from(cfg);
  const int levels = static_cast<int>(count(cfg, "levels"));
  const RefinementReport r = refine_ruin_probability(p, sim_from(cfg), levels);
  Output o;
  auto add = [&](const std::string& level, double step, double horizon, const MCEstimate& e,
                 json shift) {
    json row = {{"level", level}, {"step", step}, {"horizon", horizon}};
    const json fields = estimate_fields(e);
    for (const auto& [k, v] : fields.items()) row[k] = v;
    row["shift"] = std::move(shift);
    o.rows.push_back(std::move(row));
  };
  for (int l = 0; l < levels; ++l)
    add(std::to_string(l), r.steps[l], r.horizon, r.levels[l],
        l > 0 ? json(r.shifts[l - 1]) : json(nullptr));
  if (levels > 1) add("extrapolated", 0.0, r.horizon, r.extrapolated, nullptr);
  if (r.extended) add("extended", r.steps.back(), 2.0 * r.horizon, *r.extended, r.extended->estimate - r.levels.back().estimate);
  o.summary = json{{"converged", r.converged}, {"extension_flag", r.extension_flag}};
  return o;
}

ConstantSpec spec_from(json& cfg) {
  const std::string family = str(cfg, "family");
  const double s1 = num(cfg, "s1");
  double s2 = kInf;
  const auto& s2v = cfg.at("s2");
  if (s2v.is_number()) {
    s2 = s2v.get<double>();
  } else {
    const auto text = s2v.get<std::string>();
    if (text != "inf") s2 = parse_number("s2", text);
  }
  if (family == "pickands") return ConstantSpec::pickands(s1, s2);
  if (family == "piterbarg") return ConstantSpec::piterbarg(num(cfg, "a"), s1, s2);
  if (family == "phat" || family == "ptilde") {
    if (cfg.at("b").is_null()) {
      const double delta = num(cfg, "delta");
      if (!(delta > 0.0)) throw std::invalid_argument("--b not given and delta <= 0: cannot form c^2/(sigma^2 delta)");
      cfg["b"] = num(cfg, "c") * num(cfg, "c") / (num(cfg, "sigma") * num(cfg, "sigma") * delta);
    }
    if (family == "ptilde") {
      if (s1 != 0.0 || s2 != kInf) throw std::invalid_argument("ptilde is defined on [0, inf) only");
      return ConstantSpec::ptilde(num(cfg, "b"));
    }
    return ConstantSpec::generalized_phat(num(cfg, "f"), num(cfg, "b"), s1, s2);
  }
  throw std::invalid_argument("unknown --family '" + family + "' (pickands, piterbarg, phat, ptilde)");
}

Output cmd_constant(json& cfg) {
  const ConstantSpec spec = spec_from(cfg);
  EstimatorConfig e = estimator_from(cfg, "n_paths", "step");
  e.truncation_horizon = opt_num(cfg, "truncation");
  e.refinement_checks = flag(cfg, "refinement_checks");
  e.tail_tolerance = num(cfg, "tail_tolerance");
  const ConstantEstimate r = estimate_constant(spec, e);
  json row = {{"spec", spec.describe()}};
  const json fields = estimate_fields(r.value);
  for (const auto& [k, v] : fields.items()) row[k] = v;
  row["display"] = round4(r.value.estimate);
  row["step"] = r.step;
  row["coarse"] = r.coarse.estimate;
  row["coarse_step"] = r.coarse_step;
  row["refinement_shift"] = r.refinement_shift;
  row["refinement_flag"] = r.refinement_flag;
  row["truncation_horizon"] = spec.infinite() ? json(r.truncation_horizon) : json(nullptr);
  row["extended"] = spec.infinite() ? json(r.extended.estimate) : json(nullptr);
  row["extension_flag"] = r.extension_flag;
  row["jensen_witness"] = r.jensen_witness;
  row["single_point_value"] = r.single_point_value;
  return {{row}, std::nullopt};
}

std::function<double(double)> infinite_reference_cdf(const ModelParams& p, const Eigen::VectorXd& x,
                                                     const json& cfg, json& summary) {
  const double root_b = p.c / (p.sigma * std::sqrt(p.delta));
  const double b = root_b * root_b;
  // Reference points at empirical quantiles inside the domain x > -sqrt(b).
  std::vector<double> grid;
  for (int k = 1; k <= 40; ++k) {
    const auto idx = static_cast<Eigen::Index>((x.size() - 1) * k / 40);
    const double v = x(idx);
    if (v > -root_b && (grid.empty() || v > grid.back())) grid.push_back(v);
  }
  std::vector<ConstantSpec> specs;
  for (double v : grid) specs.push_back(ConstantSpec::generalized_phat(1.0, b, 0.0, v + root_b));
  specs.push_back(ConstantSpec::generalized_phat(1.0, b, 0.0, kInf));
  EstimatorConfig e = estimator_from(cfg, "est_n_paths", "est_step");
  const auto est = estimate_constants(specs, e);
  const double full = est.back().value.estimate;
  std::vector<double> xs{-root_b}, fs{std::exp(-b) / full};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    xs.push_back(grid[i]);
    fs.push_back(infinite_horizon_ruin_time_cdf(grid[i], p, std::min(est[i].value.estimate, full), full));
  }
  summary["phat_full"] = full;
  summary["reference_points"] = xs.size();
  return [xs, fs](double v) {
    if (v <= xs.front()) return fs.front();
    if (v >= xs.back()) return fs.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), v);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double w = (v - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return fs[k - 1] + w * (fs[k] - fs[k - 1]);
  };
}

Output cmd_ruin_time(const json& cfg) {
  const ModelParams p = model_from(cfg);
  const SimConfig s = sim_from(cfg);
  const auto samples = ruin_time_samples(p, s);
  Output o;
  std::vector<double> taus;
  for (const auto& r : samples) {
    o.rows.push_back({{"path_id", r.path_id},
                      {"ruined", r.ruined ? 1 : 0},
                      {"tau", r.tau ? json(*r.tau) : json(nullptr)}});
    taus.push_back(r.tau ? *r.tau : kInf);
  }
  json summary = {{"n_paths", samples.size()},
                  {"n_ruined", std::count_if(samples.begin(), samples.end(),
                                             [](const auto& r) { return r.ruined; })},
                  {"horizon", simulated_horizon(p, s)}};
  const std::string transform = str(cfg, "transform");
  if (transform == "finite") {
    const auto law = conditional_ruin_time_empirical(p, taus, samples.size(), RuinTimeTransform::finite);
    summary["transform"] = transform;
    summary["rate_lambda"] = finite_horizon_quantities(p).rate_lambda;
    summary["ks"] = law.ks;
  } else if (transform == "infinite") {
    if (p.horizon.is_finite()) throw std::invalid_argument("--transform infinite needs --infinite");
    // Law without a reference first: checks the event count before the
    // constants are estimated.
    auto law = conditional_ruin_time_empirical(p, taus, samples.size(), RuinTimeTransform::infinite,
                                               [](double) { return 0.0; });
    summary["transform"] = transform;
    const auto ref = infinite_reference_cdf(p, law.values, cfg, summary);
    summary["ks"] = ks_distance(law.values, ref);
  } else if (transform != "none") {
    throw std::invalid_argument("unknown --transform '" + transform + "' (none, finite, infinite)");
  }
  o.summary = summary;
  return o;
}

Output cmd_table(const json& cfg) {
  const auto which = count(cfg, "which");
  Output o;
  if (which == 1) {
    for (const auto& r : finite_horizon_table()) {
      ModelParams p{r.u, r.c, r.sigma, r.delta, r.gamma, Horizon::finite(r.T)};
      const auto a = finite_horizon_ruin_asymptotic(p);
      o.rows.push_back({{"u", r.u},
                        {"c", r.c},
                        {"sigma", r.sigma},
                        {"delta", r.delta},
                        {"T", r.T},
                        {"gamma", r.gamma},
                        {"asymptotic", a.value},
                        {"asymptotic_display", round4(a.value)},
                        {"log_asymptotic", a.log_value},
                        {"reference", r.reference}});
    }
    return o;
  }
  if (which != 2) throw std::invalid_argument("--which must be 1 or 2");
  // One constant per distinct b = c^2 / (sigma^2 delta).
  std::map<double, MCEstimate> constants;
  for (const auto& r : infinite_horizon_table()) {
    ModelParams p{r.u, r.c, r.sigma, r.delta, r.gamma, Horizon::infinite()};
    const auto q = infinite_horizon_quantities(p);
    auto it = constants.find(q.b);
    if (it == constants.end()) it = constants.emplace(q.b, resolve_phat(cfg, q.b)).first;
    const auto a = infinite_horizon_ruin_asymptotic(p, it->second.estimate);
    o.rows.push_back({{"u", r.u},
                      {"c", r.c},
                      {"sigma", r.sigma},
                      {"delta", r.delta},
                      {"gamma", r.gamma},
                      {"b", q.b},
                      {"phat", it->second.estimate},
                      {"phat_stderr", it->second.std_error},
                      {"asymptotic", a.value},
                      {"asymptotic_display", round4(a.value)},
                      {"log_asymptotic", a.log_value},
                      {"reference", r.reference}});
  }
  return o;
}

Output cmd_verify_lemmas(const json& cfg, bool& all_pass) {
  const ModelParams p = model_from(cfg);
  const auto checks = verify_lemmas(p, static_cast<int>(count(cfg, "resolution")));
  Output o;
  all_pass = !checks.empty();
  for (const auto& c : checks) {
    o.rows.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    all_pass = all_pass && c.pass;
  }
  o.summary = json{{"checks", checks.size()}, {"all_pass", all_pass}};
  return o;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Brownian ruin model with interest and tax: asymptotics, simulation, constants"};
  app.require_subcommand(1);
  const auto defaults = command_defaults();
  std::map<std::string, std::deque<Binding>> bindings;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;

  for (const auto& [name, def] : defaults) {
    auto* sub = app.add_subcommand(name, descriptions().at(name));
    subs[name] = sub;
    sub->add_option("--config", config_paths[name], "flat JSON config; flags override it");
    auto& list = bindings[name];
    for (const auto& [key, value] : def.items()) {
      list.push_back({key, nullptr, {}, false});
      Binding& b = list.back();
      if (value.is_boolean()) {
        b.opt = sub->add_flag(flag_name(key), b.flag, key);
      } else {
        b.opt = sub->add_option(flag_name(key), b.text, key);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      json cfg = defaults.at(name);
      if (!config_paths[name].empty()) overlay_file(cfg, config_paths[name], name);
      for (const auto& b : bindings[name]) {
        if (b.opt->count() == 0) continue;
        const json& def = defaults.at(name).at(b.key);
        if (def.is_boolean()) cfg[b.key] = b.key == "refinement_checks" ? !b.flag : b.flag;
        else cfg[b.key] = convert(b.key, b.text, def);
      }
      const std::string format = str(cfg, "format");
      if (format != "csv" && format != "json")
        throw std::invalid_argument("--format must be csv or json");

      Output o;
      int status = 0;
      if (name == "approx") o = cmd_approx(cfg);
      else if (name == "simulate") o = cmd_simulate(cfg);
      else if (name == "constant") o = cmd_constant(cfg);
      else if (name == "ruin-time") o = cmd_ruin_time(cfg);
      else if (name == "table") o = cmd_table(cfg);
      else {
        bool all_pass = false;
        o = cmd_verify_lemmas(cfg, all_pass);
        status = all_pass ? 0 : 2;
      }
      const std::string text = render(cfg, name, o);
      out << text;
      const std::string path = str(cfg, "out");
      if (!path.empty()) {
        std::ofstream file(path);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
        file << text;
      }
      return status;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ruin

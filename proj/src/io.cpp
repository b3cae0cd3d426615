#include "hvacdro/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "hvacdro/errors.hpp"
#include "hvacdro/instances.hpp"

namespace hvacdro {

using nlohmann::json;

namespace {

/// Maps JSON pointers to the 1-based line where their value starts.
/// Only run on text nlohmann has already accepted.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : text_(text) {
    value("");
  }

  int line_of(std::string pointer) const {
    for (;;) {
      auto it = lines_.find(pointer);
      if (it != lines_.end()) return it->second;
      const auto cut = pointer.rfind('/');
      if (cut == std::string::npos) return 1;
      pointer.resize(cut);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void value(const std::string& pointer) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_[pointer] = line_;
    const char c = text_[pos_];
    if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      for (int index = 0;; ++index) {
        skip_ws();
        if (pos_ >= text_.size()) return;
        if (text_[pos_] == close) {
          ++pos_;
          return;
        }
        if (text_[pos_] == ',') {
          ++pos_;
          skip_ws();
        }
        if (c == '{') {
          const std::string key = string_token();
          skip_ws();
          ++pos_;  // ':'
          value(pointer + "/" + escape(key));
        } else {
          value(pointer + "/" + std::to_string(index));
        }
      }
    }
    if (c == '"') {
      string_token();
      return;
    }
    while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) {
      ++pos_;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::unordered_map<std::string, int> lines_;
};

int line_at_byte(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

class Document {
 public:
  Document(const std::string& text, std::string source) : source_(std::move(source)) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      const std::string what = e.what();
      const auto colon = what.rfind(": ");
      const std::string detail = colon == std::string::npos ? what : what.substr(colon + 2);
      throw InputError(source_ + ":" + std::to_string(line_at_byte(text, e.byte > 0 ? e.byte - 1 : 0)) +
                       ": syntax error: " + detail);
    }
    index_ = std::make_unique<LineIndex>(text);
  }

  const json& root() const { return root_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    const std::string where = pointer.empty() ? "document root" : pointer;
    throw InputError(source_ + ":" + std::to_string(index_->line_of(pointer)) + ": " + message + " (at " +
                     where + ")");
  }

 private:
  std::string source_;
  json root_;
  std::unique_ptr<LineIndex> index_;
};

class Node {
 public:
  Node(const Document& doc, const json& value, std::string pointer)
      : doc_(&doc), value_(&value), pointer_(std::move(pointer)) {}

  const json& raw() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& message) const { doc_->fail(pointer_, message); }

  bool is_object() const { return value_->is_object(); }
  bool is_array() const { return value_->is_array(); }
  bool is_string() const { return value_->is_string(); }
  bool is_number() const { return value_->is_number(); }

  bool has(const char* key) const { return value_->is_object() && value_->contains(key); }

  Node operator[](const char* key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail(std::string("missing key \"") + key + "\"");
    return Node(*doc_, *it, pointer_ + "/" + key);
  }

  Node at(std::size_t i) const { return Node(*doc_, (*value_)[i], pointer_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  void allow_keys(std::initializer_list<const char*> keys) const {
    if (!value_->is_object()) fail("expected an object");
    for (auto it = value_->begin(); it != value_->end(); ++it) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
      if (!known) Node(*doc_, it.value(), pointer_ + "/" + it.key()).fail("unknown key \"" + it.key() + "\"");
    }
  }

  double number() const {
    if (!value_->is_number()) fail("expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer() const {
    if (!value_->is_number_integer()) fail("expected an integer");
    return value_->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
    return value_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }

  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

  double number_or(const char* key, double fallback) const { return has(key) ? (*this)[key].number() : fallback; }

 private:
  const Document* doc_;
  const json* value_;
  std::string pointer_;
};

/// Runs `check`, re-throwing its InputError at the node's line.
template <class F>
void checked(const Node& node, F&& check) {
  try {
    check();
  } catch (const InputError& e) {
    node.fail(e.what());
  } catch (const DomainError& e) {
    node.fail(e.what());
  }
}

std::vector<double> per_step_values(const Node& node, const char* value_key, int steps) {
  if (!node.is_array()) node.fail("expected an array of bands or of per-step values");
  if (node.size() > 0 && node.at(0).is_number()) {
    std::vector<double> values = node.numbers();
    if (values.size() != static_cast<std::size_t>(steps)) {
      node.fail("expected " + std::to_string(steps) + " per-step values, got " + std::to_string(values.size()));
    }
    return values;
  }
  std::vector<HourBand> bands;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Node band = node.at(i);
    band.allow_keys({"start", "end", value_key});
    bands.push_back({band["start"].number(), band["end"].number(), band[value_key].number()});
  }
  std::vector<double> out;
  checked(node, [&] { out = expand_bands(bands, steps); });
  return out;
}

ProblemInstance instance_from(const Node& root) {
  root.allow_keys({"horizon", "building", "tariff", "comfort", "forecast"});
  ProblemInstance inst;

  const Node h = root["horizon"];
  h.allow_keys({"steps", "step_hours", "min_run_steps", "initial_state"});
  inst.horizon.step_count = static_cast<int>(h["steps"].integer());
  inst.horizon.step_hours = h.number_or("step_hours", inst.horizon.step_hours);
  if (h.has("min_run_steps")) inst.horizon.min_run_steps = static_cast<int>(h["min_run_steps"].integer());
  if (h.has("initial_state")) inst.horizon.initial_state = static_cast<int>(h["initial_state"].integer());
  checked(h, [&] { inst.horizon.validate(); });
  const int steps = inst.horizon.step_count;

  const Node b = root["building"];
  b.allow_keys({"b1", "b2", "b3", "b0", "a1", "a2", "a0", "t_in_initial"});
  inst.model = BuildingModel{b["b1"].number(), b["b2"].number(), b["b3"].number(), b["b0"].number(),
                             b["a1"].number(), b["a2"].number(), b["a0"].number(),
                             b["t_in_initial"].number()};
  checked(b, [&] { inst.model.validate(); });

  inst.tariff.price_per_step = per_step_values(root["tariff"], "price", steps);
  checked(root["tariff"], [&] { inst.tariff.validate(inst.horizon); });
  inst.comfort.upper_per_step = per_step_values(root["comfort"], "upper", steps);
  checked(root["comfort"], [&] { inst.comfort.validate(inst.horizon); });

  const Node f = root["forecast"];
  f.allow_keys({"mean", "profile", "sigma", "grid_low", "grid_high", "grid_segments", "candidate_support"});
  if (f.has("mean") == f.has("profile")) f.fail("forecast needs exactly one of \"mean\" or \"profile\"");
  if (f.has("profile")) {
    const Node profile = f["profile"];
    if (profile.string() != "synthetic") profile.fail("unknown profile \"" + profile.string() + "\"");
    for (int t = 0; t < steps; ++t) inst.forecast.mean.push_back(synthetic_mean_temperature(24.0 * t / steps));
  } else {
    inst.forecast.mean = f["mean"].numbers();
    if (inst.forecast.mean.size() != static_cast<std::size_t>(steps)) {
      f["mean"].fail("expected " + std::to_string(steps) + " values, got " +
                     std::to_string(inst.forecast.mean.size()));
    }
  }
  const Node sigma = f["sigma"];
  if (sigma.is_number()) {
    inst.forecast.stddev.assign(steps, sigma.number());
  } else {
    inst.forecast.stddev = sigma.numbers();
    if (inst.forecast.stddev.size() != static_cast<std::size_t>(steps)) {
      sigma.fail("expected " + std::to_string(steps) + " values, got " + std::to_string(inst.forecast.stddev.size()));
    }
  }
  inst.forecast.grid_low = f.number_or("grid_low", inst.forecast.grid_low);
  inst.forecast.grid_high = f.number_or("grid_high", inst.forecast.grid_high);
  if (f.has("grid_segments")) inst.forecast.grid_segments = static_cast<int>(f["grid_segments"].integer());
  if (f.has("candidate_support")) inst.candidate_support = f["candidate_support"].numbers();
  checked(f, [&] { inst.forecast.validate(); });
  checked(root, [&] { inst.validate(); });
  return inst;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ":1: cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string sigma_label(double k) { return "RO-" + format_number(k) + "sigma"; }

std::string default_label(const MethodEntry& entry) {
  switch (entry.method) {
    case Method::kDo:
      return "DO";
    case Method::kSpStrict:
      return "SP-strict";
    case Method::kSpAverage:
      return entry.sp_source == SpAverageSource::kScenarios ? "SP-average-scenarios" : "SP-average";
    case Method::kRo:
      return sigma_label(entry.sigma_k);
    case Method::kDro:
      return "DRO-" + format_number(entry.dro.radius) + (entry.dro.mode == DroMode::kMonolithic ? "-monolithic" : "");
  }
  return "?";
}

std::vector<MethodEntry> methods_from(const Node& node) {
  std::vector<MethodEntry> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Node m = node.at(i);
    m.allow_keys({"method", "label", "sigma_k", "epsilon", "mode", "support_points", "source"});
    MethodEntry entry;
    const Node name = m["method"];
    checked(name, [&] { entry.method = parse_method(name.string()); });
    std::vector<double> radii{0.0};
    if (m.has("sigma_k")) {
      if (entry.method != Method::kRo) m["sigma_k"].fail("sigma_k applies to method \"ro\" only");
      entry.sigma_k = m["sigma_k"].number();
      if (!(entry.sigma_k > 0.0)) m["sigma_k"].fail("sigma_k must be > 0");
    }
    if (m.has("source")) {
      if (entry.method != Method::kSpAverage) m["source"].fail("source applies to method \"sp_average\" only");
      const std::string source = m["source"].string();
      if (source == "distributions") {
        entry.sp_source = SpAverageSource::kDistributions;
      } else if (source == "scenarios") {
        entry.sp_source = SpAverageSource::kScenarios;
      } else {
        m["source"].fail("source must be \"distributions\" or \"scenarios\"");
      }
    }
    for (const char* key : {"epsilon", "mode", "support_points"}) {
      if (m.has(key) && entry.method != Method::kDro) m[key].fail(std::string(key) + " applies to method \"dro\" only");
    }
    if (m.has("epsilon")) {
      const Node eps = m["epsilon"];
      radii = eps.is_number() ? std::vector<double>{eps.number()} : eps.numbers();
      if (radii.empty()) eps.fail("epsilon list is empty");
      for (std::size_t k = 0; k < radii.size(); ++k) {
        if (radii[k] < 0.0) (eps.is_number() ? eps : eps.at(k)).fail("epsilon must be >= 0");
      }
    }
    if (m.has("mode")) {
      const std::string mode = m["mode"].string();
      if (mode == "reduced") {
        entry.dro.mode = DroMode::kReduced;
      } else if (mode == "monolithic") {
        entry.dro.mode = DroMode::kMonolithic;
      } else {
        m["mode"].fail("mode must be \"reduced\" or \"monolithic\"");
      }
    }
    if (m.has("support_points")) {
      entry.dro.support_points = static_cast<int>(m["support_points"].integer());
      if (entry.dro.support_points < 0) m["support_points"].fail("support_points must be >= 0");
    }
    if (m.has("label") && radii.size() > 1) m["label"].fail("label cannot be combined with an epsilon list");
    for (double radius : radii) {
      MethodEntry expanded = entry;
      expanded.dro.radius = radius;
      expanded.label = m.has("label") ? m["label"].string() : default_label(expanded);
      out.push_back(std::move(expanded));
    }
  }
  return out;
}

}  // namespace

std::string MethodEntry::file_tag() const {
  std::string tag;
  for (char c : label) {
    const auto u = static_cast<unsigned char>(c);
    tag += std::isalnum(u) || c == '.' || c == '_' ? static_cast<char>(std::tolower(u)) : '-';
  }
  return tag;
}

void RunConfig::validate() const {
  instance.validate();
  if (test_scenarios < 1) throw InputError("config: test scenario count must be >= 1");
  if (training_scenarios < 1) throw InputError("config: training scenario count must be >= 1");
  for (const auto& m : methods) {
    if (m.method == Method::kRo && !(m.sigma_k > 0.0)) throw InputError("config: sigma_k must be > 0");
    if (m.method == Method::kDro) m.dro.validate();
  }
}

MethodEntry make_method_entry(Method method, double sigma_k, double radius) {
  MethodEntry entry;
  entry.method = method;
  entry.sigma_k = sigma_k;
  entry.dro.radius = radius;
  entry.label = default_label(entry);
  return entry;
}

std::vector<MethodEntry> default_methods() {
  return {make_method_entry(Method::kDo),
          make_method_entry(Method::kRo, 2.0),
          make_method_entry(Method::kRo, 3.0),
          make_method_entry(Method::kSpStrict),
          make_method_entry(Method::kSpAverage),
          make_method_entry(Method::kDro, 3.0, 0.0),
          make_method_entry(Method::kDro, 3.0, 1.0),
          make_method_entry(Method::kDro, 3.0, 2.0),
          make_method_entry(Method::kDro, 3.0, 2.5)};
}

RunConfig default_run_config() {
  RunConfig config;
  config.instance = synthetic_practical_instance();
  config.methods = default_methods();
  return config;
}

ProblemInstance parse_instance(const std::string& text, const std::string& source) {
  const Document doc(text, source);
  return instance_from(Node(doc, doc.root(), ""));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_file(path), path.string());
}

std::string instance_to_json(const ProblemInstance& inst) {
  json out;
  out["horizon"] = {{"steps", inst.horizon.step_count},
                    {"step_hours", inst.horizon.step_hours},
                    {"min_run_steps", inst.horizon.min_run_steps},
                    {"initial_state", inst.horizon.initial_state}};
  const auto& m = inst.model;
  out["building"] = {{"b1", m.b1}, {"b2", m.b2}, {"b3", m.b3}, {"b0", m.b0}, {"a1", m.a1},
                     {"a2", m.a2}, {"a0", m.a0}, {"t_in_initial", m.t_in_initial}};
  out["tariff"] = inst.tariff.price_per_step;
  out["comfort"] = inst.comfort.upper_per_step;
  json forecast = {{"mean", inst.forecast.mean},
                   {"sigma", inst.forecast.stddev},
                   {"grid_low", inst.forecast.grid_low},
                   {"grid_high", inst.forecast.grid_high},
                   {"grid_segments", inst.forecast.grid_segments}};
  if (!inst.candidate_support.empty()) forecast["candidate_support"] = inst.candidate_support;
  out["forecast"] = std::move(forecast);
  return out.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& text, const std::string& source,
                           const std::filesystem::path& base_dir) {
  const Document doc(text, source);
  const Node root(doc, doc.root(), "");
  root.allow_keys({"instance", "output_dir", "methods", "scenarios", "seeds", "grid", "cost_basis",
                   "per_scenario_output"});
  RunConfig config;

  const Node instance = root["instance"];
  if (instance.is_object()) {
    config.instance = instance_from(instance);
  } else {
    const std::string ref = instance.string();
    if (ref == "builtin:synthetic") {
      config.instance = synthetic_practical_instance();
    } else {
      std::filesystem::path path = ref;
      if (path.is_relative()) path = base_dir / path;
      if (!std::filesystem::exists(path)) instance.fail("instance file not found: " + path.string());
      config.instance = load_instance(path);
    }
  }

  if (root.has("grid")) {
    const Node grid = root["grid"];
    grid.allow_keys({"low", "high", "segments"});
    auto& f = config.instance.forecast;
    f.grid_low = grid.number_or("low", f.grid_low);
    f.grid_high = grid.number_or("high", f.grid_high);
    if (grid.has("segments")) f.grid_segments = static_cast<int>(grid["segments"].integer());
    checked(grid, [&] { f.validate(); });
  }

  if (root.has("output_dir")) config.output_dir = root["output_dir"].string();

  if (root.has("scenarios")) {
    const Node s = root["scenarios"];
    s.allow_keys({"test", "training"});
    if (s.has("test")) config.test_scenarios = s["test"].unsigned_integer();
    if (s.has("training")) config.training_scenarios = s["training"].unsigned_integer();
    if (config.test_scenarios < 1) s["test"].fail("scenario count must be >= 1");
    if (config.training_scenarios < 1) s["training"].fail("scenario count must be >= 1");
  }
  if (root.has("seeds")) {
    const Node s = root["seeds"];
    s.allow_keys({"regular", "extreme", "training"});
    if (s.has("regular")) config.seed_regular = s["regular"].unsigned_integer();
    if (s.has("extreme")) config.seed_extreme = s["extreme"].unsigned_integer();
    if (s.has("training")) config.seed_training = s["training"].unsigned_integer();
  }
  if (root.has("cost_basis")) {
    const std::string basis = root["cost_basis"].string();
    if (basis == "regular") {
      config.cost_basis = CostBasis::kRegular;
    } else if (basis == "extreme") {
      config.cost_basis = CostBasis::kExtreme;
    } else {
      root["cost_basis"].fail("cost_basis must be \"regular\" or \"extreme\"");
    }
  }
  if (root.has("per_scenario_output")) config.per_scenario_output = root["per_scenario_output"].boolean();

  if (root.has("methods")) {
    config.methods = methods_from(root["methods"]);
    if (config.methods.empty()) root["methods"].fail("method list is empty");
  } else {
    config.methods = default_methods();
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path), path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

void write_schedule_csv(const Schedule& schedule, std::ostream& out) {
  out << "step,x\n";
  for (std::size_t t = 0; t < schedule.size(); ++t) out << t + 1 << ',' << schedule.on_off[t] << '\n';
}

Schedule read_schedule_csv(std::istream& in, const std::string& source) {
  Schedule schedule;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& message) -> void {
    throw InputError(source + ":" + std::to_string(line_no) + ": " + message);
  };
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  if (!std::getline(in, line)) {
    line_no = 1;
    fail("empty schedule file");
  }
  line_no = 1;
  if (strip(line) != "step,x") fail("expected header \"step,x\"");
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected two columns");
    long step = 0;
    int x = 0;
    const char* first = line.data();
    auto [p1, e1] = std::from_chars(first, first + comma, step);
    auto [p2, e2] = std::from_chars(first + comma + 1, first + line.size(), x);
    if (e1 != std::errc() || p1 != first + comma || e2 != std::errc() || p2 != first + line.size()) {
      fail("malformed row \"" + line + "\"");
    }
    if (step != static_cast<long>(schedule.size()) + 1) fail("steps must be consecutive from 1");
    if (x != 0 && x != 1) fail("x must be 0 or 1");
    schedule.on_off.push_back(x);
  }
  if (schedule.on_off.empty()) fail("schedule has no rows");
  return schedule;
}

std::string report_to_json(const EvaluationReport& report, bool per_scenario) {
  json out = {{"method", report.method},
              {"scenario_set", report.scenario_set},
              {"seed", report.seed},
              {"scenarios", report.scenario_count},
              {"mean_cost", report.mean_cost},
              {"mean_violation_count", report.mean_violation_count},
              {"mean_violation_mileage", report.mean_violation_mileage}};
  if (!report.violation_mileages.empty()) {
    out["p95_violation_count"] = EvaluationReport::percentile(report.violation_counts, 0.95);
    out["p95_violation_mileage"] = EvaluationReport::percentile(report.violation_mileages, 0.95);
  }
  if (per_scenario) {
    out["per_scenario"] = {{"cost", report.costs},
                           {"violation_count", report.violation_counts},
                           {"violation_mileage", report.violation_mileages}};
  }
  return out.dump(2) + "\n";
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

}  // namespace hvacdro

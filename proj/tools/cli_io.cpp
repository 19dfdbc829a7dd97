#include "cli_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "pco/baselines.hpp"
#include "pco/calibration.hpp"
#include "pco/density.hpp"
#include "pco/error.hpp"
#include "pco/gwn.hpp"
#include "pco/risklab.hpp"

namespace pco::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool to_double(std::string_view text, double& v) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  return !text.empty() && ec == std::errc() && ptr == text.data() + text.size();
}

double number(std::string_view text, std::string_view what) {
  double v = 0.0;
  if (!to_double(text, v) || !std::isfinite(v))
    throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a finite number");
  return v;
}

std::size_t count_of(std::string_view text, std::string_view what) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
  return v;
}

json bandwidth_json(const Bandwidth& h) { return json(std::vector<double>(h.components().begin(), h.components().end())); }

json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"q10", s.q10}, {"q90", s.q90}, {"sd", s.sd}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(const RunConfig& c) : dir_(c.out) {
    base_ = std::string(subcommand_name(c.subcommand)) + "_" + (c.stamp.empty() ? timestamp() : c.stamp);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  fs::path path(std::string_view ext) const { return dir_ / (base_ + "." + std::string(ext)); }

  std::string write(std::string_view ext, const std::string& content) {
    const auto p = path(ext);
    std::ofstream f(p, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    written_.push_back(p.string());
    return p.string();
  }

  std::string write_json(const json& j) { return write("json", j.dump(2) + "\n"); }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::string base_;
  std::vector<std::string> written_;
};

Sample load_input(const RunConfig& c) {
  try {
    return ingest_csv(c.input);
  } catch (const ParseError& e) {
    throw IoError(e.what());
  }
}

ProductKernel make_kernel(const RunConfig& c, std::size_t dim) {
  try {
    return ProductKernel(Kernel::parse(c.kernel), dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

BandwidthGrid make_grid(const RunConfig& c, const ProductKernel& k, std::size_t n) {
  if (!c.grid.empty()) return parse_grid_spec(c.grid, k.dim());
  return default_grid(k, n);
}

BaselineSpec baseline_spec(const RunConfig& c, BaselineMethod m) {
  BaselineSpec spec;
  spec.method = m;
  if (c.kappa) spec.kappa1 = *c.kappa;
  spec.kappa2 = c.kappa2;
  return spec;
}

MethodSpec method_spec(const RunConfig& c, std::string_view id) {
  MethodSpec m;
  try {
    m = MethodSpec::parse(trim(id));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (m.kind != MethodSpec::Kind::pco) m.baseline = baseline_spec(c, m.baseline.method);
  return m;
}

json header(const RunConfig& c) {
  return {{"subcommand", subcommand_name(c.subcommand)}, {"kernel", c.kernel}, {"threads", c.threads}};
}

json run_select(const RunConfig& c, Outputs& out) {
  const Sample sample = load_input(c);
  const auto k = make_kernel(c, sample.dim());
  const auto grid = make_grid(c, k, sample.size());
  const MethodSpec m = method_spec(c, c.method);
  json result = header(c);
  result["input"] = c.input;
  result["n"] = sample.size();
  result["d"] = sample.dim();
  result["method"] = m.kind == MethodSpec::Kind::pco ? "pco" : m.name();
  if (m.kind == MethodSpec::Kind::pco) {
    const auto table = select_bandwidth(sample, k, grid, {PenaltyMode::family, c.lambda}, c.threads);
    result["lambda"] = c.lambda;
    result["selected_index"] = table.selected;
    result["selected"] = bandwidth_json(table.selected_bandwidth());
    json rows = json::array();
    for (const auto& r : table.rows)
      rows.push_back({{"h", bandwidth_json(r.h)}, {"comparison", r.comparison}, {"penalty", r.penalty}, {"total", r.total}});
    result["criterion"] = rows;
    result["warnings"] = table.warnings;
  } else {
    const auto r = baseline_select(sample, k, grid, m.baseline, c.threads);
    if (m.kind != MethodSpec::Kind::lscv) {
      result["kappa1"] = m.baseline.kappa1;
      if (m.kind == MethodSpec::Kind::gl) result["kappa2"] = m.baseline.effective_kappa2();
    }
    result["selected_index"] = r.index;
    result["selected"] = bandwidth_json(r.bandwidth);
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({{"h", bandwidth_json(grid[i])}, {"value", r.criterion[i]}});
    result["criterion"] = rows;
    result["warnings"] = grid.admissibility_warnings(k, sample.size());
  }
  out.write_json(result);
  return {{"selected", result["selected"]}, {"selected_index", result["selected_index"]}};
}

json run_calibrate(const RunConfig& c, Outputs& out) {
  const Sample sample = load_input(c);
  const auto k = make_kernel(c, sample.dim());
  const auto grid = make_grid(c, k, sample.size());
  const auto lambdas = c.lambda_grid.empty() ? default_lambda_grid() : parse_lambda_grid(c.lambda_grid);
  const auto profile = compute_comparisons(sample, k, grid, c.threads);
  CalibrationTrace trace;
  try {
    trace = scan_lambda(profile, lambdas);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  out.write("csv", csv.str());

  json result = header(c);
  result["input"] = c.input;
  result["n"] = sample.size();
  result["d"] = sample.dim();
  result["jump"] = trace.jump;
  result["jump_threshold"] = kJumpThreshold;
  result["lambda_crit"] = trace.lambda_crit ? json(*trace.lambda_crit) : json(nullptr);
  result["recommended_lambda"] = trace.recommended_lambda ? json(*trace.recommended_lambda) : json(nullptr);
  if (trace.lambda_crit) {
    const auto table = select_from_profile(profile, recommend(trace));
    result["selected"] = bandwidth_json(table.selected_bandwidth());
    result["warnings"] = table.warnings;
  } else {
    result["selected"] = nullptr;
    result["warnings"] = grid.admissibility_warnings(k, sample.size());
  }
  out.write_json(result);
  if (!trace.lambda_crit) throw CalibrationFailed(trace);
  return {{"lambda_crit", *trace.lambda_crit}, {"recommended_lambda", *trace.recommended_lambda}, {"selected", result["selected"]}};
}

json run_simulate(const RunConfig& c, Outputs& out) {
  Density f = Density::standard_normal();
  try {
    f = Density::parse(c.density);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  const auto k = make_kernel(c, f.dim());
  const auto grid = make_grid(c, k, c.n);
  std::vector<MethodSpec> methods;
  for (auto id : split(c.method, ',')) methods.push_back(method_spec(c, id));
  const auto report = oracle_experiment(f, c.n, k, grid, methods, c.reps, *c.seed, c.threads);

  std::ostringstream csv;
  write_risk_csv(csv, report);
  out.write("csv", csv.str());

  json result = header(c);
  result["density"] = report.density;
  result["n"] = report.n;
  result["reps"] = report.reps;
  result["seed"] = report.seed;
  json per = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json row = summary_json(report.per_bandwidth[i]);
    row["h"] = bandwidth_json(grid[i]);
    per.push_back(row);
  }
  result["per_bandwidth"] = per;
  result["oracle_index"] = report.oracle_index;
  result["oracle_bandwidth"] = bandwidth_json(report.oracle_bandwidth);
  json ms = json::array();
  for (const auto& m : report.methods)
    ms.push_back({{"method", m.method.name()},
                  {"ise", summary_json(m.ise_summary)},
                  {"ratio", summary_json(m.ratio_summary)},
                  {"mean_ratio", m.mean_ratio}});
  result["methods"] = ms;
  out.write_json(result);
  return {{"oracle_bandwidth", result["oracle_bandwidth"]}};
}

json run_gwn(const RunConfig& c, Outputs& out) {
  const double eps = c.epsilon.value_or(1.0 / std::sqrt(static_cast<double>(c.N)));
  gwn::SequenceModel model;
  try {
    model = gwn::SequenceModel::parse(c.theta, c.N, eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto lambdas = parse_lambda_grid(c.lambda_grid.empty() ? std::string("0:3:31") : c.lambda_grid);
  std::vector<gwn::PhaseRow> rows;
  try {
    rows = gwn::phase_diagram(model, lambdas, c.reps, *c.seed, c.threads);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::ostringstream csv;
  gwn::write_phase_csv(csv, rows);
  out.write("csv", csv.str());

  json result = header(c);
  result.erase("kernel");
  result["N"] = c.N;
  result["epsilon"] = eps;
  result["theta"] = c.theta;
  result["reps"] = c.reps;
  result["seed"] = *c.seed;
  json table = json::array();
  for (const auto& r : rows)
    table.push_back({{"lambda", r.lambda},
                     {"mean_D", r.mean_selected},
                     {"mean_risk", r.mean_risk},
                     {"freq_half", r.frequency_half}});
  result["rows"] = table;
  out.write_json(result);
  return json::object();
}

template <class T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& field) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    field.reset();
    return;
  }
  T v{};
  take(j, key, v);
  field = v;
}

// Counts and seeds must be JSON integers; get<size_t>() would silently
// truncate 2.5 or wrap -1.
template <class T>
void take_unsigned(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_unsigned()) throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  field = j.at(key).get<T>();
}

}  // namespace

std::string_view subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::select:
      return "select";
    case Subcommand::calibrate:
      return "calibrate";
    case Subcommand::simulate:
      return "simulate";
    case Subcommand::gwn_demo:
      return "gwn-demo";
  }
  return "unknown";
}

void RunConfig::validate() const {
  const bool needs_input = subcommand == Subcommand::select || subcommand == Subcommand::calibrate;
  if (needs_input && input.empty()) throw ConfigError("--input is required for " + std::string(subcommand_name(subcommand)));
  if (!needs_input && !seed)
    throw ConfigError("--seed is required for " + std::string(subcommand_name(subcommand)) + " (no implicit entropy)");
  if (threads == 0) throw ConfigError("--threads must be >= 1");
  if (out.empty()) throw ConfigError("--out must not be empty");
  if (!std::isfinite(lambda)) throw ConfigError("--lambda must be finite");
  if (kappa && !(*kappa >= 0.0 && std::isfinite(*kappa))) throw ConfigError("--kappa must be finite and >= 0");
  if (kappa2 && !(*kappa2 >= 0.0 && std::isfinite(*kappa2))) throw ConfigError("--kappa2 must be finite and >= 0");
  if (stamp.find_first_of("/\\") != std::string::npos) throw ConfigError("--stamp must not contain path separators");
  if (subcommand == Subcommand::select && method.find(',') != std::string::npos)
    throw ConfigError("select takes a single --method");
  if (subcommand == Subcommand::simulate && n < 2) throw ConfigError("--n must be >= 2");
  if (subcommand == Subcommand::gwn_demo) {
    if (N == 0) throw ConfigError("--N must be >= 1");
    if (epsilon && !(*epsilon > 0.0 && std::isfinite(*epsilon))) throw ConfigError("--epsilon must be > 0");
  }
  if (subcommand == Subcommand::simulate && reps < 50) throw ConfigError("--reps must be >= 50 for simulate");
  if (subcommand == Subcommand::gwn_demo && reps == 0) throw ConfigError("--reps must be >= 1");
  if (!grid.empty() && (subcommand == Subcommand::gwn_demo)) throw ConfigError("--grid does not apply to gwn-demo");
  if (!grid.empty()) parse_grid_spec(grid, std::max<std::size_t>(1, split(grid, ';').size()));
  if (!lambda_grid.empty()) parse_lambda_grid(lambda_grid);
}

Sample ingest_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path.string() + "'");
  std::vector<double> values;
  std::size_t dim = 0;
  std::size_t row = 0;
  bool first = true;
  std::string line;
  const std::string where = path.string();
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    std::vector<double> parsed(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) numeric = numeric && to_double(cells[j], parsed[j]);
    if (first) {
      first = false;
      if (!numeric) continue;  // header
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!to_double(cells[j], parsed[j]))
        throw ParseError(where + ": row " + std::to_string(row) + ", column " + std::to_string(j + 1) + ": '" +
                         std::string(trim(cells[j])) + "' is not a number");
      if (!std::isfinite(parsed[j]))
        throw ParseError(where + ": row " + std::to_string(row) + ", column " + std::to_string(j + 1) +
                         ": non-finite value '" + std::string(trim(cells[j])) + "'");
    }
    if (dim == 0) dim = cells.size();
    if (cells.size() != dim)
      throw ParseError(where + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(dim));
    values.insert(values.end(), parsed.begin(), parsed.end());
  }
  if (in.bad()) throw IoError("error reading '" + where + "'");
  if (values.empty()) throw ParseError(where + ": no data rows");
  return Sample(std::move(values), dim);
}

BandwidthGrid parse_grid_spec(std::string_view spec, std::size_t dim) {
  const auto parts = split(spec, ';');
  std::vector<std::vector<double>> axes;
  for (auto part : parts) {
    part = trim(part);
    const auto f = split(part, ':');
    if (f.size() != 4 || trim(f[0]) != "geometric")
      throw ConfigError("grid '" + std::string(part) + "': expected geometric:<hmin>:<hmax>:<count>");
    const double lo = number(f[1], "grid hmin");
    const double hi = number(f[2], "grid hmax");
    const std::size_t count = count_of(f[3], "grid count");
    if (count < 1) throw ConfigError("grid '" + std::string(part) + "': count must be >= 1");
    if (!(lo > 0.0) || lo > hi) throw ConfigError("grid '" + std::string(part) + "': need 0 < hmin <= hmax");
    try {
      axes.push_back(BandwidthGrid::geometric_axis(lo, hi, count));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grid '" + std::string(part) + "': " + e.what());
    }
  }
  if (axes.size() == 1 && dim > 1) axes.resize(dim, axes.front());
  if (axes.size() != dim)
    throw ConfigError("grid has " + std::to_string(axes.size()) + " axes, data have " + std::to_string(dim));
  try {
    return BandwidthGrid::product(axes);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

std::vector<double> parse_lambda_grid(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw ConfigError("empty lambda grid");
  std::vector<double> out;
  if (spec.find(':') != std::string_view::npos) {
    const auto f = split(spec, ':');
    if (f.size() != 3) throw ConfigError("lambda grid '" + std::string(spec) + "': expected <lo>:<hi>:<count>");
    const double lo = number(f[0], "lambda grid lo");
    const double hi = number(f[1], "lambda grid hi");
    const std::size_t count = count_of(f[2], "lambda grid count");
    try {
      return default_lambda_grid(lo, hi, count);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("lambda grid '" + std::string(spec) + "': " + e.what());
    }
  }
  for (auto v : split(spec, ',')) out.push_back(number(v, "lambda grid value"));
  return out;
}

void apply_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::vector<std::string> known{"input", "out",   "kernel",  "grid",    "lambda", "lambda_grid",
                                              "method", "seed", "threads", "kappa",   "kappa2", "stamp",
                                              "density", "n",   "reps",    "N",       "epsilon", "theta"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  take(j, "input", c.input);
  take(j, "out", c.out);
  take(j, "kernel", c.kernel);
  take(j, "grid", c.grid);
  take(j, "lambda", c.lambda);
  if (j.contains("lambda_grid") && j["lambda_grid"].is_array()) {
    std::string joined;
    for (const auto& v : j["lambda_grid"]) {
      if (!v.is_number()) throw ConfigError("config key 'lambda_grid' must hold numbers");
      if (!joined.empty()) joined += ',';
      joined += v.dump();
    }
    c.lambda_grid = joined;
  } else {
    take(j, "lambda_grid", c.lambda_grid);
  }
  if (j.contains("method") && j["method"].is_array()) {
    std::string joined;
    for (const auto& v : j["method"]) {
      if (!v.is_string()) throw ConfigError("config key 'method' must hold strings");
      if (!joined.empty()) joined += ',';
      joined += v.get<std::string>();
    }
    c.method = joined;
  } else {
    take(j, "method", c.method);
  }
  if (j.contains("seed")) {
    std::uint64_t s = 0;
    take_unsigned(j, "seed", s);
    c.seed = s;
  }
  take_unsigned(j, "threads", c.threads);
  take(j, "kappa", c.kappa);
  take(j, "kappa2", c.kappa2);
  take(j, "stamp", c.stamp);
  take(j, "density", c.density);
  take_unsigned(j, "n", c.n);
  take_unsigned(j, "reps", c.reps);
  take_unsigned(j, "N", c.N);
  take(j, "epsilon", c.epsilon);
  take(j, "theta", c.theta);
}

void apply_config_file(RunConfig& c, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  apply_config(c, j);
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Kernel density bandwidth selection by penalized comparison to overfitting", "pco"};
  app.require_subcommand(1);
  RunConfig c;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa, kappa2, epsilon;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
    sub->add_option("--config", config_path, "JSON file whose values override flags");
    sub->add_option("--stamp", c.stamp, "Output file suffix instead of the UTC timestamp");
    sub->add_option("--seed", seed, "Master random seed");
  };
  auto kde = [&](CLI::App* sub) {
    sub->add_option("--kernel", c.kernel, "gaussian | epanechnikov | order:<l>:<base>")->capture_default_str();
    sub->add_option("--grid", c.grid, "geometric:<hmin>:<hmax>:<count>[;...] (default: 30-point data-size grid)");
    sub->add_option("--kappa", kappa, "Lepski / GL variance constant kappa1");
    sub->add_option("--kappa2", kappa2, "GL constant kappa2 (default 2 kappa1)");
  };

  auto* select = app.add_subcommand("select", "Select a bandwidth for a CSV sample");
  common(select);
  kde(select);
  select->add_option("--input", c.input, "CSV file, one observation per row");
  select->add_option("--lambda", c.lambda, "PCO penalty constant")->capture_default_str();
  select->add_option("--method", c.method, "pco | pco:<lambda> | lepski | gl | lscv")->capture_default_str();

  auto* calibrate = app.add_subcommand("calibrate", "Scan lambda and detect the minimal-penalty jump");
  common(calibrate);
  kde(calibrate);
  calibrate->add_option("--input", c.input, "CSV file, one observation per row");
  calibrate->add_option("--lambda-grid", c.lambda_grid, "<lo>:<hi>:<count> or a comma list (default -1:2:31)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo risk experiment on a known density");
  common(simulate);
  kde(simulate);
  simulate->add_option("--density", c.density, "standard_normal | claw | uniform | normal:m:s | mixture:w,m,s;...")
      ->capture_default_str();
  simulate->add_option("--n", c.n, "Sample size")->capture_default_str();
  simulate->add_option("--reps", c.reps, "Replications (>= 50)")->capture_default_str();
  simulate->add_option("--method", c.method, "Comma-separated methods")->capture_default_str();

  auto* gwn = app.add_subcommand("gwn-demo", "Ordered selection in the Gaussian sequence model");
  common(gwn);
  gwn->add_option("--N", c.N, "Number of coefficients")->capture_default_str();
  gwn->add_option("--epsilon", epsilon, "Noise level (default 1/sqrt(N))");
  gwn->add_option("--theta", c.theta, "zero | power:<a>")->capture_default_str();
  gwn->add_option("--lambda-grid", c.lambda_grid, "<lo>:<hi>:<count> or a comma list (default 0:3:31)");
  gwn->add_option("--reps", c.reps, "Replications")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  if (select->parsed()) c.subcommand = Subcommand::select;
  if (calibrate->parsed()) c.subcommand = Subcommand::calibrate;
  if (simulate->parsed()) c.subcommand = Subcommand::simulate;
  if (gwn->parsed()) c.subcommand = Subcommand::gwn_demo;
  c.seed = seed;
  c.kappa = kappa;
  c.kappa2 = kappa2;
  c.epsilon = epsilon;
  if (!config_path.empty()) apply_config_file(c, config_path);
  c.validate();
  return c;
}

json execute(const RunConfig& c) {
  c.validate();
  Outputs out(c);
  json extra;
  switch (c.subcommand) {
    case Subcommand::select:
      extra = run_select(c, out);
      break;
    case Subcommand::calibrate:
      extra = run_calibrate(c, out);
      break;
    case Subcommand::simulate:
      extra = run_simulate(c, out);
      break;
    case Subcommand::gwn_demo:
      extra = run_gwn(c, out);
      break;
  }
  json status{{"status", "ok"}, {"subcommand", subcommand_name(c.subcommand)}, {"outputs", out.written()}};
  status.update(extra);
  return status;
}

namespace {

int report_error(std::ostream& out, int code, std::string_view kind, std::string_view message, json extra = json::object()) {
  json j{{"status", "error"}, {"code", code}, {"kind", kind}, {"message", message}};
  j.update(extra);
  out << j.dump() << '\n';
  return code;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out) {
  try {
    out << execute(c).dump() << '\n';
    return kOk;
  } catch (const CalibrationFailed& e) {
    const auto& t = e.trace();
    return report_error(out, kNoTransition, "no_transition", e.what(), {{"jump", t.jump}});
  } catch (const ConfigError& e) {
    return report_error(out, kConfig, "config", e.what());
  } catch (const ParseError& e) {
    return report_error(out, kConfig, "config", e.what());
  } catch (const IoError& e) {
    return report_error(out, kIo, "io", e.what());
  } catch (const UnsupportedError& e) {
    return report_error(out, kConfig, "unsupported", e.what());
  } catch (const std::invalid_argument& e) {
    return report_error(out, kConfig, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return report_error(out, kFailure, "internal", e.what());
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_command_line(argc, argv, out);
  } catch (const ConfigError& e) {
    err << "pco: " << e.what() << '\n';
    return report_error(out, kConfig, "config", e.what());
  } catch (const IoError& e) {
    err << "pco: " << e.what() << '\n';
    return report_error(out, kIo, "io", e.what());
  }
  if (!config) return kOk;
  return run(*config, out);
}

}  // namespace pco::cli

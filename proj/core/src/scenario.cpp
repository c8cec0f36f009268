#include "leafcausal/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "leafcausal/properties.hpp"

#ifndef LEAFCAUSAL_VERSION
#define LEAFCAUSAL_VERSION "0.0.0"
#endif

namespace leafcausal {

std::string_view version() { return LEAFCAUSAL_VERSION; }

const std::vector<std::string>& scenario_tasks() {
  static const std::vector<std::string> tasks{"classify-demo", "ricci-scan",   "diameter-shoot", "diameter-graph",
                                              "focal-scan",    "ladder-probe", "reach"};
  return tasks;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

// --- parsing -----------------------------------------------------------------------

namespace {

enum class Kind { Real, NonNegative, Positive, Count };

const std::map<std::string, Kind>& numeric_keys() {
  static const std::map<std::string, Kind> keys{
      {"C", Kind::NonNegative},          {"factor", Kind::Positive},       {"resolution", Kind::Positive},
      {"margin", Kind::NonNegative},     {"strict_margin", Kind::Positive}, {"time_points", Kind::Count},
      {"spatial_points", Kind::Count},   {"directions", Kind::Count},      {"chi_max", Kind::Positive},
      {"samples", Kind::Count},          {"polylines", Kind::Count},       {"oracle_samples", Kind::Count},
      {"orbit_points", Kind::Count},     {"max_param", Kind::Positive},    {"delta", Kind::Positive},
      {"separation", Kind::Count},       {"leaf_samples", Kind::Count},    {"step", Kind::Positive},
  };
  return keys;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& text, std::size_t line, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    parse_fail(line, "'" + key + "' expects a finite number, got '" + text + "'");
  return v;
}

void check_kind(double v, Kind kind, std::size_t line, const std::string& key) {
  switch (kind) {
    case Kind::Real: return;
    case Kind::NonNegative:
      if (v < 0) parse_fail(line, "'" + key + "' must be non-negative");
      return;
    case Kind::Positive:
      if (!(v > 0)) parse_fail(line, "'" + key + "' must be positive");
      return;
    case Kind::Count:
      if (!(v >= 1) || v != std::floor(v)) parse_fail(line, "'" + key + "' must be a positive integer");
      return;
  }
}

}  // namespace

double Scenario::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) parse_fail(line_no, "missing key");
    if (value.empty()) parse_fail(line_no, "missing value for '" + key + "'");
    if (!seen.insert(key).second) parse_fail(line_no, "duplicate key '" + key + "'");
    s.echo.emplace_back(key, value);

    if (key == "example") {
      s.example = value;
    } else if (key == "task") {
      if (std::find(scenario_tasks().begin(), scenario_tasks().end(), value) == scenario_tasks().end())
        parse_fail(line_no, "unknown task '" + value + "'");
      s.task = value;
    } else if (key == "seed") {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size())
        parse_fail(line_no, "'seed' expects a non-negative integer");
      s.seed = v;
    } else if (key == "report") {
      if (value.find('/') != std::string::npos) parse_fail(line_no, "'report' is a file name, not a path");
      s.report = value;
    } else if (key == "tables") {
      if (value == "1" || value == "true" || value == "yes") s.tables = true;
      else if (value == "0" || value == "false" || value == "no") s.tables = false;
      else parse_fail(line_no, "'tables' expects yes or no");
    } else if (key == "resolutions") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double r = parse_real(trim(item), line_no, key);
        check_kind(r, Kind::Positive, line_no, key);
        s.resolutions.push_back(r);
      }
      if (s.resolutions.empty()) parse_fail(line_no, "'resolutions' is empty");
    } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
      s.example_params[key.substr(6)] = parse_real(value, line_no, key);
    } else if (auto it = numeric_keys().find(key); it != numeric_keys().end()) {
      double v = parse_real(value, line_no, key);
      check_kind(v, it->second, line_no, key);
      s.values[key] = v;
    } else {
      throw Error(ErrorCode::UnknownKey, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (s.example.empty()) throw Error(ErrorCode::MissingKey, "example");
  if (s.task.empty()) throw Error(ErrorCode::MissingKey, "task");
  if (s.has("resolution") && !s.resolutions.empty())
    throw Error(ErrorCode::ParseError, "give either 'resolution' or 'resolutions', not both");
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// --- report ------------------------------------------------------------------------

void ReportSection::set(const std::string& key, double value) { set(key, format_number(value)); }

void ReportSection::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries)
    if (k == key) {
      v = value;
      return;
    }
  entries.emplace_back(key, value);
}

ReportSection& ReportSection::child(const std::string& n) {
  for (auto& c : children)
    if (c.name == n) return c;
  children.push_back({n, {}, {}});
  return children.back();
}

std::size_t Report::evaluated() const {
  return static_cast<std::size_t>(std::count_if(claims.begin(), claims.end(), [](const auto& c) { return c.value.has_value(); }));
}

std::size_t Report::failed() const {
  return static_cast<std::size_t>(
      std::count_if(claims.begin(), claims.end(), [](const auto& c) { return c.value && !c.passed; }));
}

namespace {

void render_section(std::ostringstream& os, const ReportSection& s, int depth) {
  std::string pad(2 * depth, ' ');
  os << pad << s.name << " {\n";
  for (const auto& [k, v] : s.entries) os << pad << "  " << k << ": " << v << "\n";
  for (const auto& c : s.children) render_section(os, c, depth + 1);
  os << pad << "}\n";
}

std::string describe_expectation(const ExpectedClaim& c) {
  switch (c.cmp) {
    case Comparison::AtLeast: return ">= " + format_number(c.lo);
    case Comparison::AtMost: return "<= " + format_number(c.hi);
    case Comparison::Within: return "in [" + format_number(c.lo) + ", " + format_number(c.hi) + "]";
    case Comparison::Equals: return "== " + format_number(c.lo);
  }
  return "?";
}

}  // namespace

std::string Report::render() const {
  std::ostringstream os;
  os << "leafcausal-report v1\n";
  ReportSection sc{"scenario", {}, {}};
  for (const auto& [k, v] : scenario.echo) sc.set(k, v);
  sc.set("seed", std::to_string(scenario.seed));  // effective seed, after any override
  render_section(os, sc, 0);

  ReportSection ex{"example", {}, {}};
  ex.set("id", scenario.example);
  ex.set("description", description);
  for (const auto& [k, v] : params) ex.set("param." + k, v);
  render_section(os, ex, 0);

  render_section(os, results, 0);

  ReportSection cl{"claims", {}, {}};
  for (const auto& c : claims) {
    ReportSection& e = cl.child("claim " + c.claim.id);
    e.set("key", c.claim.key);
    e.set("value", c.value ? format_number(*c.value) : std::string("not produced"));
    e.set("expected", describe_expectation(c.claim));
    e.set("source", std::string(to_string(c.claim.source)));
    e.set("note", c.claim.note);
    e.set("status", !c.value ? "skipped" : c.passed ? "pass" : "FAIL");
  }
  render_section(os, cl, 0);

  ReportSection sum{"summary", {}, {}};
  sum.set("claims_total", static_cast<double>(claims.size()));
  sum.set("claims_evaluated", static_cast<double>(evaluated()));
  sum.set("claims_failed", static_cast<double>(failed()));
  sum.set("status", all_passed() ? "pass" : "fail");
  render_section(os, sum, 0);

  ReportSection meta{"meta", {}, {}};
  meta.set("version", std::string(version()));
  meta.set("derivatives", "forward-dual");
  meta.set("integrator", "rk4");
  meta.set("number_format", "12 significant digits");
  render_section(os, meta, 0);
  return os.str();
}

std::vector<std::filesystem::path> emit(const Report& report, const std::filesystem::path& dir,
                                        const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
    written.push_back(file);
  };
  std::string name = report.scenario.report.empty() ? stem + ".report" : report.scenario.report;
  write(dir / name, report.render());
  if (report.scenario.tables) {
    for (const auto& t : report.tables) {
      std::ostringstream os;
      for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
      os << "\n";
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << "\n";
      }
      write(dir / (stem + "-" + t.name + ".csv"), os.str());
    }
  }
  return written;
}

// --- tasks -------------------------------------------------------------------------

namespace {

constexpr double kPi = std::numbers::pi;

struct Ctx {
  const Scenario& sc;
  const ExampleSpec& ex;
  Report& rep;

  void metric(const std::string& key, double v) {
    rep.metrics[key] = v;
    rep.results.set(key, v);
  }
};

[[noreturn]] void unsupported(const Ctx& c, const std::string& what) {
  throw Error(ErrorCode::InvalidAtlas, "example " + c.ex.id + " has no " + what + " for task " + c.sc.task);
}

const TransverseMetricField& need_gt(const Ctx& c) {
  if (!c.ex.gt) unsupported(c, "transverse metric");
  return *c.ex.gt;
}
const ChartAtlas& need_g(const Ctx& c) {
  if (!c.ex.g) unsupported(c, "bundle-like metric");
  return *c.ex.g;
}
const TimeOrientation& need_orient(const Ctx& c) {
  if (!c.ex.orient) unsupported(c, "time orientation");
  return *c.ex.orient;
}

Table curve_table(const std::string& name, const CurveSamples& curve) {
  Table t{name, {"param", "chart"}, {}};
  if (curve.size() == 0) return t;
  const auto n = curve.samples[0].point.size();
  for (Eigen::Index i = 0; i < n; ++i) t.columns.push_back("x" + std::to_string(i));
  for (Eigen::Index i = 0; i < n; ++i) t.columns.push_back("v" + std::to_string(i));
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const auto& s = curve.samples[k];
    std::vector<double> row{curve.params[k], static_cast<double>(s.chart)};
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(s.point[i]);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(s.velocity[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// classify-demo -------------------------------------------------------------------

void task_classify(Ctx& c) {
  const auto& ex = c.ex;
  c.metric("leaf_dimension", ex.fol.p);
  c.metric("codimension", ex.fol.q);
  const auto samples = static_cast<std::size_t>(c.sc.get("samples", 10000));
  const auto polylines = static_cast<std::size_t>(c.sc.get("polylines", 100));
  if (ex.gt && ex.g && ex.orient) {
    auto h = hierarchy_suite(ex.fol, *ex.gt, *ex.g, *ex.orient, samples, c.sc.seed + 1);
    auto w = wedge_suite(ex.fol, *ex.gt, *ex.orient, samples, c.sc.seed + 2);
    auto o = orthogonality_suite(ex.fol, *ex.gt, *ex.orient, samples, c.sc.seed + 3);
    auto l = length_suite(ex.fol, *ex.gt, *ex.g, *ex.orient, polylines, c.sc.seed + 4);
    c.metric("hierarchy_checks", static_cast<double>(h.checks));
    c.metric("hierarchy_failures", static_cast<double>(h.failures));
    c.metric("wedge_checks", static_cast<double>(w.checks));
    c.metric("wedge_failures", static_cast<double>(w.failures));
    c.metric("orthogonality_checks", static_cast<double>(o.checks));
    c.metric("orthogonality_failures", static_cast<double>(o.failures));
    c.metric("length_checks", static_cast<double>(l.inequality.checks + l.equality.checks));
    c.metric("length_failures", static_cast<double>(l.inequality.failures + l.equality.failures));
    c.metric("max_horizontal_gap", l.max_horizontal_gap);
    c.metric("min_vertical_gap", l.min_vertical_gap);
    for (const auto* f : {&h, &w, &o, &l.inequality, &l.equality})
      if (f->failures) c.rep.results.child("first_failures").set("case", f->first_failure);
  }
  if (ex.suspension) c.metric("orientable", check_transverse_time_orientability(*ex.suspension, c.sc.seed) ? 1 : 0);
  if (ex.reversed_suspension)
    c.metric("reversed_orientable", check_transverse_time_orientability(*ex.reversed_suspension, c.sc.seed) ? 1 : 0);

  // leaf through the origin of a codimension-one lattice chart: its returns to u
  const auto& chart = ex.fol.base.chart(0);
  if (ex.fol.q == 1 && chart.lattice) {
    const auto n = static_cast<std::size_t>(c.sc.get("orbit_points", 1000));
    std::vector<double> us;
    Table t{"orbit", {"k", "u"}, {}};
    for (std::size_t k = 0; k < n; ++k) {
      Vec x = Vec::Zero(ex.fol.dim());
      x[0] = static_cast<double>(k);
      double u = ex.fol.transverse(0, x)[0];
      us.push_back(u);
      t.rows.push_back({static_cast<double>(k), u});
    }
    std::sort(us.begin(), us.end());
    const double period = chart.box[ex.fol.p].period();
    double gap = us.front() + period - us.back();
    for (std::size_t i = 1; i < us.size(); ++i) gap = std::max(gap, us[i] - us[i - 1]);
    c.metric("orbit_points", static_cast<double>(n));
    c.metric("dense_orbit_gap", gap);
    c.rep.tables.push_back(std::move(t));
  }
}

// ricci-scan ----------------------------------------------------------------------

struct Grid {
  std::vector<Vec> points;
};

const std::vector<Interval>& sampling_box(const Chart& ch) { return ch.sample_box.empty() ? ch.box : ch.sample_box; }

// time_points values of the time axis (cell midpoints of [lo, hi]) times
// spatial_points random completions.
Grid time_grid(const ChartAtlas& atlas, int time_axis, double lo, double hi, std::size_t nt, std::size_t ns,
               std::uint64_t seed) {
  Grid g;
  Rng rng(seed);
  for (std::size_t i = 0; i < nt; ++i) {
    double t = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(nt);
    for (std::size_t j = 0; j < ns; ++j) {
      Vec x;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        x = sample_point(atlas, 0, rng);
        x[time_axis] = t;
        if (atlas.contains(0, x)) break;
      }
      g.points.push_back(x);
    }
  }
  return g;
}

void task_ricci(Ctx& c) {
  const auto& ex = c.ex;
  const auto& gt = need_gt(c);
  const auto& orient = need_orient(c);
  if (ex.time_axis < 0) unsupported(c, "time axis");
  const auto nt = static_cast<std::size_t>(c.sc.get("time_points", 20));
  const auto ns = static_cast<std::size_t>(c.sc.get("spatial_points", 20));
  const int dirs = static_cast<int>(c.sc.get("directions", 16));
  const double chi = c.sc.get("chi_max", 3.0);
  const double C = c.sc.get("C", ex.ricci_bound.value_or(0.0));
  const int p = ex.fol.p, q = ex.fol.q, n = ex.fol.dim();
  const auto& box = sampling_box(ex.fol.base.chart(0));
  const auto& taxis = box[ex.time_axis];
  c.rep.results.set("grid", std::to_string(nt) + " x " + std::to_string(ns) + " x " + std::to_string(dirs));
  c.rep.results.set("chi_max", chi);

  Grid grid = time_grid(ex.fol.base, ex.time_axis, taxis.lo, taxis.hi, nt, ns, c.sc.seed);
  ScanConfig cfg{grid.points, dirs, chi, c.sc.seed};
  auto argmin_section = [&](const std::string& name, const RicciBoundReport& r) {
    auto& s = c.rep.results.child(name);
    s.set("min", r.min_value);
    s.set("C", r.C);
    s.set("factor", r.factor);
    s.set("margin", r.margin());
    s.set("points", static_cast<double>(r.point_count));
    s.set("directions", static_cast<double>(r.direction_count));
    std::ostringstream os;
    os.precision(12);
    os << r.argmin_point.transpose();
    s.set("argmin_point", os.str());
    std::ostringstream od;
    od.precision(12);
    od << r.argmin_direction.transpose();
    s.set("argmin_direction", od.str());
  };

  // transverse Ricci on unit timelike vectors of the quotient metric
  {
    ScanConfig tc = cfg;
    for (auto& x : tc.points) x = Vec(x.tail(q));
    auto r = scan_transverse_ricci_bound(ex.fol, gt, orient, 0, C, c.sc.get("factor", q - 1), tc);
    argmin_section("transverse_scan", r);
    c.metric("ricci_transverse_min", r.min_value);
    c.metric("ricci_bound_margin", r.margin());
  }
  if (ex.g) {
    const auto& g = *ex.g;
    auto r = scan_ricci_bound(g, 0, orient.field[0], C, n - 1, cfg);
    argmin_section("full_scan", r);
    c.metric("ricci_g_min", r.min_value);
    RicciForm neg_t = [&](const Vec& x, const Vec& v) { return -transverse_ricci(ex.fol, gt, 0, x, v, v); };
    auto rt = scan_ricci_bound(g, 0, orient.field[0], neg_t, 0.0, 1.0, cfg);
    c.metric("ricci_transverse_max_g_unit", -rt.min_value);
  }
  if (ex.base_einstein) {
    const auto samples = static_cast<std::size_t>(c.sc.get("samples", 1000));
    ChartAtlas quotient = quotient_atlas(ex.fol, gt);
    Rng rng(c.sc.seed + 11);
    std::normal_distribution<double> N;
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      Vec y = sample_point(quotient, 0, rng);
      Vec v(q);
      for (int i = 0; i < q; ++i) v[i] = N(rng);
      Mat R = ricci(quotient, 0, y);
      Mat G = eval_metric(quotient, 0, y);
      double gv = v.dot(G * v);
      worst = std::max(worst, std::abs(v.dot(R * v) - *ex.base_einstein * gv) / std::max(1.0, std::abs(gv)));
    }
    c.metric("base_identity_samples", static_cast<double>(samples));
    c.metric("base_identity_error", worst);
  }
  if (ex.warped && ex.g) {
    const auto& g = *ex.g;
    const auto samples = static_cast<std::size_t>(c.sc.get("oracle_samples", 100));
    Rng rng(c.sc.seed + 12);
    double worst = 0.0;
    Table t{"oracle", {"sample", "numeric", "closed_form"}, {}};
    for (std::size_t k = 0; k < samples; ++k) {
      Vec x = sample_point(g, 0, rng);
      Mat G = eval_metric(g, 0, x);
      Vec T = unit_timelike_directions(G, orient.field[0](x), 1, chi, c.sc.seed + 1000 + k)[0];
      double num = T.dot(ricci(g, 0, x) * T);
      double cf = warped_ricci_closed_form(ex.warped(x), Vec(T.head(p)), Vec(T.tail(q)));
      worst = std::max(worst, std::abs(num - cf) / std::max(1.0, std::abs(cf)));
      t.rows.push_back({static_cast<double>(k), num, cf});
    }
    c.metric("closed_form_samples", static_cast<double>(samples));
    c.metric("closed_form_rel_error", worst);
    c.rep.tables.push_back(std::move(t));
  }
  if (ex.negative_ricci_window && ex.g) {
    const auto& w = *ex.negative_ricci_window;
    Grid wg = time_grid(ex.fol.base, ex.time_axis, w.lo, w.hi, nt, ns, c.sc.seed + 13);
    ScanConfig wc{wg.points, dirs, chi, c.sc.seed + 13};
    auto r = scan_ricci_bound(*ex.g, 0, orient.field[0], 0.0, 1.0, wc);
    argmin_section("negative_search", r);
    c.metric("ricci_g_negative_min", r.min_value);
    c.metric("ricci_g_negative_t", r.argmin_point[ex.time_axis]);
    c.metric("ricci_g_negative_found", r.min_value < 0 ? 1 : 0);
  }
}

// diameter-shoot ------------------------------------------------------------------

void task_shoot(Ctx& c) {
  const auto& ex = c.ex;
  if (ex.shoot_starts.empty()) unsupported(c, "shooting starts");
  ShootConfig cfg;
  cfg.seed = c.sc.seed;
  cfg.max_param = c.sc.get("max_param", cfg.max_param);
  cfg.integrator.step = c.sc.get("step", cfg.integrator.step);
  auto est = shoot_diameter(ex.fol, need_gt(c), need_g(c), need_orient(c), ex.shoot_starts, cfg);
  c.metric("value", est.value);
  c.metric("open_domain", est.open_domain ? 1 : 0);
  double wl = transverse_length(ex.fol, *ex.gt, est.witness).value;
  c.metric("witness_length", wl);
  c.metric("witness_error", std::abs(wl - est.value));
  const double C = c.sc.get("C", ex.ricci_bound.value_or(0.0));
  if (C > 0) {
    c.metric("bound", kPi / std::sqrt(C));
    c.metric("within_bound", est.value <= kPi / std::sqrt(C) + 1e-3 ? 1 : 0);
  }
  auto& p = c.rep.results.child("parameters");
  for (const auto& [k, v] : est.parameters) p.set(k, v);
  c.rep.tables.push_back(curve_table("witness", est.witness));
}

// diameter-graph ------------------------------------------------------------------

std::vector<double> resolutions(const Ctx& c) {
  if (!c.sc.resolutions.empty()) return c.sc.resolutions;
  if (c.sc.has("resolution")) return {c.sc.get("resolution", 0)};
  if (c.sc.task == "diameter-graph" && !c.ex.graph_resolutions.empty()) return c.ex.graph_resolutions;
  return {c.ex.graph_resolution};
}

std::string res_key(const std::string& key, double r) { return key + "_r" + format_number(r); }

void task_graph_diameter(Ctx& c) {
  const auto& ex = c.ex;
  if (!ex.graph) unsupported(c, "graph domain");
  const double margin = c.sc.get("margin", 0.05);
  const auto rs = resolutions(c);
  bool infinite = false, monotone = true;
  double prev = -1.0, value = 0.0;
  DiameterEstimate last;
  for (double r : rs) {
    CausalGraph G = build_graph(ex.fol, need_gt(c), need_orient(c), *ex.graph, r, 0.0);
    auto& s = c.rep.results.child("resolution " + format_number(r));
    s.set("nodes", static_cast<double>(G.node_count()));
    s.set("edges", static_cast<double>(G.edge_count()));
    if (auto cyc = find_closed_transverse_timelike(G, margin)) {
      infinite = true;
      s.set("cycle_length", static_cast<double>(cyc->size()));
      s.set("value", "inf");
      continue;
    }
    auto est = longest_path_diameter(G, margin);
    c.metric(res_key("value", r), est.value);
    s.set("path_nodes", static_cast<double>(est.witness_nodes.size()));
    if (est.value < prev) monotone = false;
    prev = value = est.value;
    last = std::move(est);
  }
  c.metric("infinite", infinite ? 1 : 0);
  if (infinite) return;
  c.metric("value", value);
  c.metric("monotone", monotone ? 1 : 0);
  double wl = transverse_length(ex.fol, *ex.gt, last.witness).value;
  c.metric("witness_length", wl);
  c.metric("witness_error", std::abs(wl - value));
  c.rep.tables.push_back(curve_table("witness", last.witness));
}

// focal-scan ----------------------------------------------------------------------

void task_focal(Ctx& c) {
  const auto& ex = c.ex;
  if (!ex.focal) unsupported(c, "focal defaults");
  const auto& f = *ex.focal;
  const double max_param = c.sc.get("max_param", f.max_param);
  auto r = focal_scan(ex.fol, need_gt(c), need_g(c), f.chart, f.leaf_point, f.direction, max_param);
  c.metric("has_focal_point", r.first_zero_param ? 1 : 0);
  if (r.first_zero_param) c.metric("first_zero", *r.first_zero_param);
  c.metric("domain_end", r.domain_end ? 1 : 0);
  c.metric("end_param", r.end_param);
  c.metric("samples", static_cast<double>(r.samples.size()));
  Table t{"riccati", {"s", "riccati", "det", "jacobi"}, {}};
  for (const auto& s : r.samples) t.rows.push_back({s.s, s.riccati, s.det, s.scalar_jacobi});
  c.rep.tables.push_back(std::move(t));
  if (!f.jacobi_curvature || r.samples.empty()) return;
  const double k = *f.jacobi_curvature;
  const int m = ex.fol.q - 1;
  if (k == 0.0) {
    double e = 0.0;
    for (const auto& s : r.samples) e = std::max(e, std::abs(s.scalar_jacobi - s.s));
    Mat lin = r.end_param * Mat::Identity(r.final_a.rows(), r.final_a.cols());
    e = std::max(e, (r.final_a - lin).cwiseAbs().maxCoeff());
    c.metric("linear_error", e);
  } else if (k < 0) {
    const double w = std::sqrt(-k);
    double e = 0.0;
    for (const auto& s : r.samples) e = std::max(e, std::abs(s.scalar_jacobi - std::sinh(w * s.s) / w));
    c.metric("sinh_error", e);
  } else {
    const double w = std::sqrt(k);
    double eu = 0.0, ej = 0.0;
    for (const auto& s : r.samples) {
      eu = std::max(eu, std::abs(s.riccati - m * w / std::tan(w * s.s)));
      ej = std::max(ej, std::abs(s.scalar_jacobi - std::sin(w * s.s) / w));
    }
    c.metric("riccati_cot_error", eu);
    c.metric("sin_error", ej);
    c.metric("end_abs_riccati", std::abs(r.samples.back().riccati));
  }
}

// ladder-probe --------------------------------------------------------------------

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

void task_ladder(Ctx& c) {
  const auto& ex = c.ex;
  if (!ex.graph) unsupported(c, "graph domain");
  const double r = resolutions(c).front();
  CausalGraph G = build_graph(ex.fol, need_gt(c), need_orient(c), *ex.graph, r, 0.0);
  LadderConfig cfg;
  cfg.seed = c.sc.seed;
  cfg.strict_margin = c.sc.get("strict_margin", c.sc.get("margin", cfg.strict_margin));
  cfg.pushup_samples = cfg.openness_samples = static_cast<std::size_t>(c.sc.get("samples", 1000));
  cfg.leaf_samples = static_cast<std::size_t>(c.sc.get("leaf_samples", cfg.leaf_samples));
  cfg.openness_delta = c.sc.get("delta", cfg.openness_delta);
  cfg.openness_separation = static_cast<int>(c.sc.get("separation", cfg.openness_separation));
  auto lp = ladder_probe(G, ex.id, cfg);
  c.rep.results.set("resolution", r);
  c.rep.results.set("nodes", static_cast<double>(G.node_count()));
  c.rep.results.set("edges", static_cast<double>(G.edge_count()));
  c.metric("probes", static_cast<double>(lp.probes));
  c.metric("cycle", lp.closed_cycle ? 1 : 0);
  if (lp.closed_cycle) {
    c.metric("cycle_length", static_cast<double>(lp.closed_cycle->size()));
    c.metric("cycle_replays", lp.cycle_replays ? 1 : 0);
    auto& w = c.rep.results.child("cycle_witness");
    w.set("nodes", join(*lp.closed_cycle));
    Table t{"cycle", {"node", "chart"}, {}};
    const auto n = G.nodes.front().point.size();
    for (Eigen::Index i = 0; i < n; ++i) t.columns.push_back("x" + std::to_string(i));
    for (auto v : *lp.closed_cycle) {
      std::vector<double> row{static_cast<double>(v), static_cast<double>(ex.graph->chart)};
      for (Eigen::Index i = 0; i < n; ++i) row.push_back(G.nodes[v].point[i]);
      t.rows.push_back(std::move(row));
    }
    c.rep.tables.push_back(std::move(t));
  }
  std::size_t without = 0;
  double min_frac = 1.0;
  auto& sr = c.rep.results.child("self_reach");
  for (std::size_t i = 0; i < lp.self_reach.size(); ++i) {
    const auto& l = lp.self_reach[i];
    if (l.fraction == 0.0) ++without;
    min_frac = std::min(min_frac, l.fraction);
    sr.set("leaf " + std::to_string(i), format_number(l.fraction) + " of " + std::to_string(l.nodes));
  }
  c.metric("leaves_sampled", static_cast<double>(lp.self_reach.size()));
  c.metric("leaves_without_self_reach", static_cast<double>(without));
  c.metric("min_self_reach_fraction", lp.self_reach.empty() ? 0.0 : min_frac);
  c.metric("pushup_triples", static_cast<double>(lp.pushup.triples));
  c.metric("pushup_skipped", static_cast<double>(lp.pushup.skipped));
  c.metric("pushup_violations", static_cast<double>(lp.pushup.violations));
  c.metric("openness_pairs", static_cast<double>(lp.openness.pairs));
  c.metric("openness_violations", static_cast<double>(lp.openness.violations));
}

// reach ---------------------------------------------------------------------------

std::vector<std::size_t> seed_leaf(const CausalGraph& G, const Vec& param, const std::string& id) {
  auto n = G.find_node(param);
  if (!n) throw Error(ErrorCode::ResolutionTooCoarse, id + ": seed point is not a graph node");
  return G.leaf_nodes(G.nodes[*n].label);
}

void task_reach(Ctx& c) {
  const auto& ex = c.ex;
  if (!ex.graph || ex.seed_params.empty()) unsupported(c, "graph domain with seed leaves");
  const double margin = c.sc.get("margin", 0.05);
  const auto rs = resolutions(c);
  std::map<std::string, std::vector<double>> per_key;
  for (double r : rs) {
    CausalGraph G = build_graph(ex.fol, need_gt(c), need_orient(c), *ex.graph, r, margin);
    auto seeds = seed_leaf(G, ex.seed_params.front(), ex.id);
    ReachSet fut = reach(G, seeds, Direction::Future, true);
    auto& s = c.rep.results.child("resolution " + format_number(r));
    s.set("nodes", static_cast<double>(G.node_count()));
    s.set("edges", static_cast<double>(G.edge_count()));
    s.set("seed_nodes", static_cast<double>(seeds.size()));
    s.set("saturated_future_nodes", static_cast<double>(fut.nodes.size()));
    std::optional<CausalGraph> Gf;
    std::optional<ReachSet> gfut;
    for (const auto& probe : ex.reach_probes) {
      const CausalGraph* graph = &G;
      const ReachSet* set = &fut;
      if (probe.mode == ReachMode::GFutureSaturation) {
        if (!Gf) {
          Gf = build_graph(ex.fol, need_gt(c), need_orient(c), *ex.graph, r, margin, ConeSource::Full, &need_g(c));
          auto fs = seed_leaf(*Gf, ex.seed_params.front(), ex.id);
          gfut = saturation(*Gf, reach(*Gf, fs, Direction::Future, false));
          s.set("g_future_saturation_nodes", static_cast<double>(gfut->nodes.size()));
        }
        graph = &*Gf;
        set = &*gfut;
      }
      double hits = 0;
      for (const auto& pp : probe.params) {
        auto node = graph->find_node(pp);
        if (!node) {
          hits = std::nan("");
          break;
        }
        if (set->contains(*node)) hits += 1;
      }
      s.set(probe.key, hits);
      per_key[probe.key].push_back(hits);
      c.rep.metrics[res_key(probe.key, r)] = hits;
    }
  }
  for (const auto& [key, vals] : per_key) {
    bool same = std::all_of(vals.begin(), vals.end(), [&](double v) { return v == vals.front(); });
    c.metric(key, same ? vals.front() : std::nan(""));
  }
}

}  // namespace

Report run(const Scenario& sc) {
  Report rep;
  rep.scenario = sc;
  try {
    const ExampleSpec& ex = get_example(sc.example, sc.example_params);
    rep.description = ex.description;
    rep.params = ex.params;
    if (sc.has("resolution") || !sc.resolutions.empty())
      if (!ex.graph && sc.task != "diameter-graph" && sc.task != "ladder-probe" && sc.task != "reach")
        throw Error(ErrorCode::UnknownKey, "resolution is not used by task " + sc.task);
    Ctx c{sc, ex, rep};
    if (sc.task == "classify-demo") task_classify(c);
    else if (sc.task == "ricci-scan") task_ricci(c);
    else if (sc.task == "diameter-shoot") task_shoot(c);
    else if (sc.task == "diameter-graph") task_graph_diameter(c);
    else if (sc.task == "focal-scan") task_focal(c);
    else if (sc.task == "ladder-probe") task_ladder(c);
    else if (sc.task == "reach") task_reach(c);
    else throw Error(ErrorCode::ParseError, "unknown task '" + sc.task + "'");

    for (const auto& claim : ex.expected) {
      if (claim.task != sc.task) continue;
      ClaimOutcome o{claim, std::nullopt, false};
      if (auto it = rep.metrics.find(claim.key); it != rep.metrics.end()) {
        o.value = it->second;
        o.passed = claim.check(it->second);
      }
      rep.claims.push_back(std::move(o));
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw Error(e.code(), sc.example + "/" + sc.task + ": " + msg);
  }
  return rep;
}

}  // namespace leafcausal

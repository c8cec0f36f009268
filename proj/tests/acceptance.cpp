// Acceptance run: one PASS/FAIL line per criterion. Optional arguments pick
// criterion numbers; the exit status is nonzero when any selected one fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "leafcausal/catalog.hpp"
#include "leafcausal/curvature.hpp"
#include "leafcausal/foliation.hpp"
#include "leafcausal/scenario.hpp"

using namespace leafcausal;

namespace {

const std::filesystem::path kScenarioDir = LEAFCAUSAL_SCENARIO_DIR;

std::map<std::string, Report> g_runs;

const Report& scenario_run(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  return g_runs.emplace(name, run(load_scenario(kScenarioDir / (name + ".txt")))).first->second;
}

double metric(const std::string& scenario, const std::string& key) {
  const auto& m = scenario_run(scenario).metrics;
  auto it = m.find(key);
  if (it == m.end()) throw std::runtime_error(scenario + " did not report " + key);
  return it->second;
}

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what, double value) {
    if (!cond) ok = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << " = " << format_number(value) << (cond ? "" : " (!)");
  }
};

// --- 1 -----------------------------------------------------------------------------

void de_sitter_identity(Outcome& o) {
  const auto& ex = get_example("desitter_warp");
  ChartAtlas base = quotient_atlas(ex.fol, *ex.gt);
  Rng rng(1);
  std::normal_distribution<double> N;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vec x = sample_point(base, 0, rng);
    Vec v(4);
    for (int i = 0; i < 4; ++i) v[i] = N(rng);
    Mat R = ricci(base, 0, x);
    double gv = v.dot(eval_metric(base, 0, x) * v);
    worst = std::max(worst, std::abs(v.dot(R * v) - 3.0 * gv) / std::max(1.0, std::abs(gv)));
  }
  o.check(worst <= 1e-6, "max rel |Ric(v,v) - 3 g(v,v)|", worst);
}

// --- 2, 3, 4 ------------------------------------------------------------------------

void example_one_bounds(Outcome& o) {
  o.check(metric("desitter_ricci", "ricci_g_min") >= 1 - 1e-4, "min Ric_g(T,T)",
          metric("desitter_ricci", "ricci_g_min"));
  o.check(metric("desitter_ricci", "ricci_transverse_max_g_unit") <= -3 + 1e-4, "max Ric_T(T,T)",
          metric("desitter_ricci", "ricci_transverse_max_g_unit"));
}

void example_two_bounds(Outcome& o) {
  const double e = std::numbers::e;
  double tmin = metric("logt_ricci", "ricci_transverse_min");
  o.check(tmin >= 2 / (e * e) - 1e-6, "min Ric_T(E,E) [want >= 2/e^2]", tmin);
  o.check(metric("logt_ricci", "ricci_g_negative_found") == 1 && metric("logt_ricci", "ricci_g_negative_min") < 0,
          "Ric_g(E,E) < 0 witness", metric("logt_ricci", "ricci_g_negative_min"));
  o.check(metric("logt_ricci", "ricci_g_negative_t") > 2.5, "witness t", metric("logt_ricci", "ricci_g_negative_t"));
}

void closed_form_agreement(Outcome& o) {
  for (const char* s : {"desitter_ricci", "logt_ricci"}) {
    o.check(metric(s, "closed_form_samples") >= 100, std::string(s) + " samples", metric(s, "closed_form_samples"));
    o.check(metric(s, "closed_form_rel_error") <= 1e-5, std::string(s) + " rel error",
            metric(s, "closed_form_rel_error"));
  }
}

// --- 5, 6 ---------------------------------------------------------------------------

void diameter_sharpness(Outcome& o) {
  const double pi = std::numbers::pi;
  double shoot = metric("cos_shoot", "value");
  o.check(shoot >= 0.99 * (pi - 0.1) && shoot <= pi + 1e-3, "shoot", shoot);
  double r10 = metric("cos_graph", "value_r10"), r20 = metric("cos_graph", "value_r20"),
         r40 = metric("cos_graph", "value_r40");
  o.check(r40 >= 2.85 && r40 <= pi - 0.1 + 1e-6, "graph r40", r40);
  o.check(r10 <= r20, "graph r20 - r10", r20 - r10);
  o.check(r20 <= r40, "graph r40 - r20", r40 - r20);
}

void focal_machinery(Outcome& o) {
  o.check(metric("cos_focal", "riccati_cot_error") <= 1e-4, "cos |u - cot s|", metric("cos_focal", "riccati_cot_error"));
  o.check(metric("cos_focal", "end_abs_riccati") > 40, "cos |u| at end", metric("cos_focal", "end_abs_riccati"));
  o.check(metric("cos_focal", "has_focal_point") == 0, "cos focal inside", metric("cos_focal", "has_focal_point"));
  o.check(metric("desitter_focal", "sinh_error") <= 1e-6, "de Sitter |J - sinh|",
          metric("desitter_focal", "sinh_error"));
  o.check(metric("mink3_focal", "linear_error") <= 1e-12, "Minkowski |A - sI|", metric("mink3_focal", "linear_error"));
}

// --- 7, 8 ---------------------------------------------------------------------------

void waterfall_exactness(Outcome& o) {
  const auto& ex = get_example("cos_warp");
  const auto& fol = ex.fol;
  Rng rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0, end_gap = 0.0, start_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double phi0 = 6 * U(rng), t0 = -1.3 + 1.4 * U(rng), th0 = -2 + 4 * U(rng);
    const double b = 1.8 * U(rng) - 0.9, w = 0.5 + 3 * U(rng), c = 4 * U(rng) - 2;
    CurveSamples alpha;
    for (int i = 0; i <= 40; ++i) {
      double s = i / 40.0;
      alpha.params.push_back(s);
      Vec x(3), v(3);
      x << phi0 + c * std::sin(2 * s), t0 + s, th0 + b * std::sin(w * s) / w;
      v << 2 * c * std::cos(2 * s), 1.0, b * std::cos(w * s);
      alpha.samples.push_back({0, x, v, std::nullopt});
    }
    Vec z = alpha.samples.front().point;
    z[0] = 6 * U(rng);
    CurveSamples beta = waterfall(fol, *ex.gt, *ex.orient, alpha, z);
    start_gap = std::max(start_gap, (beta.samples.front().point - z).cwiseAbs().maxCoeff());
    end_gap = std::max(end_gap, (beta.samples.back().point - alpha.samples.back().point).cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const auto &a = alpha.samples[i], &bs = beta.samples[i];
      double qa = transverse_form(fol, *ex.gt, 0, a.point, a.velocity, a.velocity);
      double qb = transverse_form(fol, *ex.gt, 0, bs.point, bs.velocity, bs.velocity);
      worst = std::max(worst, std::abs(qa - qb));
    }
  }
  o.check(worst <= 1e-14, "max |gT(b',b') - gT(a',a')|", worst);
  o.check(start_gap == 0.0, "start offset", start_gap);
  o.check(end_gap == 0.0, "end offset", end_gap);
}

void lifting_round_trip(Outcome& o) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas quotient = quotient_atlas(ex.fol, *ex.gt);
  Rng rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double proj = 0.0, len = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double t0 = -1.3 + 1.4 * U(rng), th0 = -2 + 4 * U(rng);
    const double b = 1.8 * U(rng) - 0.9, w = 0.5 + 3 * U(rng);
    CurveSamples base;
    for (int i = 0; i <= 64; ++i) {
      double s = i / 64.0;
      base.params.push_back(s);
      Vec x(2), v(2);
      x << t0 + s, th0 + b * std::sin(w * s) / w;
      v << 1.0, b * std::cos(w * s);
      base.samples.push_back({0, x, v, std::nullopt});
    }
    Vec start(3);
    start << 6 * U(rng), t0, th0;
    CurveSamples lifted = lift_curve(ex.fol, base, start);
    for (std::size_t i = 0; i < base.size(); ++i)
      proj = std::max(proj, quotient.displacement(0, base.samples[i].point, lifted.samples[i].point.tail(2))
                                .cwiseAbs()
                                .maxCoeff());
    len = std::max(len, std::abs(transverse_length(ex.fol, *ex.gt, lifted).value -
                                 lorentz_length(quotient, base).value));
  }
  o.check(proj <= 1e-12, "projection error", proj);
  o.check(len <= 1e-9, "length error", len);
}

// --- 9, 10, 11, 12 --------------------------------------------------------------------

void counterexample_reach(Outcome& o) {
  for (const char* r : {"20", "40"}) {
    std::string s(r);
    o.check(metric("deleted_segment_reach", "L_minus_hits_r" + s) == 3, "L- hits at r" + s,
            metric("deleted_segment_reach", "L_minus_hits_r" + s));
    o.check(metric("deleted_segment_reach", "L_plus_hits_r" + s) == 0, "L+ hits at r" + s,
            metric("deleted_segment_reach", "L_plus_hits_r" + s));
  }
  o.check(metric("deleted_box_reach", "probe_in_transverse_future") == 1, "box probe in saturated future",
          metric("deleted_box_reach", "probe_in_transverse_future"));
  o.check(metric("deleted_box_reach", "probe_in_g_future_saturation") == 0, "box probe in saturated g-future",
          metric("deleted_box_reach", "probe_in_g_future_saturation"));
}

void ladder_probes(Outcome& o) {
  o.check(metric("torus3_ladder", "cycle") == 1, "torus3 cycle", metric("torus3_ladder", "cycle"));
  o.check(metric("torus3_ladder", "cycle_replays") == 1, "torus3 replay", metric("torus3_ladder", "cycle_replays"));
  o.check(metric("helix_ladder", "leaves_sampled") > 0 && metric("helix_ladder", "leaves_without_self_reach") == 0,
          "helix leaves without self-reach", metric("helix_ladder", "leaves_without_self_reach"));
  o.check(metric("mink3_ladder", "cycle") == 0, "Minkowski cycle", metric("mink3_ladder", "cycle"));
  o.check(metric("mink3_ladder", "leaves_without_self_reach") == metric("mink3_ladder", "leaves_sampled"),
          "Minkowski self-reaching leaves",
          metric("mink3_ladder", "leaves_sampled") - metric("mink3_ladder", "leaves_without_self_reach"));
  double probes = metric("mink3_ladder", "pushup_triples") + metric("mink3_ladder", "pushup_skipped");
  o.check(probes >= 1000 && metric("mink3_ladder", "pushup_violations") == 0, "push-up violations",
          metric("mink3_ladder", "pushup_violations"));
  o.check(metric("mink3_ladder", "openness_pairs") >= 1000 && metric("mink3_ladder", "openness_violations") == 0,
          "openness violations", metric("mink3_ladder", "openness_violations"));
}

void property_suites(Outcome& o) {
  std::size_t entries = 0;
  for (const auto& id : list_examples()) {
    const auto& ex = get_example(id);
    if (!ex.gt || !ex.g || !ex.orient) continue;
    Report rep = run(parse_scenario("example = " + id + "\ntask = classify-demo\nseed = 0\n"));
    auto m = [&](const char* k) { return rep.metrics.at(k); };
    bool ok = m("hierarchy_checks") >= 1e4 && m("wedge_checks") >= 1e4 && m("length_checks") >= 200 &&
              m("hierarchy_failures") == 0 && m("wedge_failures") == 0 && m("length_failures") == 0;
    if (!ok) o.check(false, id + " failures",
                     m("hierarchy_failures") + m("wedge_failures") + m("length_failures"));
    ++entries;
  }
  o.check(entries >= 8, "entries checked", static_cast<double>(entries));
}

void orientability(Outcome& o) {
  const auto& ex = get_example("misner_suspension");
  bool fwd = check_transverse_time_orientability(*ex.suspension);
  bool rev = check_transverse_time_orientability(*ex.reversed_suspension);
  o.check(fwd, "Misner", fwd);
  o.check(!rev, "time-reversing", rev);
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "de Sitter identity", 10, de_sitter_identity},
      {2, "warped de Sitter Ricci bounds", 60, example_one_bounds},
      {3, "log-warp Ricci bounds", 30, example_two_bounds},
      {4, "closed-form Ricci agreement", 30, closed_form_agreement},
      {5, "diameter sharpness", 120, diameter_sharpness},
      {6, "focal machinery", 10, focal_machinery},
      {7, "waterfall exactness", 5, waterfall_exactness},
      {8, "lifting round trip", 5, lifting_round_trip},
      {9, "counterexample reachability", 60, counterexample_reach},
      {10, "ladder probes", 60, ladder_probes},
      {11, "property suites", 60, property_suites},
      {12, "orientability decisions", 1, orientability},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << (o.detail.tellp() > 0 ? "; " : "") << "error: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.limit_s;
    bool pass = o.ok && in_time;
    failed += !pass;
    std::printf("criterion %2d %-32s %s  %s [%.2f s of %.0f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.str().c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

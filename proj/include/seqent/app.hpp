#pragma once

// Command implementations behind the CLI. Each returns its full output text so
// runs can be compared byte for byte.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqent/config.hpp"
#include "seqent/cover.hpp"
#include "seqent/errors.hpp"
#include "seqent/partition.hpp"
#include "seqent/search.hpp"

namespace seqent {

namespace exit_code {
constexpr int ok = 0;
constexpr int config_error = 1;
constexpr int truncated = 2;
constexpr int mismatch = 3;
}  // namespace exit_code

struct CommandResult {
  int code = exit_code::ok;
  std::string out;      // CSV or JSON
  std::string summary;  // one line for stderr
};

inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

inline double unit_scale(Unit u) { return u == Unit::bits ? 1.0 / std::log(2.0) : 1.0; }
inline const char* unit_name(Unit u) { return u == Unit::bits ? "bits" : "nats"; }

namespace app_detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("config is missing ") + what);
}

inline json element_json(const GroupElement& g) { return g.coords(); }

inline json elements_json(const FiniteGroupSet& s) {
  json a = json::array();
  for (const auto& g : s) a.push_back(element_json(g));
  return a;
}

inline json reals_json(const std::vector<double>& v, double scale = 1.0) {
  json a = json::array();
  for (double x : v) a.push_back(round12(x * scale));
  return a;
}

inline json open_set_json(const OpenSet& s) {
  if (const auto* cu = std::get_if<CylinderUnion>(&s)) {
    json c = json::array();
    for (const auto& p : cu->cylinders) c.push_back({{"domain", elements_json(p.domain)}, {"letters", p.letters}});
    return {{"cylinders", c}};
  }
  json a = json::array();
  for (const auto& arc : std::get<ArcUnion>(s).arcs) a.push_back({round12(arc.start), round12(arc.length)});
  return {{"arcs", a}};
}

inline std::string profile_csv(const EntropyProfile& p, Unit unit, bool cover_columns) {
  const double k = unit_scale(unit);
  std::string out = "n,count,joint_entropy,normalized,tail_max";
  if (cover_columns) out += ",n_join,solver";
  out += "\n";
  for (const auto& r : p.rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.count) + "," + fmt12(r.joint * k) + "," +
           fmt12(r.normalized * k) + "," + fmt12(r.tail_max * k);
    if (cover_columns) out += "," + std::to_string(r.cover_number.value_or(0)) + "," + to_string(r.solver);
    out += "\n";
  }
  return out;
}

inline CommandResult profile_result(const EntropyProfile& p, Unit unit, bool cover_columns, const std::string& name) {
  CommandResult r;
  r.out = profile_csv(p, unit, cover_columns);
  if (p.truncated) {
    r.code = exit_code::truncated;
    r.summary = name + ": truncated after " + std::to_string(p.rows.size()) + " rows: " + p.truncation_reason;
  } else {
    r.summary = name + ": " + std::to_string(p.rows.size()) + " rows, tail_max " + fmt12(p.tail_max * unit_scale(unit)) +
                " " + unit_name(unit) + " (tail window: last half of rows)";
  }
  return r;
}

}  // namespace app_detail

inline CommandResult cmd_entropy_measure(const RunConfig& cfg) {
  using namespace app_detail;
  require(cfg.system.has_value(), "'system'");
  require(cfg.partition.has_value(), "'partition'");
  require(cfg.subset.has_value(), "'subset'");
  const FolnerSequence f(dim(*cfg.system));
  const auto p = seq_entropy_profile(*cfg.system, *cfg.partition, *cfg.subset, f, cfg.ns, {cfg.budget, cfg.jobs});
  return profile_result(p, cfg.unit, false, "entropy measure");
}

inline CommandResult cmd_entropy_top(const RunConfig& cfg) {
  using namespace app_detail;
  require(cfg.system.has_value(), "'system'");
  require(cfg.cover.has_value(), "'cover'");
  require(cfg.subset.has_value(), "'subset'");
  const FolnerSequence f(dim(*cfg.system));
  const auto p =
      top_seq_entropy_profile(*cfg.system, *cfg.cover, *cfg.subset, f, cfg.ns, cfg.solver, {cfg.budget, cfg.jobs});
  return profile_result(p, cfg.unit, true, "entropy top");
}

inline CommandResult cmd_density(const RunConfig& cfg) {
  using namespace app_detail;
  require(cfg.subset.has_value(), "'subset'");
  std::int64_t n_max = cfg.n_max;
  if (n_max == 0 && !cfg.ns.empty()) n_max = *std::max_element(cfg.ns.begin(), cfg.ns.end());
  require(n_max > 0, "'n_max'");
  const FolnerSequence f(cfg.subset->dim());
  const auto rep = density(*cfg.subset, f, n_max);
  CommandResult r;
  r.out = "n,count,box_size,density\n";
  for (std::size_t i = 0; i < rep.per_n.size(); ++i)
    r.out += std::to_string(i + 1) + "," + std::to_string(rep.counts[i]) + "," +
             std::to_string(f.size(static_cast<std::int64_t>(i + 1))) + "," + fmt12(rep.per_n[i]) + "\n";
  r.summary = "density: lower " + fmt12(rep.lower) + ", upper " + fmt12(rep.upper) + " over n in [" +
              std::to_string(rep.window_from) + "," + std::to_string(n_max) + "]";
  return r;
}

inline json witness_json(const IndependenceWitness& w) {
  using namespace app_detail;
  return {{"S", elements_json(w.S)},   {"length", w.depth()},       {"target", w.target},
          {"verified", w.verified},    {"complete", w.complete},    {"pool_size", w.pool_size}};
}

inline CommandResult cmd_search(const RunConfig& cfg) {
  using namespace app_detail;
  require(cfg.system.has_value(), "'system'");
  require(cfg.search.has_value(), "'search'");
  const auto& sys = *cfg.system;
  const auto& s = *cfg.search;
  json rep{{"schema_version", kSchemaVersion}, {"mode", s.mode}, {"scale", "finite-scale evidence"}};
  std::string summary;
  if (s.mode == "independence") {
    const auto w = greedy_independence(sys, s.sets, s.k, s.pool);
    rep["witness"] = witness_json(w);
    summary = "search independence: length " + std::to_string(w.depth()) + "/" + std::to_string(s.k) +
              (w.complete ? ", complete" : ", incomplete");
  } else if (s.mode == "independence_ip") {
    const auto ip = greedy_independence_ip(sys, s.sets, s.k, s.generators);
    json levels = json::array();
    for (const auto& w : ip.levels) levels.push_back(witness_json(w));
    rep["levels"] = levels;
    rep["complete"] = ip.complete;
    summary = "search independence_ip: " + std::to_string(ip.levels.size()) + " levels" +
              (ip.complete ? ", complete" : ", incomplete");
  } else if (s.mode == "entropy_sequence") {
    require(cfg.partition.has_value(), "'partition'");
    const auto seq = greedy_entropy_sequence(sys, *cfg.partition, s.k, s.pool, {cfg.budget, cfg.jobs});
    const double k = unit_scale(cfg.unit);
    rep["unit"] = unit_name(cfg.unit);
    rep["S"] = elements_json(seq.S);
    rep["gains"] = reals_json(seq.gains, k);
    rep["joint"] = reals_json(seq.joint, k);
    rep["complete"] = seq.complete;
    const double norm = seq.S.empty() ? 0.0 : seq.joint.back() / static_cast<double>(seq.S.size());
    rep["normalized"] = round12(norm * k);
    summary = "search entropy_sequence: " + std::to_string(seq.S.size()) + " steps, normalized " + fmt12(norm * k);
  } else if (s.mode == "correlation") {
    const auto rows = correlation_profile(sys, *s.a, *s.b, cfg.ns, cfg.budget);
    json jr = json::array();
    for (const auto& r : rows) jr.push_back({{"n", r.n}, {"average", round12(r.average)}});
    rep["rows"] = jr;
    summary = "search correlation: " + std::to_string(rows.size()) + " rows, last " +
              (rows.empty() ? std::string("-") : fmt12(rows.back().average));
  } else {
    require(cfg.cover.has_value(), "'cover'");
    SEOptions opt;
    opt.target = s.k;
    opt.threshold = s.threshold;
    opt.pool = s.pool;
    opt.budget = cfg.budget;
    const auto c = se_pair_localize(sys, *cfg.cover, s.depth, opt);
    json levels = json::array();
    for (const auto& l : c.levels)
      levels.push_back({{"level", l.level},
                        {"a", open_set_json(l.a)},
                        {"b", open_set_json(l.b)},
                        {"diam_a", round12(l.diam_a)},
                        {"diam_b", round12(l.diam_b)},
                        {"evidence", round12(l.evidence)},
                        {"positive", l.positive},
                        {"witness", elements_json(l.witness)},
                        {"pairs_tried", l.pairs_tried}});
    rep["levels"] = levels;
    rep["precondition_met"] = c.precondition_met;
    rep["success"] = c.success;
    rep["failed_level"] = c.failed_level ? json(*c.failed_level) : json(nullptr);
    if (c.point_a) rep["candidate"] = {open_set_json(CylinderUnion{{*c.point_a}}), open_set_json(CylinderUnion{{*c.point_b}})};
    if (c.circle_a) rep["candidate"] = {round12(*c.circle_a), round12(*c.circle_b)};
    summary = std::string("search se_pair: ") +
              (c.success ? "positive at every level to depth " + std::to_string(s.depth)
                         : "inconclusive at level " + std::to_string(*c.failed_level));
  }
  CommandResult r;
  r.out = rep.dump(2) + "\n";
  r.summary = summary;
  return r;
}

struct ReproduceOptions {
  Unit unit = Unit::nats;
  Budget budget;
  unsigned jobs = 1;
};

constexpr double kReproduceTolerance = 1e-9;

/// The two-generator example: T_1 identity, T_2 the shift on {0,1}^Z with the
/// uniform measure; four quantities along the axis ray and along full boxes.
inline CommandResult cmd_reproduce_example61(const ReproduceOptions& opt = {}) {
  using namespace app_detail;
  const System sys = SymbolicSystem::uniform({AxisAction::identity, AxisAction::shift}, 2);
  const Partition alpha = SymbolicPartition::generating(2, 2);
  const Cover cover = origin_cylinder_cover(std::get<SymbolicSystem>(sys));
  const FolnerSequence f(2);
  const auto ray = SubsetGenerator::axis_ray(2, 1);
  const auto boxes = SubsetGenerator::everything(2);
  const ProfileOptions po{opt.budget, opt.jobs};
  const double k = unit_scale(opt.unit);
  const double log2 = std::log(2.0);

  struct Block {
    const char* quantity;
    const char* subset;
    EntropyProfile profile;
    bool per_n;  // expected (log 2)/n instead of log 2
  };
  std::vector<Block> blocks;
  blocks.push_back({"measure", "axis_ray", seq_entropy_profile(sys, alpha, ray, f, n_range(1, 8), po), false});
  blocks.push_back({"topological", "axis_ray",
                    top_seq_entropy_profile(sys, cover, ray, f, n_range(1, 8), SolverMode::exact, po), false});
  blocks.push_back({"measure", "full_boxes", seq_entropy_profile(sys, alpha, boxes, f, n_range(1, 4), po), true});
  blocks.push_back({"topological", "full_boxes",
                    top_seq_entropy_profile(sys, cover, boxes, f, n_range(1, 4), SolverMode::exact, po), true});

  CommandResult r;
  r.out = "quantity,subset,n,count,normalized,expected,abs_error\n";
  double worst = 0.0;
  bool truncated = false;
  std::string reason;
  for (const auto& b : blocks) {
    if (b.profile.truncated) truncated = true, reason = b.profile.truncation_reason;
    for (const auto& row : b.profile.rows) {
      const double expected = b.per_n ? log2 / static_cast<double>(row.n) : log2;
      const double err = std::abs(row.normalized - expected);
      worst = std::max(worst, err);
      r.out += std::string(b.quantity) + "," + b.subset + "," + std::to_string(row.n) + "," + std::to_string(row.count) +
               "," + fmt12(row.normalized * k) + "," + fmt12(expected * k) + "," + fmt12(err * k) + "\n";
    }
  }
  if (truncated) {
    r.code = exit_code::truncated;
    r.summary = "reproduce example61: truncated: " + reason;
  } else if (worst > kReproduceTolerance) {
    r.code = exit_code::mismatch;
    r.summary = "reproduce example61: deviation " + fmt12(worst) + " exceeds " + fmt12(kReproduceTolerance);
  } else {
    r.summary = "reproduce example61: all rows within " + fmt12(kReproduceTolerance) + " (max deviation " +
                fmt12(worst * k) + " " + unit_name(opt.unit) + ")";
  }
  return r;
}

}  // namespace seqent

#pragma once

// JSON run configuration: system, partition or cover, subset, range, budgets,
// search parameters. All cross-references are validated on load.

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqent/cover.hpp"
#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/partition.hpp"
#include "seqent/rational.hpp"
#include "seqent/search.hpp"
#include "seqent/systems.hpp"

namespace seqent {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kBudgetEnv = "SEQENT_BUDGET";

enum class Unit { nats, bits };

inline const std::vector<std::string>& search_modes() {
  static const std::vector<std::string> modes{"independence", "independence_ip", "entropy_sequence", "correlation",
                                              "se_pair"};
  return modes;
}

struct SearchSpec {
  std::string mode;
  std::size_t k = 6;
  std::vector<OpenSet> sets;               // independence
  FiniteGroupSet pool;                     // independence, entropy_sequence, se_pair
  std::vector<GroupElement> generators;    // independence_ip
  std::optional<OpenSet> a, b;             // correlation
  std::size_t depth = 0;                   // se_pair
  double threshold = 0.1;                  // se_pair
};

struct RunConfig {
  std::optional<System> system;
  std::optional<Partition> partition;
  std::optional<Cover> cover;
  std::optional<SubsetGenerator> subset;
  std::vector<std::int64_t> ns;
  std::int64_t n_max = 0;  // density
  SolverMode solver = SolverMode::exact;
  Budget budget;
  unsigned jobs = 1;
  Unit unit = Unit::nats;
  std::optional<SearchSpec> search;
  std::string out;
};

namespace config_detail {

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type");
  }
}

inline std::string kind_of(const json& j, const std::string& where) {
  return get<std::string>(need(j, "kind", where), where + ".kind");
}

inline Rational rational(const json& j, const std::string& where) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational::make(j.get<std::int64_t>(), 1);
  throw ConfigError(where + ": expected an integer or a rational string");
}

// Numbers are taken as floating values, strings as exact rationals.
inline double real(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  return rational(j, where).value();
}

inline GroupElement element(const json& j, std::size_t d, const std::string& where) {
  auto v = get<std::vector<std::int64_t>>(j, where);
  if (v.size() != d) throw ConfigError(where + ": expected " + std::to_string(d) + " coordinates");
  return GroupElement(std::move(v));
}

inline FiniteGroupSet elements(const json& j, std::size_t d, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of coordinate lists");
  FiniteGroupSet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(element(j[i], d, where + "[" + std::to_string(i) + "]"));
  return out;
}

inline AxisAction axis(const json& j, const std::string& where) {
  const auto s = get<std::string>(j, where);
  if (s == "shift") return AxisAction::shift;
  if (s == "identity") return AxisAction::identity;
  throw ConfigError(where + ": axis must be 'shift' or 'identity'");
}

}  // namespace config_detail

inline System parse_system(const json& j) {
  using namespace config_detail;
  const auto kind = kind_of(j, "system");
  if (kind == "symbolic") {
    std::vector<AxisAction> axes;
    const auto& ja = need(j, "axes", "system");
    if (!ja.is_array()) throw ConfigError("system.axes: expected a list");
    for (const auto& a : ja) axes.push_back(axis(a, "system.axes"));
    if (j.contains("alphabet") && !j.contains("weights")) {
      const auto a = get<std::size_t>(j.at("alphabet"), "system.alphabet");
      return SymbolicSystem::uniform(std::move(axes), a);
    }
    const auto& jw = need(j, "weights", "system");
    if (!jw.is_array()) throw ConfigError("system.weights: expected a list");
    const bool exact = std::all_of(jw.begin(), jw.end(), [](const json& w) { return w.is_string() || w.is_number_integer(); });
    if (exact) {
      std::vector<Rational> w;
      for (const auto& x : jw) w.push_back(rational(x, "system.weights"));
      return SymbolicSystem(std::move(axes), w);
    }
    std::vector<double> w;
    for (const auto& x : jw) w.push_back(real(x, "system.weights"));
    return SymbolicSystem(std::move(axes), std::move(w));
  }
  if (kind == "rotation") {
    const auto& ja = need(j, "angles", "system");
    if (!ja.is_array()) throw ConfigError("system.angles: expected a list");
    const bool exact = std::all_of(ja.begin(), ja.end(), [](const json& w) { return w.is_string() || w.is_number_integer(); });
    if (exact) {
      std::vector<Rational> a;
      for (const auto& x : ja) a.push_back(rational(x, "system.angles"));
      return RotationSystem(a);
    }
    std::vector<double> a;
    for (const auto& x : ja) a.push_back(real(x, "system.angles"));
    return RotationSystem(std::move(a));
  }
  throw ConfigError("system.kind must be 'symbolic' or 'rotation'");
}

inline SubsetGenerator parse_subset(const json& j, std::size_t d) {
  using namespace config_detail;
  const auto kind = kind_of(j, "subset");
  if (kind == "explicit") return SubsetGenerator::explicit_list(elements(need(j, "elements", "subset"), d, "subset.elements"));
  if (kind == "arithmetic")
    return SubsetGenerator::arithmetic(element(need(j, "base", "subset"), d, "subset.base"),
                                       element(need(j, "step", "subset"), d, "subset.step"));
  if (kind == "axis_ray")
    return SubsetGenerator::axis_ray(d, get<std::size_t>(need(j, "axis", "subset"), "subset.axis"),
                                     j.contains("start") ? get<std::int64_t>(j.at("start"), "subset.start") : 0);
  if (kind == "polynomial")
    return SubsetGenerator::polynomial(get<std::vector<std::int64_t>>(need(j, "coeffs", "subset"), "subset.coeffs"),
                                       element(need(j, "direction", "subset"), d, "subset.direction"));
  if (kind == "ip_segment")
    return SubsetGenerator::ip_segment(elements(need(j, "generators", "subset"), d, "subset.generators"));
  if (kind == "complement")
    return SubsetGenerator::complement_of(
        d, j.contains("excluded") ? elements(j.at("excluded"), d, "subset.excluded") : FiniteGroupSet{});
  if (kind == "everything") return SubsetGenerator::everything(d);
  throw ConfigError("subset.kind must be one of explicit, arithmetic, axis_ray, polynomial, ip_segment, complement, everything");
}

inline Partition parse_partition(const json& j, const System& sys) {
  using namespace config_detail;
  const auto kind = kind_of(j, "partition");
  Partition p;
  if (kind == "generating") {
    const auto* ss = std::get_if<SymbolicSystem>(&sys);
    if (!ss) throw ConfigError("partition 'generating' needs a symbolic system");
    p = SymbolicPartition::generating(ss->dim(), ss->alphabet_size());
  } else if (kind == "window") {
    const auto* ss = std::get_if<SymbolicSystem>(&sys);
    if (!ss) throw ConfigError("partition 'window' needs a symbolic system");
    p = SymbolicPartition{elements(need(j, "window", "partition"), ss->dim(), "partition.window"),
                          get<std::vector<std::uint32_t>>(need(j, "labels", "partition"), "partition.labels")};
  } else if (kind == "halves") {
    p = ArcPartition::halves();
  } else if (kind == "arcs") {
    ArcPartition ap;
    const auto& jb = need(j, "breakpoints", "partition");
    if (!jb.is_array()) throw ConfigError("partition.breakpoints: expected a list");
    for (const auto& b : jb) ap.breakpoints.push_back(real(b, "partition.breakpoints"));
    ap.labels = get<std::vector<std::uint32_t>>(need(j, "labels", "partition"), "partition.labels");
    p = std::move(ap);
  } else if (kind == "trivial") {
    if (std::holds_alternative<SymbolicSystem>(sys)) p = SymbolicPartition::trivial();
    else p = ArcPartition::trivial();
  } else {
    throw ConfigError("partition.kind must be one of generating, window, halves, arcs, trivial");
  }
  validate_partition(sys, p);
  return p;
}

// Symbolic: {"cylinders": [{"domain": [[..],..], "letters": [..]}, ..]}; circle: {"arcs": [[start, length], ..]}.
inline OpenSet parse_open_set(const json& j, const System& sys, const std::string& where) {
  using namespace config_detail;
  OpenSet out;
  if (const auto* ss = std::get_if<SymbolicSystem>(&sys)) {
    CylinderUnion cu;
    const auto& jc = need(j, "cylinders", where);
    if (!jc.is_array()) throw ConfigError(where + ".cylinders: expected a list");
    for (const auto& c : jc)
      cu.cylinders.push_back({elements(need(c, "domain", where), ss->dim(), where + ".domain"),
                              get<std::vector<std::uint32_t>>(need(c, "letters", where), where + ".letters")});
    out = std::move(cu);
  } else {
    ArcUnion au;
    const auto& ja = need(j, "arcs", where);
    if (!ja.is_array()) throw ConfigError(where + ".arcs: expected a list");
    for (const auto& a : ja) {
      if (!a.is_array() || a.size() != 2) throw ConfigError(where + ".arcs: each arc is [start, length]");
      au.arcs.push_back({real(a[0], where), real(a[1], where)});
    }
    out = std::move(au);
  }
  validate_open_set(sys, out);
  return out;
}

inline Cover parse_cover(const json& j, const System& sys) {
  using namespace config_detail;
  const auto kind = kind_of(j, "cover");
  if (kind == "origin_cylinders") {
    const auto* ss = std::get_if<SymbolicSystem>(&sys);
    if (!ss) throw ConfigError("cover 'origin_cylinders' needs a symbolic system");
    return origin_cylinder_cover(*ss);
  }
  if (kind == "sets") {
    Cover c;
    const auto& je = need(j, "elements", "cover");
    if (!je.is_array() || je.empty()) throw ConfigError("cover.elements: expected a nonempty list");
    for (std::size_t i = 0; i < je.size(); ++i)
      c.elements.push_back(parse_open_set(je[i], sys, "cover.elements[" + std::to_string(i) + "]"));
    return c;
  }
  throw ConfigError("cover.kind must be 'origin_cylinders' or 'sets'");
}

// {"from": a, "to": b} or an explicit list.
inline std::vector<std::int64_t> parse_n_range(const json& j) {
  using namespace config_detail;
  if (j.is_array()) return get<std::vector<std::int64_t>>(j, "n_range");
  const auto from = get<std::int64_t>(need(j, "from", "n_range"), "n_range.from");
  const auto to = get<std::int64_t>(need(j, "to", "n_range"), "n_range.to");
  return n_range(from, to);
}

inline FiniteGroupSet parse_pool(const json& j, const RunConfig& cfg, std::size_t d) {
  using namespace config_detail;
  std::size_t size = kDefaultPoolSize;
  std::optional<SubsetGenerator> gen = cfg.subset;
  if (j.contains("pool")) {
    const auto& jp = j.at("pool");
    if (jp.contains("size")) size = get<std::size_t>(jp.at("size"), "search.pool.size");
    if (jp.contains("subset")) gen = parse_subset(jp.at("subset"), d);
    if (jp.contains("elements")) return elements(jp.at("elements"), d, "search.pool.elements");
  }
  if (!gen) gen = SubsetGenerator::everything(d);
  return gen->first(size);
}

inline SearchSpec parse_search(const json& j, const RunConfig& cfg) {
  using namespace config_detail;
  const auto& sys = *cfg.system;
  const auto d = dim(sys);
  SearchSpec s;
  s.mode = get<std::string>(need(j, "mode", "search"), "search.mode");
  const auto& modes = search_modes();
  if (std::find(modes.begin(), modes.end(), s.mode) == modes.end()) {
    std::string list;
    for (const auto& m : modes) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("search.mode '" + s.mode + "' is not one of: " + list);
  }
  if (j.contains("k")) s.k = get<std::size_t>(j.at("k"), "search.k");
  if (j.contains("sets")) {
    const auto& js = j.at("sets");
    if (!js.is_array()) throw ConfigError("search.sets: expected a list");
    for (std::size_t i = 0; i < js.size(); ++i)
      s.sets.push_back(parse_open_set(js[i], sys, "search.sets[" + std::to_string(i) + "]"));
  }
  if (j.contains("generators")) s.generators = elements(j.at("generators"), d, "search.generators");
  if (j.contains("a")) s.a = parse_open_set(j.at("a"), sys, "search.a");
  if (j.contains("b")) s.b = parse_open_set(j.at("b"), sys, "search.b");
  if (j.contains("depth")) s.depth = get<std::size_t>(j.at("depth"), "search.depth");
  if (j.contains("threshold")) s.threshold = get<double>(j.at("threshold"), "search.threshold");
  s.pool = parse_pool(j, cfg, d);
  if ((s.mode == "independence") && s.sets.size() < 2) throw ConfigError("search.sets: need at least two sets");
  if (s.mode == "independence_ip" && s.sets.size() < 2) throw ConfigError("search.sets: need at least two sets");
  if (s.mode == "independence_ip" && s.generators.empty()) throw ConfigError("search.generators: required for IP mode");
  if (s.mode == "correlation" && (!s.a || !s.b)) throw ConfigError("search: correlation needs sets 'a' and 'b'");
  return s;
}

inline std::optional<std::uint64_t> env_budget() {
  const char* v = std::getenv(kBudgetEnv);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto b = std::stoull(v, &pos);
    if (pos != std::string(v).size()) throw std::invalid_argument("trailing");
    return b;
  } catch (const std::exception&) {
    throw ConfigError(std::string(kBudgetEnv) + " is not a positive integer");
  }
}

// Exact circle grids must contain every rational point named in the config.
inline void refine_to_literals(RotationSystem& rs, const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.find_first_of("/.") == std::string::npos) return;
    try {
      rs.refine_grid(Rational::parse(s).den);
    } catch (const ConfigError&) {
    }
    return;
  }
  if (j.is_structured())
    for (const auto& [key, v] : j.items())
      if (key != "kind" && key != "mode") refine_to_literals(rs, v);
}

inline RunConfig parse_config(const json& j) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto version = get<int>(need(j, "schema_version", "config"), "schema_version");
  if (version != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
  RunConfig cfg;
  if (auto b = env_budget()) cfg.budget.max_states = *b;
  if (j.contains("system")) cfg.system = parse_system(j.at("system"));
  if (cfg.system)
    if (auto* rs = std::get_if<RotationSystem>(&*cfg.system); rs && rs->exact())
      for (const char* key : {"partition", "cover", "search"})
        if (j.contains(key)) refine_to_literals(*rs, j.at(key));
  const std::size_t d = cfg.system ? dim(*cfg.system) : (j.contains("dim") ? get<std::size_t>(j.at("dim"), "dim") : 0);
  if (j.contains("subset")) {
    if (d == 0) throw ConfigError("subset needs a system or a 'dim' field");
    cfg.subset = parse_subset(j.at("subset"), d);
  }
  if (j.contains("partition")) {
    if (!cfg.system) throw ConfigError("partition needs a system");
    cfg.partition = parse_partition(j.at("partition"), *cfg.system);
  }
  if (j.contains("cover")) {
    if (!cfg.system) throw ConfigError("cover needs a system");
    cfg.cover = parse_cover(j.at("cover"), *cfg.system);
  }
  if (j.contains("n_range")) cfg.ns = parse_n_range(j.at("n_range"));
  if (j.contains("n_max")) cfg.n_max = get<std::int64_t>(j.at("n_max"), "n_max");
  if (j.contains("solver")) {
    const auto s = get<std::string>(j.at("solver"), "solver");
    if (s == "exact") cfg.solver = SolverMode::exact;
    else if (s == "greedy") cfg.solver = SolverMode::greedy;
    else throw ConfigError("solver must be 'exact' or 'greedy'");
  }
  if (j.contains("budget")) {
    const auto& jb = j.at("budget");
    if (jb.contains("max_states")) cfg.budget.max_states = get<std::uint64_t>(jb.at("max_states"), "budget.max_states");
    if (jb.contains("exact_elements"))
      cfg.budget.exact_elements = get<std::size_t>(jb.at("exact_elements"), "budget.exact_elements");
    if (jb.contains("max_join_work"))
      cfg.budget.max_join_work = get<std::uint64_t>(jb.at("max_join_work"), "budget.max_join_work");
    if (jb.contains("max_search_nodes"))
      cfg.budget.max_search_nodes = get<std::uint64_t>(jb.at("max_search_nodes"), "budget.max_search_nodes");
  }
  if (j.contains("jobs")) cfg.jobs = get<unsigned>(j.at("jobs"), "jobs");
  if (j.contains("unit")) {
    const auto u = get<std::string>(j.at("unit"), "unit");
    if (u == "nats") cfg.unit = Unit::nats;
    else if (u == "bits") cfg.unit = Unit::bits;
    else throw ConfigError("unit must be 'nats' or 'bits'");
  }
  if (j.contains("out")) cfg.out = get<std::string>(j.at("out"), "out");
  if (j.contains("search")) {
    if (!cfg.system) throw ConfigError("search needs a system");
    cfg.search = parse_search(j.at("search"), cfg);
  }
  if (cfg.system && cfg.subset && cfg.subset->dim() != dim(*cfg.system))
    throw ConfigError("subset dimension differs from the system dimension");
  return cfg;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

}  // namespace seqent

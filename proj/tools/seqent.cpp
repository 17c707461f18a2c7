// seqent: sequence entropy profiles, subcover counts and constructive searches.

#include <clocale>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "seqent/app.hpp"
#include "seqent/config.hpp"

namespace {

struct Flags {
  std::string config;
  std::string unit;
  unsigned jobs = 0;
  std::uint64_t budget = 0;
  std::string out;
};

void add_flags(CLI::App* cmd, Flags& f, bool needs_config) {
  auto* c = cmd->add_option("--config", f.config, "JSON run configuration");
  if (needs_config) c->required();
  cmd->add_option("--unit", f.unit, "entropy unit")->check(CLI::IsMember({"nats", "bits"}));
  cmd->add_option("--jobs", f.jobs, "worker threads for row evaluation");
  cmd->add_option("--budget", f.budget, "enumeration budget in states (default: $SEQENT_BUDGET or 2^24)");
  cmd->add_option("--out", f.out, "write CSV/JSON here instead of stdout");
}

seqent::RunConfig load(const Flags& f) {
  auto cfg = seqent::load_config(f.config);
  if (!f.unit.empty()) cfg.unit = f.unit == "bits" ? seqent::Unit::bits : seqent::Unit::nats;
  if (f.jobs > 0) cfg.jobs = f.jobs;
  if (f.budget > 0) cfg.budget.max_states = f.budget;
  if (!f.out.empty()) cfg.out = f.out;
  return cfg;
}

int emit(const seqent::CommandResult& r, const std::string& out) {
  if (out.empty()) {
    std::cout << r.out << std::flush;
  } else {
    std::ofstream o(out, std::ios::binary);
    if (!o) {
      std::cerr << "error: cannot write '" << out << "'\n";
      return seqent::exit_code::config_error;
    }
    o << r.out;
  }
  std::cerr << r.summary << "\n";
  return r.code;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Sequence entropy toolkit for Z^d-actions"};
  app.require_subcommand(1);

  Flags measure_f, top_f, density_f, search_f, repro_f;
  auto* entropy = app.add_subcommand("entropy", "entropy profiles");
  entropy->require_subcommand(1);
  auto* measure = entropy->add_subcommand("measure", "measure-theoretic sequence entropy profile (CSV)");
  auto* top = entropy->add_subcommand("top", "topological sequence entropy profile (CSV)");
  auto* dens = app.add_subcommand("density", "densities of S along the boxes (CSV)");
  auto* search = app.add_subcommand("search", "constructive searches (JSON)");
  auto* reproduce = app.add_subcommand("reproduce", "packaged reproductions");
  reproduce->require_subcommand(1);
  auto* ex61 = reproduce->add_subcommand("example61", "the identity x shift example on Z^2");
  add_flags(measure, measure_f, true);
  add_flags(top, top_f, true);
  add_flags(dens, density_f, true);
  add_flags(search, search_f, true);
  add_flags(ex61, repro_f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : seqent::exit_code::config_error;
  }

  try {
    if (measure->parsed()) {
      const auto cfg = load(measure_f);
      return emit(seqent::cmd_entropy_measure(cfg), cfg.out);
    }
    if (top->parsed()) {
      const auto cfg = load(top_f);
      return emit(seqent::cmd_entropy_top(cfg), cfg.out);
    }
    if (dens->parsed()) {
      const auto cfg = load(density_f);
      return emit(seqent::cmd_density(cfg), cfg.out);
    }
    if (search->parsed()) {
      const auto cfg = load(search_f);
      return emit(seqent::cmd_search(cfg), cfg.out);
    }
    if (ex61->parsed()) {
      seqent::ReproduceOptions opt;
      std::string out = repro_f.out;
      if (!repro_f.config.empty()) {
        const auto cfg = load(repro_f);
        opt.unit = cfg.unit;
        opt.budget = cfg.budget;
        opt.jobs = cfg.jobs;
        out = cfg.out;
      } else {
        if (auto b = seqent::env_budget()) opt.budget.max_states = *b;
        if (repro_f.unit == "bits") opt.unit = seqent::Unit::bits;
        if (repro_f.jobs > 0) opt.jobs = repro_f.jobs;
        if (repro_f.budget > 0) opt.budget.max_states = repro_f.budget;
      }
      return emit(seqent::cmd_reproduce_example61(opt), out);
    }
  } catch (const seqent::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return seqent::exit_code::truncated;
  } catch (const seqent::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return seqent::exit_code::config_error;
  }
  return seqent::exit_code::config_error;
}

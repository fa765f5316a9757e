// Command-line front end: scenario files, single-scheme runs, validation,
// multi-seed experiments and the set-packing reduction.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crn/centralized.hpp"
#include "crn/config.hpp"
#include "crn/fixture.hpp"
#include "crn/harness.hpp"
#include "crn/io.hpp"
#include "crn/scenario.hpp"

namespace fs = std::filesystem;
using namespace crn;

namespace {

constexpr int kInvariantViolation = 3;
// compare includes the exact centralized solver by default up to this size.
constexpr std::size_t kDefaultCentralMaxNodes = 24;

struct ConfigArgs {
  std::string preset;
  std::string file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "small, or large:N for the larger-network setup");
    app->add_option("--config", file, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "override one key, as key=value")->allow_extra_args(false);
    app->add_option("--seed", seed, "scenario seed");
  }

  ScenarioConfig build(ScenarioConfig base = {}) const {
    ScenarioConfig c = base;
    if (preset == "small") {
      c = small_network_preset();
    } else if (preset.rfind("large:", 0) == 0) {
      c = large_network_preset(std::stoul(preset.substr(6)));
    } else if (!preset.empty()) {
      throw ConfigError("unknown preset '" + preset + "'");
    }
    if (!file.empty()) c = load_config(file, c);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      set_config_key(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

void emit(const std::string& out, const io::json& j) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << '\n';
  else
    io::write_json_file(out, j);
}

std::ofstream open_csv(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  f.precision(10);
  return f;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names, bool include_central) {
  std::vector<Scheme> out;
  if (names.empty()) {
    for (auto s : kAllSchemes)
      if (include_central || s != Scheme::Central) out.push_back(s);
    return out;
  }
  for (const auto& n : names) {
    const auto s = parse_scheme(n);
    if (!s) throw CLI::ValidationError("--schemes", "unknown scheme '" + n + "'");
    out.push_back(*s);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering simulator for ad-hoc cognitive radio networks"};
  app.require_subcommand(1);

  // fixture
  std::string fixture_out;
  auto* fixture = app.add_subcommand("fixture", "write the eight-node example network");
  fixture->add_option("--out", fixture_out, "output file (default stdout)");

  // generate
  ConfigArgs gen_cfg;
  std::string gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "draw a scenario from a config and seed");
  gen_cfg.attach(generate_cmd);
  generate_cmd->add_option("--out", gen_out, "output file (default stdout)");

  // cluster
  std::string scheme_name_arg, cluster_in, cluster_out;
  ConfigArgs cluster_cfg;
  auto* cluster = app.add_subcommand("cluster", "run one scheme on a scenario file");
  cluster->add_option("--scheme", scheme_name_arg, "ross-dga, ross-dfa, ross-sc-dga, ross-sc-dfa, soc, central")
      ->required();
  cluster->add_option("--in", cluster_in, "scenario or topology file")->required()->check(CLI::ExistingFile);
  cluster->add_option("--out", cluster_out, "clustering file (default stdout)");
  cluster_cfg.attach(cluster);

  // validate
  std::string validate_in;
  bool allow_overlap = false;
  auto* validate = app.add_subcommand("validate", "check a clustering file against its topology");
  validate->add_option("--in", validate_in, "clustering file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--allow-overlap", allow_overlap, "accept overlapping clusters (phase-I output)");

  // experiment
  std::string kind, out_dir = ".";
  ConfigArgs exp_cfg;
  std::size_t num_seeds = 50, batches = 19, batch_size = 5;
  std::uint64_t first_seed = 1;
  unsigned threads = 0;
  std::vector<std::string> scheme_names;
  std::vector<std::size_t> sizes{100, 200, 300};
  auto* experiment = app.add_subcommand("experiment", "multi-seed experiment writing CSV files");
  experiment->add_option("kind", kind, "robustness, scale or compare")
      ->required()
      ->check(CLI::IsMember({"robustness", "scale", "compare"}));
  exp_cfg.attach(experiment);
  experiment->add_option("--seeds", num_seeds, "number of seeds");
  experiment->add_option("--first-seed", first_seed, "first seed");
  experiment->add_option("--schemes", scheme_names, "schemes to run (default all distributed; compare adds central)");
  experiment->add_option("--batches", batches, "robustness: extra PU batches");
  experiment->add_option("--batch-size", batch_size, "robustness: PUs per batch");
  experiment->add_option("--sizes", sizes, "scale: network sizes");
  experiment->add_option("--threads", threads, "worker threads (0 = hardware)");
  experiment->add_option("--out-dir", out_dir, "directory for CSV output");

  // reduce
  std::string packing_in, reduce_out, pool_out;
  auto* reduce = app.add_subcommand("reduce", "map a weighted set-packing instance onto a clustering instance");
  reduce->add_option("--packing", packing_in, "instance file, lines 'set: e1 e2 ; weight: w'")
      ->required()
      ->check(CLI::ExistingFile);
  reduce->add_option("--out", reduce_out, "write the reduced topology here");
  reduce->add_option("--pool", pool_out, "write the candidate pool CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fixture) {
      emit(fixture_out, io::to_json(example_net::topology()));
      return 0;
    }

    if (*generate_cmd) {
      const auto cfg = gen_cfg.build();
      emit(gen_out, io::to_json(generate(cfg)));
      return 0;
    }

    if (*cluster) {
      const auto scheme = parse_scheme(scheme_name_arg);
      if (!scheme) throw CLI::ValidationError("--scheme", "unknown scheme '" + scheme_name_arg + "'");
      const auto doc = io::scenario_from_json(io::read_json_file(cluster_in));
      auto cfg = cluster_cfg.build(doc.config.value_or(ScenarioConfig{}));
      const auto run = run_scheme(*scheme, doc.topology, cfg);
      const auto rep = validate_clustering(run.clustering, doc.topology, true);
      emit(cluster_out, io::to_json(io::ClusteringDoc{doc.topology, run.clustering, std::string(crn::scheme_name(*scheme)),
                                                      run.messages}));
      if (!rep.ok()) {
        std::cerr << rep.summary();
        return kInvariantViolation;
      }
      return 0;
    }

    if (*validate) {
      const auto doc = io::clustering_from_json(io::read_json_file(validate_in));
      const auto rep = validate_clustering(doc.clustering, doc.topology, !allow_overlap);
      if (rep.ok()) {
        std::cout << "ok: " << doc.clustering.size() << " clusters over " << doc.topology.size() << " nodes\n";
        return 0;
      }
      std::cout << rep.summary();
      return kInvariantViolation;
    }

    if (*experiment) {
      const auto cfg = exp_cfg.build(small_network_preset());
      const auto seeds = seed_range(first_seed, num_seeds);
      const fs::path dir(out_dir);
      if (kind == "robustness") {
        const auto schemes = parse_schemes(scheme_names, false);
        const auto res = robustness_experiment(cfg, schemes, batches, batch_size, seeds, threads);
        auto f = open_csv(dir, "robustness.csv");
        write_robustness_header(f);
        for (const auto& r : res.rows) write_robustness_row(f, r);
        for (const auto& c : res.curves) {
          std::cout << crn::scheme_name(c.scheme);
          for (const auto& p : c.points) std::cout << ' ' << p.unclustered.mean;
          std::cout << '\n';
        }
        return 0;
      }
      if (kind == "scale") {
        const auto schemes = parse_schemes(scheme_names.empty() ? std::vector<std::string>{"ross-dga"} : scheme_names, false);
        auto f = open_csv(dir, "scale.csv");
        f << "scheme,N,seed,num_clusters\n";
        for (auto s : schemes) {
          const auto pts = scale_experiment(cfg, sizes, seeds, s, threads);
          for (const auto& p : pts) {
            for (std::size_t k = 0; k < seeds.size(); ++k)
              f << crn::scheme_name(s) << ',' << p.n << ',' << seeds[k] << ',' << p.counts[k] << '\n';
            std::cout << crn::scheme_name(s) << " N=" << p.n << " clusters " << p.clusters.mean << " +/- "
                      << p.clusters.half_width << '\n';
          }
        }
        return 0;
      }
      // compare
      const auto schemes = parse_schemes(scheme_names, cfg.n_cr <= kDefaultCentralMaxNodes);
      const auto res = compare_experiment(cfg, schemes, seeds, threads);
      auto runs = open_csv(dir, "runs.csv");
      auto sizes_csv = open_csv(dir, "sizes.csv");
      auto msgs = open_csv(dir, "messages.csv");
      write_runs_header(runs);
      write_sizes_header(sizes_csv);
      write_messages_header(msgs);
      int status = 0;
      for (const auto& sr : res) {
        auto c = cfg;
        c.seed = sr.seed;
        const auto topo = generate(c).topology;
        for (const auto& run : sr.runs) {
          write_run(runs, make_record(sr.seed, run, cfg.n_cr, sr.num_pu));
          write_sizes(sizes_csv, run.scheme, sr.seed, run.clustering);
          const auto row = message_row(sr.seed, run, cfg.n_cr);
          write_message_row(msgs, row);
          if (!row.ok) {
            std::cerr << "message bound exceeded: " << crn::scheme_name(run.scheme) << " seed " << sr.seed
                      << " measured " << row.measured << " > " << row.bound << '\n';
            status = kInvariantViolation;
          }
          const auto rep = validate_clustering(run.clustering, topo, true);
          if (!rep.ok()) {
            std::cerr << crn::scheme_name(run.scheme) << " seed " << sr.seed << ":\n" << rep.summary();
            status = kInvariantViolation;
          }
        }
      }
      return status;
    }

    if (*reduce) {
      std::ifstream in(packing_in);
      const auto inst = parse_set_packing(in);
      const auto red = reduce_set_packing(inst);
      const auto pool = with_zero_weight_singletons(red.pool, red.topology);
      const auto sol = solve(pool, red.topology.size());
      if (!reduce_out.empty()) io::write_json_file(reduce_out, io::to_json(red.topology));
      if (!pool_out.empty()) {
        std::ofstream p(pool_out);
        write_pool_csv(p, pool);
      }
      std::cout << "nodes " << red.topology.size() << " channels " << red.topology.num_channels() << " sets "
                << inst.sets.size() << '\n';
      std::cout << "max packing weight " << sol.score << '\n';
      for (const auto& c : sol.clustering.clusters) {
        if (c.size() == 1 && std::none_of(red.pool.candidates.begin(), red.pool.candidates.end(),
                                          [&](const Candidate& k) { return k.members == c.members; }))
          continue;
        std::cout << "set:";
        for (auto m : c.members) std::cout << ' ' << red.element_of[m];
        std::cout << " ; weight: " << c.cc.size() << '\n';
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

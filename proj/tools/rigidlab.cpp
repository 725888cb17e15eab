#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rigidlab/errors.hpp"
#include "rigidlab/experiment.hpp"
#include "rigidlab/field_io.hpp"

using namespace rigidlab;

namespace {

std::string output_dir(const std::string& flag, const ExperimentConfig* cfg) {
  if (!flag.empty()) return flag;
  if (cfg && !cfg->output_dir.empty()) return cfg->output_dir;
  const char* env = std::getenv("RIGIDLAB_OUT");
  return env && *env ? env : "rigidlab-out";
}

std::vector<CaseSpec> all_cases(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed) {
  std::vector<CaseSpec> cases = cfg.cases;
  std::optional<std::uint64_t> s = seed ? seed : cfg.corpus_seed;
  if (s) {
    auto corpus = standard_corpus(cfg.corpus_dim, *s, cfg.corpus_linear);
    cases.insert(cases.end(), corpus.begin(), corpus.end());
  }
  return cases;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidlab: incompatible rigidity and Korn experiments"};
  app.require_subcommand(1);

  std::string config, out;
  int threads = 1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run the suites of a config");
  run->add_option("--config", config, "Config file (JSON)")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* run_seed = run->add_option("--seed", seed, "Corpus seed");

  auto* refine = app.add_subcommand("refine", "Refinement study for every case of a config");
  refine->add_option("--config", config, "Config file (JSON)")->required();
  refine->add_option("--out", out, "Output directory");
  refine->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* refine_seed = refine->add_option("--seed", seed, "Corpus seed");

  std::string case_id;
  int resolution = 32;
  auto* dump = app.add_subcommand("dump-field", "Write a generated field to disk");
  dump->add_option("--config", config, "Config file (JSON)")->required();
  dump->add_option("--case", case_id, "Case id (default: first case)");
  dump->add_option("--resolution", resolution, "Cells per axis")->check(CLI::PositiveNumber);
  dump->add_option("--out", out, "Output directory");
  auto* dump_seed = dump->add_option("--seed", seed, "Corpus seed");

  std::string domain = "lshape";
  int dim = 2;
  auto* cover = app.add_subcommand("check-cover", "Build and check a Whitney cover");
  cover->add_option("--domain", domain, "cube, square, lshape or ball");
  cover->add_option("--dim", dim, "Dimension")->check(CLI::IsMember({2, 3}));
  cover->add_option("--resolution", resolution, "Cells per axis (power of two)");
  cover->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *refine) {
      ExperimentConfig cfg = load_config(config);
      RunOptions opts;
      opts.out_dir = output_dir(out, &cfg);
      opts.threads = threads;
      if ((*run && *run_seed) || (*refine && *refine_seed)) opts.seed = seed;
      if (*refine) cfg.suites = {Suite::refine};
      const RunResult r = run_experiment(cfg, opts);
      std::cout << r.csv;
      std::cout << "checks: " << r.summary["checks"]["total"] << ", failed: " << r.summary["checks"]["failed"] << "\n";
      for (const auto& f : r.summary["failures"]) std::cerr << "FAILED " << f.get<std::string>() << "\n";
      return r.exit_status;
    }
    if (*dump) {
      const ExperimentConfig cfg = load_config(config);
      const auto cases = all_cases(cfg, *dump_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
      if (cases.empty()) throw InputError("config has no cases");
      const CaseSpec* pick = &cases.front();
      if (!case_id.empty()) {
        pick = nullptr;
        for (const auto& c : cases)
          if (c.id == case_id) pick = &c;
        if (!pick) throw InputError("no case named " + case_id);
      }
      const GeneratedCase g = generate(*pick, resolution);
      const std::string dir = output_dir(out, &cfg);
      std::filesystem::create_directories(dir);
      const std::string stem = dir + "/" + pick->id + "-" + std::to_string(resolution);
      dump_field(g.beta, stem);
      std::cout << stem << ".json\n" << stem << ".bin\n";
      return 0;
    }
    if (*cover) {
      const DomainPtr dom = Domain::named(domain, dim, resolution);
      const WhitneyCover wc = whitney_cover(dom);
      const CoverCheck c = check_cover(wc);
      const PartitionOfUnity pou = partition_of_unity(wc);
      const std::string text = export_cover(wc);
      if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream(out + "/cover.txt") << text;
      } else {
        std::cout << text;
      }
      std::cout << "cubes " << wc.cubes.size() << " multiplicity " << c.max_multiplicity << " neighbor_ratio "
                << c.max_neighbor_ratio << " uncovered_fraction " << wc.uncovered_fraction << " pou_gradient_bound "
                << pou.gradient_bound << " chain " << (c.chain ? "ok" : "violated") << " distance_window "
                << (c.distance_window ? "ok" : "violated") << "\n";
      return c.chain && c.distance_window && c.max_neighbor_ratio <= 4.0 ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error (line " << e.line() << ", field " << e.field() << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

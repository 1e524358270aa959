// jointde command line: run, simulate, cluster, oracle.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "jointde/clusters.hpp"
#include "jointde/ingest.hpp"
#include "jointde/oracle.hpp"
#include "jointde/runner.hpp"
#include "jointde/synth.hpp"

namespace {

using namespace jointde;

DePrior parse_prior(const std::string& text) {
  if (text == "jeffreys") return DePrior::jeffreys();
  if (text.rfind("fixed:", 0) == 0) {
    std::size_t used = 0;
    const std::string tail = text.substr(6);
    double p = 0.0;
    try {
      p = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tail.size() || tail.empty()) throw CLI::ValidationError("--prior", "bad value " + text);
    return DePrior::fixed(p);
  }
  throw CLI::ValidationError("--prior", "expected jeffreys or fixed:p, got " + text);
}

ProbMode parse_mode(const std::string& text) {
  return text == "uniform" ? ProbMode::Uniform : ProbMode::Precomputed;
}

void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

AlignmentSet load_inputs(const std::string& catalog, const std::vector<std::string>& a,
                         const std::vector<std::string>& b, ProbMode mode) {
  AlignmentSet aset;
  aset.catalog = read_catalog(catalog);
  aset.reads_a = read_condition(a, aset.catalog, mode, warn_stderr);
  aset.reads_b = read_condition(b, aset.catalog, mode, warn_stderr);
  return aset;
}

struct InputArgs {
  std::string catalog;
  std::vector<std::string> cond_a;
  std::vector<std::string> cond_b;
  std::string mode = "precomputed";

  void attach(CLI::App* app) {
    app->add_option("--catalog", catalog, "transcript catalog TSV")->required();
    app->add_option("--cond-a", cond_a, "condition A alignment files")->required()->delimiter(',');
    app->add_option("--cond-b", cond_b, "condition B alignment files")->required()->delimiter(',');
    app->add_option("--mode", mode, "alignment value meaning")
        ->check(CLI::IsMember({"precomputed", "uniform"}));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint Bayesian estimation of transcript expression and differential expression"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "estimate expression and call DE transcripts");
  InputArgs run_in;
  run_in.attach(run);
  RunConfig cfg;
  std::string sampler = "collapsed", prior = "jeffreys", rule = "threshold";
  double fdr = 0.05;
  std::size_t max_break = 0;
  auto& ch = cfg.pipeline.chain;
  run->add_option("--sampler", sampler)->check(CLI::IsMember({"collapsed", "rjmcmc"}));
  run->add_option("--chains", ch.n_chains)->capture_default_str();
  run->add_option("--iters", ch.iterations)->capture_default_str();
  run->add_option("--burnin", ch.burnin)->capture_default_str();
  run->add_option("--thin", ch.thin)->capture_default_str();
  run->add_option("--pair-updates", ch.pair_updates, "block updates per sweep, 0 = ceil(K/2)");
  run->add_option("--prior", prior, "jeffreys or fixed:p")->capture_default_str();
  run->add_option("--alpha", cfg.pipeline.alpha, "Dirichlet hyperparameter for theta");
  run->add_option("--gamma", cfg.pipeline.gamma, "Dirichlet hyperparameter for v");
  run->add_option("--fdr", fdr)->capture_default_str();
  run->add_option("--rule", rule, "threshold, naive or loss:C")->capture_default_str();
  run->add_option("--threads", cfg.pipeline.threads)->check(CLI::PositiveNumber);
  run->add_option("--seed", ch.seed)->capture_default_str();
  run->add_option("--out", cfg.out_dir, "output directory")->required();
  run->add_flag("--dump-draws", cfg.dump_draws, "write per-cluster draw traces");
  run->add_flag("--cluster-dump", cfg.cluster_dump, "write clusters.tsv");
  run->add_option("--fc-filter", cfg.pipeline.fc_filter, "minimum |log2 fold change|");
  run->add_option("--max-cluster-reads-break", max_break,
                  "cap on transcripts per cluster; bridging reads are dropped");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset with known labels");
  ScenarioSpec spec;
  std::size_t reads_per_condition = 50000;
  std::string dispersion = "poisson", sim_out;
  sim->add_option("--transcripts", spec.K)->capture_default_str();
  sim->add_option("--n-de", spec.n_de)->capture_default_str();
  sim->add_option("--reads", reads_per_condition, "reads per condition")->capture_default_str();
  sim->add_option("--replicates", spec.replicates_a)->capture_default_str();
  sim->add_option("--dispersion", dispersion)->check(CLI::IsMember({"poisson", "nb"}));
  sim->add_option("--phi", spec.phi);
  sim->add_option("--max-isoforms", spec.max_isoforms)->capture_default_str();
  sim->add_option("--seed", spec.seed)->capture_default_str();
  sim->add_option("--out", sim_out, "output directory")->required();

  // cluster
  auto* clu = app.add_subcommand("cluster", "write the transcript partition only");
  InputArgs clu_in;
  clu_in.attach(clu);
  std::string clu_out;
  std::size_t clu_break = 0;
  clu->add_option("--out", clu_out, "output TSV (default stdout)");
  clu->add_option("--max-cluster-reads-break", clu_break);

  // oracle
  auto* ora = app.add_subcommand("oracle", "exact posterior by enumeration on tiny inputs");
  InputArgs ora_in;
  ora_in.attach(ora);
  std::string ora_prior = "jeffreys";
  double ora_alpha = 1.0, ora_gamma = 1.0;
  ora->add_option("--prior", ora_prior)->capture_default_str();
  ora->add_option("--alpha", ora_alpha);
  ora->add_option("--gamma", ora_gamma);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cfg.catalog = run_in.catalog;
      cfg.cond_a = run_in.cond_a;
      cfg.cond_b = run_in.cond_b;
      cfg.prob_mode = parse_mode(run_in.mode);
      ch.kind = sampler == "rjmcmc" ? SamplerKind::RjMcmc : SamplerKind::Collapsed;
      cfg.pipeline.de_prior = parse_prior(prior);
      cfg.pipeline.rule = RuleSpec::parse(rule, fdr);
      if (max_break) cfg.pipeline.max_cluster_transcripts = max_break;
      const auto res = orchestrate(cfg, warn_stderr);
      fmt::print(std::cerr, "{} transcripts, {} clusters, {} discoveries\n",
                 res.transcripts.size(), res.partition.clusters.size(),
                 res.decisions.discoveries);
    } else if (*sim) {
      spec.replicates_b = spec.replicates_a;
      spec.reads_per_replicate_a = reads_per_condition / spec.replicates_a;
      spec.reads_per_replicate_b = reads_per_condition / spec.replicates_b;
      spec.dispersion = dispersion == "nb" ? Dispersion::NegativeBinomial : Dispersion::Poisson;
      const auto sc = generate_scenario(spec);
      const std::filesystem::path dir(sim_out);
      std::filesystem::create_directories(dir);
      std::ofstream cat(dir / "catalog.tsv"), fa(dir / "cond_a.tsv"), fb(dir / "cond_b.tsv"),
          tr(dir / "truth.tsv");
      if (!cat || !fa || !fb || !tr) throw std::runtime_error("cannot write into " + sim_out);
      write_catalog(cat, sc.aset.catalog);
      write_alignments(fa, sc.aset.reads_a, sc.aset.catalog, "a");
      write_alignments(fb, sc.aset.reads_b, sc.aset.catalog, "b");
      write_truth(tr, sc.aset.catalog, sc.truth);
    } else if (*clu) {
      auto aset = load_inputs(clu_in.catalog, clu_in.cond_a, clu_in.cond_b, parse_mode(clu_in.mode));
      if (clu_break) aset = drop_bridging_reads(aset, clu_break);
      const auto part = build_clusters(aset);
      if (clu_out.empty()) {
        write_cluster_dump(std::cout, part, aset.catalog);
      } else {
        std::ofstream f(clu_out);
        if (!f) throw std::runtime_error("cannot write " + clu_out);
        write_cluster_dump(f, part, aset.catalog);
      }
    } else if (*ora) {
      const auto aset =
          load_inputs(ora_in.catalog, ora_in.cond_a, ora_in.cond_b, parse_mode(ora_in.mode));
      const std::size_t K = aset.catalog.size();
      const PriorConfig pc{std::vector<double>(K, ora_alpha), std::vector<double>(K, ora_gamma),
                           parse_prior(ora_prior)};
      const auto res = brute_force_posterior(whole_set_model(aset, pc));
      std::cout << "transcript_id\tp_de\ttheta_mean\tw_mean\n";
      for (std::size_t k = 0; k < K; ++k)
        fmt::print("{}\t{:.10g}\t{:.10g}\t{:.10g}\n", aset.catalog[k].id, res.p_de[k],
                   res.theta_mean[k], res.w_mean[k]);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jointde/clusters.hpp"
#include "jointde/decisions.hpp"
#include "jointde/distributions.hpp"
#include "jointde/oracle.hpp"
#include "jointde/runner.hpp"
#include "jointde/samplers.hpp"
#include "jointde/synth.hpp"

namespace py = pybind11;
using namespace jointde;

namespace {

DePrior make_prior(const std::optional<double>& fixed_pi) {
  return fixed_pi ? DePrior::fixed(*fixed_pi) : DePrior::jeffreys();
}

AlignmentSet make_aset(const std::vector<std::pair<std::string, std::uint64_t>>& catalog,
                       const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_a,
                       const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_b) {
  std::vector<Transcript> entries;
  for (const auto& [id, len] : catalog) entries.push_back({id, len});
  AlignmentSet aset;
  aset.catalog = TranscriptCatalog(std::move(entries));
  auto fill = [](const auto& src, ReadTable& dst) {
    for (const auto& read : src) {
      std::vector<std::uint32_t> t;
      std::vector<double> p;
      for (const auto& [k, f] : read) {
        t.push_back(k);
        p.push_back(f);
      }
      dst.add_read(t, p);
    }
  };
  fill(reads_a, aset.reads_a);
  fill(reads_b, aset.reads_b);
  aset.validate();
  return aset;
}

py::dict simulate(std::size_t K, std::size_t n_de, std::size_t reads_per_condition,
                  std::uint64_t seed, const std::string& out_dir) {
  const auto sc = generate_scenario(scenario1_like(K, n_de, reads_per_condition, seed));
  py::dict d;
  d["de"] = std::vector<int>(sc.truth.de.begin(), sc.truth.de.end());
  d["theta"] = sc.truth.theta;
  d["w"] = sc.truth.w;
  d["n_reads_a"] = sc.aset.reads_a.size();
  d["n_reads_b"] = sc.aset.reads_b.size();
  if (!out_dir.empty()) {
    std::ostringstream cat, a, b, tr;
    write_catalog(cat, sc.aset.catalog);
    write_alignments(a, sc.aset.reads_a, sc.aset.catalog, "a");
    write_alignments(b, sc.aset.reads_b, sc.aset.catalog, "b");
    write_truth(tr, sc.aset.catalog, sc.truth);
    d["files"] = py::dict(py::arg("catalog") = cat.str(), py::arg("cond_a") = a.str(),
                          py::arg("cond_b") = b.str(), py::arg("truth") = tr.str());
  }
  return d;
}

py::dict run(const std::string& catalog, const std::vector<std::string>& cond_a,
             const std::vector<std::string>& cond_b, const std::string& out_dir,
             const std::string& sampler, std::size_t chains, std::size_t iters,
             std::size_t burnin, std::size_t thin, std::optional<double> fixed_pi, double fdr,
             const std::string& rule, std::size_t threads, std::uint64_t seed) {
  RunConfig cfg;
  cfg.catalog = catalog;
  cfg.cond_a = cond_a;
  cfg.cond_b = cond_b;
  cfg.out_dir = out_dir;
  auto& ch = cfg.pipeline.chain;
  ch.kind = sampler == "rjmcmc" ? SamplerKind::RjMcmc : SamplerKind::Collapsed;
  ch.n_chains = chains;
  ch.iterations = iters;
  ch.burnin = burnin;
  ch.thin = thin;
  ch.seed = seed;
  cfg.pipeline.de_prior = make_prior(fixed_pi);
  cfg.pipeline.rule = RuleSpec::parse(rule, fdr);
  cfg.pipeline.threads = threads;
  PipelineResult res;
  {
    py::gil_scoped_release nogil;
    res = orchestrate(cfg);
  }
  py::dict d;
  std::vector<std::string> ids;
  std::vector<double> p, th, w;
  for (const auto& t : res.transcripts) {
    ids.push_back(t.id);
    p.push_back(t.p_de);
    th.push_back(t.theta_mean);
    w.push_back(t.w_mean);
  }
  d["transcript_id"] = ids;
  d["p_de"] = p;
  d["theta_mean"] = th;
  d["w_mean"] = w;
  d["decision"] = std::vector<int>(res.decisions.decision.begin(), res.decisions.decision.end());
  d["discoveries"] = res.decisions.discoveries;
  d["expected_fdr"] = res.decisions.expected_fdr;
  d["n_clusters"] = res.partition.clusters.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint Bayesian transcript expression and DE inference";

  m.def("simulate", &simulate, py::arg("transcripts") = 500, py::arg("n_de") = 50,
        py::arg("reads_per_condition") = 50000, py::arg("seed") = 1, py::arg("out_dir") = "",
        "Generate a synthetic dataset; with out_dir set, file contents are returned too.");

  m.def("run", &run, py::arg("catalog"), py::arg("cond_a"), py::arg("cond_b"),
        py::arg("out_dir"), py::arg("sampler") = "collapsed", py::arg("chains") = 6,
        py::arg("iters") = 5000, py::arg("burnin") = 1000, py::arg("thin") = 5,
        py::arg("fixed_pi") = py::none(), py::arg("fdr") = 0.05, py::arg("rule") = "threshold",
        py::arg("threads") = 1, py::arg("seed") = 1,
        "Run the full pipeline on files and write the reports into out_dir.");

  m.def(
      "oracle",
      [](const std::vector<std::pair<std::string, std::uint64_t>>& catalog,
         const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_a,
         const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_b,
         std::optional<double> fixed_pi, double alpha, double gamma) {
        const auto aset = make_aset(catalog, reads_a, reads_b);
        const std::size_t K = aset.catalog.size();
        const PriorConfig pc{std::vector<double>(K, alpha), std::vector<double>(K, gamma),
                             make_prior(fixed_pi)};
        const auto r = brute_force_posterior(whole_set_model(aset, pc));
        py::dict d;
        d["p_de"] = r.p_de;
        d["theta_mean"] = r.theta_mean;
        d["w_mean"] = r.w_mean;
        return d;
      },
      py::arg("catalog"), py::arg("reads_a"), py::arg("reads_b"), py::arg("fixed_pi") = py::none(),
      py::arg("alpha") = 1.0, py::arg("gamma") = 1.0,
      "Exact posterior by enumeration. Reads are lists of (transcript index, f) pairs.");

  m.def(
      "posterior",
      [](const std::vector<std::pair<std::string, std::uint64_t>>& catalog,
         const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_a,
         const std::vector<std::vector<std::pair<std::uint32_t, double>>>& reads_b,
         const std::string& sampler, std::size_t chains, std::size_t iters, std::size_t burnin,
         std::size_t thin, std::optional<double> fixed_pi, std::uint64_t seed) {
        const auto aset = make_aset(catalog, reads_a, reads_b);
        const std::size_t K = aset.catalog.size();
        const PriorConfig pc{std::vector<double>(K, 1.0), std::vector<double>(K, 1.0),
                             make_prior(fixed_pi)};
        ChainConfig cfg;
        cfg.kind = sampler == "rjmcmc" ? SamplerKind::RjMcmc : SamplerKind::Collapsed;
        cfg.n_chains = chains;
        cfg.iterations = iters;
        cfg.burnin = burnin;
        cfg.thin = thin;
        cfg.seed = seed;
        cfg.keep_traces = false;
        const auto model = whole_set_model(aset, pc);
        EnsembleSummary s;
        {
          py::gil_scoped_release nogil;
          s = run_ensemble(model, cfg);
        }
        py::dict d;
        d["p_de"] = s.p_de;
        d["theta_mean"] = s.theta_mean;
        d["w_mean"] = s.w_mean;
        d["retained_draws"] = s.retained_draws;
        return d;
      },
      py::arg("catalog"), py::arg("reads_a"), py::arg("reads_b"),
      py::arg("sampler") = "collapsed", py::arg("chains") = 2, py::arg("iters") = 5000,
      py::arg("burnin") = 1000, py::arg("thin") = 1, py::arg("fixed_pi") = py::none(),
      py::arg("seed") = 1, "Sampler ensemble over the whole set, no clustering.");

  m.def(
      "fdr_select",
      [](const std::vector<double>& probs, double alpha) {
        const auto r = fdr_threshold_select(probs, alpha);
        return py::make_tuple(std::vector<int>(r.decision.begin(), r.decision.end()),
                              r.expected_fdr);
      },
      py::arg("probs"), py::arg("alpha") = 0.05,
      "Threshold rule; returns (decisions, expected FDR of the accepted set).");

  m.def(
      "sample_gd",
      [](const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
        Rng rng(seed);
        return sample_gd(GDParams{a, b}, rng);
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 1);
  m.def(
      "gd_logpdf",
      [](const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b) {
        return gd_logpdf(x, GDParams{a, b});
      },
      py::arg("x"), py::arg("a"), py::arg("b"));
  m.def(
      "dirichlet_logpdf",
      [](const std::vector<double>& x, const std::vector<double>& alpha) {
        return dirichlet_logpdf(x, alpha);
      },
      py::arg("x"), py::arg("alpha"));

  m.def(
      "rj_birth",
      [](const std::vector<double>& v, double delta, std::size_t j) {
        const auto r = rj_birth_transform(v, delta, j);
        return py::make_tuple(r.v, r.log_jacobian);
      },
      py::arg("v"), py::arg("delta"), py::arg("slot"));
  m.def(
      "rj_death",
      [](const std::vector<double>& v, std::size_t j) {
        const auto r = rj_death_transform(v, j);
        return py::make_tuple(r.v, r.delta);
      },
      py::arg("v"), py::arg("slot"));
}

#pragma once
// End-to-end pipeline: clustering, per-cluster ensembles on a worker pool,
// merge to the global scale, decisions and report files.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jointde/clusters.hpp"
#include "jointde/decisions.hpp"
#include "jointde/ingest.hpp"
#include "jointde/samplers.hpp"

namespace jointde {

struct PipelineOptions {
  ChainConfig chain;
  DePrior de_prior;
  double alpha = 1.0;  // symmetric Dirichlet hyperparameters
  double gamma = 1.0;
  RuleSpec rule;
  std::optional<double> fc_filter;  // |log2 FC| threshold applied before ranking
  std::size_t threads = 1;
  std::optional<std::size_t> max_cluster_transcripts;  // read-dropping cluster cap
  bool keep_draws = false;                             // retain traces of every cluster
};

struct TranscriptResult {
  std::string id;
  std::optional<std::uint32_t> cluster;  // 0-based label, none for transcripts without reads
  double p_de = 0.0;
  double theta_mean = 0.0;
  double w_mean = 0.0;
  std::optional<double> log2fc;
};

struct ClusterDiagnostics {
  std::uint32_t label = 0;
  std::size_t n_transcripts = 0;
  std::size_t n_reads_a = 0;
  std::size_t n_reads_b = 0;
  double runtime_s = 0.0;
  double rj_acceptance = std::numeric_limits<double>::quiet_NaN();
  std::size_t retained_draws = 0;
  double ergodic_mae = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ergodic_trace;
};

struct AcfReport {
  std::uint32_t label = 0;
  std::vector<std::uint32_t> members;    // global indices
  std::vector<std::vector<double>> acf;  // per member, lags 0..max_lag
};

struct PipelineResult {
  std::vector<TranscriptResult> transcripts;
  DecisionReport decisions;
  ClusterPartition partition;
  std::vector<ClusterDiagnostics> clusters;  // same order as partition.clusters
  std::vector<std::size_t> dispatch_order;
  std::optional<AcfReport> acf;
  std::vector<EnsembleSummary> ensembles;  // filled only when keep_draws
  BreakReport dropped;
};

/// Longest job first: descending total read count, ties by label.
std::vector<std::size_t> dispatch_order(const ClusterPartition& partition);

/// Sample autocorrelation at lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

PipelineResult run_pipeline(const AlignmentSet& aset, const PipelineOptions& opt);

void write_estimates(std::ostream& out, const PipelineResult& res);
void write_decisions(std::ostream& out, const PipelineResult& res);
void write_decision_summary(std::ostream& out, const PipelineResult& res);
void write_diagnostics(std::ostream& out, const PipelineResult& res);
void write_acf(std::ostream& out, const PipelineResult& res, const TranscriptCatalog& catalog);
void write_convergence(std::ostream& out, const PipelineResult& res);
void write_draws(std::ostream& out, const EnsembleSummary& ens);

struct RunConfig {
  std::string catalog;
  std::vector<std::string> cond_a;
  std::vector<std::string> cond_b;
  ProbMode prob_mode = ProbMode::Precomputed;
  PipelineOptions pipeline;
  std::string out_dir;
  bool dump_draws = false;
  bool cluster_dump = false;
};

/// Reads the inputs, runs the pipeline and writes estimates.tsv,
/// decisions.tsv, decision_summary.tsv, diagnostics.csv, acf.csv,
/// convergence.csv and the optional dumps into out_dir.
PipelineResult orchestrate(const RunConfig& cfg, const WarningSink& warn = {});

}  // namespace jointde

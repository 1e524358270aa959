#include "jointde/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace jointde {

namespace {

constexpr std::size_t kMaxLag = 50;

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  return fmt::format("{:.10g}", x);
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : "NA"; }

std::string cluster_field(const std::optional<std::uint32_t>& c) {
  return c ? fmt::format("{}", *c + 1) : "NA";
}

}  // namespace

std::vector<std::size_t> dispatch_order(const ClusterPartition& partition) {
  std::vector<std::size_t> order(partition.clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return partition.clusters[a].num_reads() > partition.clusters[b].num_reads();
  });
  return order;
}

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::vector<double> out;
  if (n < 2) return out;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const std::size_t L = std::min(max_lag, n - 1);
  out.resize(L + 1);
  for (std::size_t lag = 0; lag <= L; ++lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    out[lag] = var > 0.0 ? s / var : (lag == 0 ? 1.0 : 0.0);
  }
  return out;
}

namespace {

AcfReport build_acf(const Cluster& cl, const EnsembleSummary& ens) {
  AcfReport rep;
  rep.label = cl.label;
  rep.members = cl.members;
  const std::size_t K = ens.p_de.size();
  for (std::size_t m = 0; m < cl.members.size(); ++m) {
    std::vector<double> avg;
    std::size_t used = 0;
    for (const auto& ch : ens.chains) {
      if (ch.theta_trace.empty()) continue;
      std::vector<double> series(ch.n_draws);
      for (std::size_t t = 0; t < ch.n_draws; ++t) series[t] = std::log(ch.theta_trace[t * K + m]);
      const auto a = autocorrelation(series, kMaxLag);
      if (a.empty()) continue;
      if (avg.empty()) avg.assign(a.size(), 0.0);
      for (std::size_t l = 0; l < a.size(); ++l) avg[l] += a[l];
      ++used;
    }
    for (double& v : avg) v /= static_cast<double>(used ? used : 1);
    rep.acf.push_back(std::move(avg));
  }
  return rep;
}

}  // namespace

PipelineResult run_pipeline(const AlignmentSet& aset, const PipelineOptions& opt) {
  opt.chain.validate();
  if (opt.threads < 1) throw std::invalid_argument("thread count must be at least 1");
  aset.validate();

  PipelineResult res;
  AlignmentSet trimmed;
  const AlignmentSet* data = &aset;
  if (opt.max_cluster_transcripts) {
    trimmed = drop_bridging_reads(aset, *opt.max_cluster_transcripts, &res.dropped);
    data = &trimmed;
  }
  const std::size_t K = data->catalog.size();
  res.partition = build_clusters(*data);
  const auto& part = res.partition;
  const PriorConfig prior{std::vector<double>(K, opt.alpha), std::vector<double>(K, opt.gamma),
                          opt.de_prior};
  prior.validate(K);

  res.dispatch_order = dispatch_order(part);
  const std::size_t n = part.clusters.size();
  const std::optional<std::size_t> acf_cluster =
      n ? std::optional<std::size_t>(res.dispatch_order.front()) : std::nullopt;

  std::vector<EnsembleSummary> ens(n);
  res.clusters.resize(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string err_msg;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t slot = next.fetch_add(1);
      if (slot >= n) return;
      const std::size_t j = res.dispatch_order[slot];
      const Cluster& cl = part.clusters[j];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto model = augment_cluster(part, *data, j, prior);
        ens[j] = run_ensemble(model, opt.chain);
        auto& d = res.clusters[j];
        d.label = cl.label;
        d.n_transcripts = cl.members.size();
        d.n_reads_a = cl.reads_a.size();
        d.n_reads_b = cl.reads_b.size();
        d.rj_acceptance = ens[j].rj_acceptance;
        d.retained_draws = ens[j].retained_draws;
        d.ergodic_trace = std::move(ens[j].ergodic_mae);
        if (!d.ergodic_trace.empty()) d.ergodic_mae = d.ergodic_trace.back();
        if (acf_cluster && j == *acf_cluster) res.acf = build_acf(cl, ens[j]);
        if (!opt.keep_draws) ens[j].chains.clear();
        d.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!failed.exchange(true))
          err_msg = fmt::format("cluster {} failed: {}", cl.label + 1, e.what());
        return;
      }
    }
  };

  const std::size_t n_threads = std::max<std::size_t>(1, std::min(opt.threads, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failed.load()) throw std::runtime_error(err_msg);

  res.transcripts.resize(K);
  for (std::size_t k = 0; k < K; ++k) res.transcripts[k].id = data->catalog[k].id;
  double sum_theta = 0.0, sum_w = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& cl = part.clusters[j];
    for (std::size_t m = 0; m < cl.members.size(); ++m) {
      auto& t = res.transcripts[cl.members[m]];
      t.cluster = cl.label;
      t.p_de = ens[j].p_de[m];
      t.theta_mean = ens[j].theta_mean[m];
      t.w_mean = ens[j].w_mean[m];
      sum_theta += t.theta_mean;
      sum_w += t.w_mean;
    }
  }
  std::vector<double> probs(K);
  std::vector<std::optional<double>> fc(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto& t = res.transcripts[k];
    if (sum_theta > 0.0) t.theta_mean /= sum_theta;
    if (sum_w > 0.0) t.w_mean /= sum_w;
    if (t.cluster && t.theta_mean > 0.0 && t.w_mean > 0.0)
      t.log2fc = std::log2(t.w_mean / t.theta_mean);
    probs[k] = t.p_de;
    fc[k] = t.log2fc;
  }
  const auto eligible =
      opt.fc_filter ? fold_change_filter(fc, *opt.fc_filter) : std::vector<std::uint8_t>{};
  res.decisions = apply_rule(opt.rule, probs, eligible);
  if (opt.keep_draws) res.ensembles = std::move(ens);
  return res;
}

void write_estimates(std::ostream& out, const PipelineResult& res) {
  out << "transcript_id\tcluster\tp_de\ttheta_mean\tw_mean\tlog2fc\tflag\n";
  for (const auto& t : res.transcripts)
    fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\t{}\n", t.id, cluster_field(t.cluster), num(t.p_de),
               num(t.theta_mean), num(t.w_mean), opt_num(t.log2fc), t.cluster ? "ok" : "no_reads");
}

void write_decisions(std::ostream& out, const PipelineResult& res) {
  out << "transcript_id\tcluster\tp_de\ttheta_mean\tw_mean\tlog2fc\tdecision\tflag\n";
  for (std::size_t k = 0; k < res.transcripts.size(); ++k) {
    const auto& t = res.transcripts[k];
    fmt::print(out, "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", t.id, cluster_field(t.cluster),
               num(t.p_de), num(t.theta_mean), num(t.w_mean), opt_num(t.log2fc),
               int(res.decisions.decision[k]), t.cluster ? "ok" : "no_reads");
  }
}

void write_decision_summary(std::ostream& out, const PipelineResult& res) {
  out << "rule\tdiscoveries\texpected_fdr\n";
  fmt::print(out, "{}\t{}\t{}\n", res.decisions.spec.describe(), res.decisions.discoveries,
             num(res.decisions.expected_fdr));
}

void write_diagnostics(std::ostream& out, const PipelineResult& res) {
  out << "cluster_label,n_transcripts,n_reads_a,n_reads_b,runtime_s,rj_acceptance,"
         "retained_draws,ergodic_mae\n";
  for (const auto& d : res.clusters)
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", d.label + 1, d.n_transcripts, d.n_reads_a,
               d.n_reads_b, num(d.runtime_s), num(d.rj_acceptance), d.retained_draws,
               num(d.ergodic_mae));
}

void write_acf(std::ostream& out, const PipelineResult& res, const TranscriptCatalog& catalog) {
  out << "cluster_label,transcript_id,lag,acf\n";
  if (!res.acf) return;
  for (std::size_t m = 0; m < res.acf->members.size(); ++m)
    for (std::size_t l = 0; l < res.acf->acf[m].size(); ++l)
      fmt::print(out, "{},{},{},{}\n", res.acf->label + 1, catalog[res.acf->members[m]].id, l,
                 num(res.acf->acf[m][l]));
}

void write_convergence(std::ostream& out, const PipelineResult& res) {
  out << "cluster_label,draw,ergodic_mae\n";
  for (const auto& d : res.clusters)
    for (std::size_t t = 0; t < d.ergodic_trace.size(); ++t)
      fmt::print(out, "{},{},{}\n", d.label + 1, t + 1, num(d.ergodic_trace[t]));
}

void write_draws(std::ostream& out, const EnsembleSummary& ens) {
  if (ens.chains.empty()) return;
  const std::size_t K = ens.chains.front().K;
  out << "chain\tdraw\tpi\tc";
  for (std::size_t k = 0; k < K; ++k) fmt::print(out, "\ttheta_{}", k + 1);
  out << '\n';
  std::string line;
  for (std::size_t ch = 0; ch < ens.chains.size(); ++ch) {
    const auto& d = ens.chains[ch];
    if (d.c_trace.empty()) continue;
    for (std::size_t t = 0; t < d.n_draws; ++t) {
      line = fmt::format("{}\t{}\t{}\t", ch + 1, t + 1, num(d.pi_trace[t]));
      for (std::size_t k = 0; k < K; ++k) line.push_back(d.c_trace[t * K + k] ? '1' : '0');
      for (std::size_t k = 0; k < K; ++k)
        line += "\t" + (d.theta_trace.empty() ? std::string("NA") : num(d.theta_trace[t * K + k]));
      line.push_back('\n');
      out << line;
    }
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

}  // namespace

PipelineResult orchestrate(const RunConfig& cfg, const WarningSink& warn) {
  if (cfg.cond_a.empty() || cfg.cond_b.empty())
    throw std::invalid_argument("each condition needs at least one alignment file");
  AlignmentSet aset;
  aset.catalog = read_catalog(cfg.catalog);
  aset.reads_a = read_condition(cfg.cond_a, aset.catalog, cfg.prob_mode, warn);
  aset.reads_b = read_condition(cfg.cond_b, aset.catalog, cfg.prob_mode, warn);

  PipelineOptions opt = cfg.pipeline;
  opt.keep_draws = opt.keep_draws || cfg.dump_draws;
  auto res = run_pipeline(aset, opt);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  {
    auto f = open_output(dir / "estimates.tsv");
    write_estimates(f, res);
  }
  {
    auto f = open_output(dir / "decisions.tsv");
    write_decisions(f, res);
  }
  {
    auto f = open_output(dir / "decision_summary.tsv");
    write_decision_summary(f, res);
  }
  {
    auto f = open_output(dir / "diagnostics.csv");
    write_diagnostics(f, res);
  }
  {
    auto f = open_output(dir / "acf.csv");
    write_acf(f, res, aset.catalog);
  }
  {
    auto f = open_output(dir / "convergence.csv");
    write_convergence(f, res);
  }
  if (cfg.cluster_dump) {
    auto f = open_output(dir / "clusters.tsv");
    write_cluster_dump(f, res.partition, aset.catalog);
  }
  if (cfg.dump_draws) {
    std::filesystem::create_directories(dir / "draws");
    for (std::size_t j = 0; j < res.ensembles.size(); ++j) {
      auto f = open_output(dir / "draws" /
                           fmt::format("cluster_{}.tsv", res.partition.clusters[j].label + 1));
      write_draws(f, res.ensembles[j]);
    }
  }
  return res;
}

}  // namespace jointde

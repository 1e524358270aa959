#include "jointde/decisions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace jointde {

RuleSpec RuleSpec::parse(const std::string& text, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("FDR level must lie in (0,1)");
  RuleSpec s;
  s.alpha = alpha;
  if (text == "threshold") {
    s.rule = DecisionRule::Threshold;
  } else if (text == "naive") {
    s.rule = DecisionRule::Naive;
  } else if (text.rfind("loss:", 0) == 0) {
    s.rule = DecisionRule::Loss;
    std::size_t used = 0;
    try {
      s.cost = std::stod(text.substr(5), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 5 || !(s.cost > 0.0))
      throw std::invalid_argument("loss rule needs a positive cost, e.g. loss:19");
  } else {
    throw std::invalid_argument("unknown decision rule '" + text + "'");
  }
  return s;
}

std::string RuleSpec::describe() const {
  switch (rule) {
    case DecisionRule::Threshold:
      return fmt::format("threshold(alpha={})", alpha);
    case DecisionRule::Naive:
      return fmt::format("naive(alpha={})", alpha);
    case DecisionRule::Loss:
      return fmt::format("loss(cost={})", cost);
  }
  return {};
}

std::vector<std::size_t> rank_order(std::span<const double> probs,
                                    std::span<const std::uint8_t> eligible) {
  if (!eligible.empty() && eligible.size() != probs.size())
    throw std::invalid_argument("eligibility mask has wrong length");
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  auto ok = [&](std::size_t i) { return eligible.empty() || eligible[i]; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ok(a) != ok(b)) return ok(a);
    return probs[a] > probs[b];
  });
  return order;
}

namespace {

DecisionReport finish(std::span<const double> probs, std::span<const std::size_t> order,
                      std::size_t accepted, const RuleSpec& spec) {
  DecisionReport rep;
  rep.spec = spec;
  rep.decision.assign(probs.size(), 0);
  rep.rank.assign(probs.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) rep.rank[order[r]] = r + 1;
  double miss = 0.0;
  for (std::size_t r = 0; r < accepted; ++r) {
    rep.decision[order[r]] = 1;
    miss += 1.0 - probs[order[r]];
  }
  rep.discoveries = accepted;
  rep.expected_fdr = accepted ? miss / static_cast<double>(accepted) : 0.0;
  return rep;
}

std::size_t eligible_count(std::size_t n, std::span<const std::uint8_t> eligible) {
  if (eligible.empty()) return n;
  return static_cast<std::size_t>(std::count(eligible.begin(), eligible.end(), 1));
}

DecisionReport cutoff_rule(std::span<const double> probs, double cutoff,
                           std::span<const std::uint8_t> eligible, const RuleSpec& spec) {
  const auto order = rank_order(probs, eligible);
  const std::size_t n = eligible_count(probs.size(), eligible);
  std::size_t accepted = 0;
  while (accepted < n && probs[order[accepted]] > cutoff) ++accepted;
  return finish(probs, order, accepted, spec);
}

}  // namespace

DecisionReport fdr_threshold_select(std::span<const double> probs, double alpha,
                                    std::span<const std::uint8_t> eligible) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("FDR level must lie in (0,1)");
  const auto order = rank_order(probs, eligible);
  const std::size_t n = eligible_count(probs.size(), eligible);
  std::size_t g = 0;
  double miss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    miss += 1.0 - probs[order[k]];
    if (miss / static_cast<double>(k + 1) <= alpha) g = k + 1;
  }
  return finish(probs, order, g, {DecisionRule::Threshold, alpha, 0.0});
}

DecisionReport naive_rule(std::span<const double> probs, double alpha,
                          std::span<const std::uint8_t> eligible) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("FDR level must lie in (0,1)");
  return cutoff_rule(probs, 1.0 - alpha, eligible, {DecisionRule::Naive, alpha, 0.0});
}

double loss_threshold(double cost) {
  if (!(cost > 0.0)) throw std::invalid_argument("cost must be positive");
  return cost / (cost + 1.0);
}

DecisionReport loss_rule(std::span<const double> probs, double cost,
                         std::span<const std::uint8_t> eligible) {
  return cutoff_rule(probs, loss_threshold(cost), eligible, {DecisionRule::Loss, 0.0, cost});
}

DecisionReport apply_rule(const RuleSpec& spec, std::span<const double> probs,
                          std::span<const std::uint8_t> eligible) {
  switch (spec.rule) {
    case DecisionRule::Threshold:
      return fdr_threshold_select(probs, spec.alpha, eligible);
    case DecisionRule::Naive:
      return naive_rule(probs, spec.alpha, eligible);
    case DecisionRule::Loss:
      return loss_rule(probs, spec.cost, eligible);
  }
  throw std::logic_error("unreachable decision rule");
}

std::vector<std::uint8_t> fold_change_filter(std::span<const std::optional<double>> log2fc,
                                             double t) {
  std::vector<std::uint8_t> out(log2fc.size(), 0);
  for (std::size_t k = 0; k < log2fc.size(); ++k)
    out[k] = log2fc[k] && std::isfinite(*log2fc[k]) && std::abs(*log2fc[k]) >= t;
  return out;
}

}  // namespace jointde

#pragma once
// DE calls from posterior probabilities: the Bayesian FDR threshold rule, the
// naive 1 - alpha cutoff and the loss-based c / (c + 1) cutoff.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jointde {

enum class DecisionRule { Threshold, Naive, Loss };

struct RuleSpec {
  DecisionRule rule = DecisionRule::Threshold;
  double alpha = 0.05;  // threshold and naive rules
  double cost = 19.0;   // loss rule

  /// "threshold", "naive" or "loss:C".
  static RuleSpec parse(const std::string& text, double alpha);
  std::string describe() const;
};

struct DecisionReport {
  std::vector<std::uint8_t> decision;  // per input entry
  std::vector<std::size_t> rank;       // 1-based position in the descending order
  std::size_t discoveries = 0;
  double expected_fdr = 0.0;  // mean of 1 - p over the accepted set, 0 if empty
  RuleSpec spec;
};

/// Descending by probability, ties by ascending index. Entries not eligible
/// (fold-change filter) are ranked after all eligible ones.
std::vector<std::size_t> rank_order(std::span<const double> probs,
                                    std::span<const std::uint8_t> eligible = {});

DecisionReport fdr_threshold_select(std::span<const double> probs, double alpha,
                                    std::span<const std::uint8_t> eligible = {});
DecisionReport naive_rule(std::span<const double> probs, double alpha,
                          std::span<const std::uint8_t> eligible = {});
double loss_threshold(double cost);
DecisionReport loss_rule(std::span<const double> probs, double cost,
                         std::span<const std::uint8_t> eligible = {});

DecisionReport apply_rule(const RuleSpec& spec, std::span<const double> probs,
                          std::span<const std::uint8_t> eligible = {});

/// Eligibility mask |log2fc| >= t; missing fold changes are ineligible.
std::vector<std::uint8_t> fold_change_filter(std::span<const std::optional<double>> log2fc,
                                             double t);

}  // namespace jointde

#pragma once

#include <cstddef>
#include <span>

#include "ldbounds/network.hpp"

namespace ldb {

/// Largest input count accepted by the enumeration routines (cost is 2^N).
struct EnumerationLimit {
  std::size_t max_inputs = 20;
};

/// Pr[Y_k = v_k for all findings], by summing over all 2^N input settings.
/// Throws EnumerationLimitError if N exceeds the limit.
double exact_marginal(const TwoLayerNetwork& net, const Evidence& evidence,
                      EnumerationLimit limit = {});

/// Pr[X_j = 1 | evidence] via Bayes rule on the two clamped networks.
/// Throws ImpossibleEvidence when the evidence has probability zero.
double exact_posterior(const TwoLayerNetwork& net, std::size_t j, const Evidence& evidence,
                       EnumerationLimit limit = {});

/// Pr[|(1/N) sum_j theta_j (X_j - p_j)| > eps] for independent X_j ~ Bernoulli(p_j).
double exact_deviation_prob(std::span<const double> weights, std::span<const double> bias,
                            double epsilon, EnumerationLimit limit = {});

}  // namespace ldb

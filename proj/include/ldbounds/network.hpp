#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ldbounds/rng.hpp"
#include "ldbounds/transfer.hpp"

namespace ldb {

/// Two-layer belief network of binary units.
///
/// Inputs X_j are independent Bernoulli(p_j). Given the inputs, output Y_i is
/// Bernoulli(f(c_i + sum_j theta_ij X_j)) with theta_ij = tau_ij / weight_scale.
/// The weight scale is the input count the network was built with; clamping
/// an input removes it from the random layer but keeps the scale, so the
/// remaining effective weights are unchanged.
///
/// Immutable after construction.
class TwoLayerNetwork {
 public:
  /// Validates and builds a network.  `tau` is M rows of N unscaled weights.
  /// An empty `offset` means all offsets are zero.
  static TwoLayerNetwork build(const std::vector<std::vector<double>>& tau,
                               std::vector<double> bias, std::vector<double> offset,
                               TransferFunction transfer);

  /// Same, with an explicit weight scale (used when reloading clamped networks).
  static TwoLayerNetwork build(const std::vector<std::vector<double>>& tau,
                               std::vector<double> bias, std::vector<double> offset,
                               TransferFunction transfer, std::size_t weight_scale);

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t n_outputs() const noexcept { return n_outputs_; }
  std::size_t weight_scale() const noexcept { return weight_scale_; }
  const TransferFunction& transfer() const noexcept { return transfer_; }

  double tau(std::size_t i, std::size_t j) const { return tau_[i * n_inputs_ + j]; }
  std::span<const double> tau_row(std::size_t i) const {
    return {tau_.data() + i * n_inputs_, n_inputs_};
  }
  /// Effective weight theta_ij.
  double weight(std::size_t i, std::size_t j) const {
    return tau(i, j) / static_cast<double>(weight_scale_);
  }
  std::span<const double> bias() const noexcept { return bias_; }
  std::span<const double> offset() const noexcept { return offset_; }
  std::vector<std::vector<double>> tau_rows() const;

  /// mu_i = c_i + sum_j theta_ij p_j
  double mean(std::size_t i) const;
  /// chi_i^2 = (1/scale) sum_j tau_ij^2 Phi(p_j)
  double chi_squared(std::size_t i) const;
  /// c_i + sum_j theta_ij x_j for a full input assignment.
  double weighted_sum(std::size_t i, std::span<const std::uint8_t> inputs) const;

  friend bool operator==(const TwoLayerNetwork&, const TwoLayerNetwork&) = default;

 private:
  TwoLayerNetwork(std::size_t n_inputs, std::size_t n_outputs, std::size_t weight_scale,
                  std::vector<double> tau, std::vector<double> bias,
                  std::vector<double> offset, TransferFunction transfer);
  void validate() const;

  std::size_t n_inputs_;
  std::size_t n_outputs_;
  std::size_t weight_scale_;
  std::vector<double> tau_;  // row-major M x N
  std::vector<double> bias_;
  std::vector<double> offset_;
  TransferFunction transfer_;

  friend TwoLayerNetwork clamp_input(const TwoLayerNetwork&, std::size_t, bool);
};

struct Finding {
  std::size_t output;
  bool value;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Observed values for a set of distinct output units.
class Evidence {
 public:
  Evidence() = default;
  /// Throws InvalidArgument on an empty list or repeated output index.
  explicit Evidence(std::vector<Finding> findings);

  std::span<const Finding> findings() const noexcept { return findings_; }
  std::size_t size() const noexcept { return findings_.size(); }
  const Finding& operator[](std::size_t k) const { return findings_[k]; }

  /// Throws InvalidArgument unless every index is an output of `net`.
  void check_against(const TwoLayerNetwork& net) const;

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::vector<Finding> findings_;
};

/// Evidence on all outputs 0..M-1 taken from a bit vector.
Evidence full_evidence(std::span<const std::uint8_t> bits);

/// Gaussian random network: tau_ij i.i.d. standard normal (absolute values for
/// noisy-OR), all biases equal to `bias_value`, zero offsets.
TwoLayerNetwork random_network(std::size_t n_inputs, std::size_t n_outputs, double bias_value,
                               TransferFunction transfer, std::uint64_t seed);

/// Conditions on X_j = value by folding the input into the output offsets.
/// The result has N - 1 inputs and the same weight scale.
TwoLayerNetwork clamp_input(const TwoLayerNetwork& net, std::size_t j, bool value);

struct JointSample {
  std::vector<std::uint8_t> inputs;
  std::vector<std::uint8_t> outputs;
};

JointSample sample_joint(const TwoLayerNetwork& net, Rng& rng);

}  // namespace ldb

#pragma once

#include <cstddef>
#include <cstdint>

#include "uowsn/netgraph.hpp"

namespace uowsn::connectivity {

/// Parameters of the closed-form connectivity model on a unit-area network.
/// `range` is normalized by the side of the square deployment area.
struct ConnectivityParams {
  double M = 0.0;
  double range = 0.0;
  double scan_angle = 0.0;

  /// Q = -scan_angle * M * range^2 / 2; minus the mean descendant count.
  double Q() const { return -scan_angle * M * range * range / 2.0; }

  /// Normalizes a range in meters by the area side.
  static ConnectivityParams from_meters(std::size_t M, double range_m,
                                        double area_side, double scan_angle);
};

/// A probability from one of the asymptotic closed forms. They can stray
/// outside [0, 1] far from their regime; `value` is clamped and `clamped`
/// records that it happened.
struct Probability {
  double value = 0.0;
  bool clamped = false;
  /// The normalized range is not small (> 0.25); asymptotics are unreliable.
  bool outside_regime = false;

  operator double() const { return value; }
};

/// Pr[D_i >= 1] = 1 - exp(Q).
Probability p_forward(const ConnectivityParams& p);

/// Pr[A_i >= 1 | D_i >= 1], single bidirectional-link closed form. Needs M >= 2;
/// Q = 0 throws std::domain_error.
Probability p_backward_given_forward(const ConnectivityParams& p);

/// p_forward * p_backward_given_forward^M, the bracket alone raised to M.
Probability p_connected(const ConnectivityParams& p);

/// (p_forward * p_backward_given_forward)^M: every node independently
/// non-obscured. Kept as the comparison reading of the exponent placement.
Probability p_connected_per_node(const ConnectivityParams& p);

/// Pr[D_i >= k], the Poisson(-Q) upper tail.
Probability p_forward_k(const ConnectivityParams& p, std::size_t k);

/// The three subtracted sums of Pr[A_i >= 2 | D_i >= 2].
struct TwoConnectivityTerms {
  double s1 = 0.0;  // A_i = 0, no bidirectional link
  double s2 = 0.0;  // A_i = 1, no bidirectional link
  double s3 = 0.0;  // A_i = 1, one bidirectional link
};

/// Closed forms of the three sums; `s2` is the form that sums the series
/// term by term (see README, "Two-connectivity").
TwoConnectivityTerms two_connectivity_terms(const ConnectivityParams& p);

/// The S2 closed form exactly as it is usually quoted; it does not reduce to 0
/// at scan_angle = 2pi. Exposed for comparison only.
double s2_as_quoted(const ConnectivityParams& p);

/// Pr[A_i >= 2 | D_i >= 2] = 1 - S1 - S2 - S3. Needs M >= 3; a vanishing
/// 1 - (1 - Q) exp(Q) throws std::domain_error.
Probability p_backward_given_forward_2(const ConnectivityParams& p);

/// Network-level probability for k in {1, 2}: p_forward_k * bracket^M.
Probability p_connected_k(const ConnectivityParams& p, std::size_t k);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
};

struct MonteCarloOptions {
  std::size_t trials = 1000;
  netgraph::BorderMode border = netgraph::BorderMode::kTorus;
  std::uint64_t seed = 0;
  /// Distinguishes independent experiments under one root seed.
  std::uint64_t stream = 0;
  /// 0 = hardware concurrency. Results never depend on it.
  unsigned threads = 1;
};

/// Fraction of deployed graphs that are k-connected, with binomial standard
/// error. Trial t always uses substream (stream, t) of the seed.
MonteCarloEstimate monte_carlo_p_connected(std::size_t M, double area_side,
                                           double scan_angle, double range,
                                           std::size_t k,
                                           const MonteCarloOptions& options);

/// Node-level frequencies pooled over all nodes of all trials.
struct NodeFrequencies {
  std::size_t node_samples = 0;
  /// Pr[D_i >= k]
  double forward = 0.0;
  double forward_stderr = 0.0;
  /// Pr[A_i >= k | D_i >= k]
  double backward_given_forward = 0.0;
  double backward_given_forward_stderr = 0.0;
};

NodeFrequencies monte_carlo_node_frequencies(std::size_t M, double area_side,
                                             double scan_angle, double range,
                                             std::size_t k,
                                             const MonteCarloOptions& options);

}  // namespace uowsn::connectivity

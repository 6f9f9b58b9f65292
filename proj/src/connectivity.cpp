#include "uowsn/connectivity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "uowsn/parallel.hpp"
#include "uowsn/rng.hpp"

namespace uowsn::connectivity {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRegimeLimit = 0.25;

Probability finish(double raw, const ConnectivityParams& p) {
  Probability out;
  out.outside_regime = p.range > kRegimeLimit;
  if (std::isnan(raw)) {
    out.value = 0.0;
    out.clamped = true;
  } else if (raw < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  } else if (raw > 1.0) {
    out.value = 1.0;
    out.clamped = true;
  } else {
    out.value = raw;
  }
  return out;
}

void check_params(const ConnectivityParams& p) {
  if (!(p.M >= 0.0) || !(p.range >= 0.0) || !(p.scan_angle >= 0.0) ||
      p.scan_angle > 2.0 * kPi) {
    throw std::domain_error(
        "connectivity params need M >= 0, range >= 0, scan_angle in [0, 2pi]");
  }
}

// Exponent shared by every bidirectional-link sum:
// -Q (2pi - phi) / (pi (2 - phi R^2)). Exactly 0 at phi = 2pi.
double reverse_exponent(const ConnectivityParams& p) {
  const double phi_r2 = p.scan_angle * p.range * p.range;
  return -p.Q() * (2.0 * kPi - p.scan_angle) / (kPi * (2.0 - phi_r2));
}

}  // namespace

ConnectivityParams ConnectivityParams::from_meters(std::size_t M, double range_m,
                                                   double area_side,
                                                   double scan_angle) {
  if (!(area_side > 0.0)) throw std::domain_error("area_side must be > 0");
  return ConnectivityParams{static_cast<double>(M), range_m / area_side,
                            scan_angle};
}

Probability p_forward(const ConnectivityParams& p) {
  check_params(p);
  return finish(1.0 - std::exp(p.Q()), p);
}

Probability p_backward_given_forward(const ConnectivityParams& p) {
  check_params(p);
  if (p.M < 2.0) throw std::domain_error("p_backward_given_forward needs M >= 2");
  const double Q = p.Q();
  if (Q == 0.0) throw std::domain_error("p_backward_given_forward: Q = 0");
  const double eQ = std::exp(Q);
  const double outside = 1.0 - p.scan_angle * p.range * p.range / 2.0;
  const double obscured = eQ / (1.0 - eQ) * std::pow(outside, p.M - 1.0) *
                          std::expm1(reverse_exponent(p));
  return finish(1.0 - obscured, p);
}

Probability p_connected(const ConnectivityParams& p) {
  const Probability forward = p_forward(p);
  const Probability bracket = p_backward_given_forward(p);
  Probability out = finish(forward.value * std::pow(bracket.value, p.M), p);
  out.clamped = out.clamped || forward.clamped || bracket.clamped;
  return out;
}

Probability p_connected_per_node(const ConnectivityParams& p) {
  const Probability forward = p_forward(p);
  const Probability bracket = p_backward_given_forward(p);
  Probability out = finish(std::pow(forward.value * bracket.value, p.M), p);
  out.clamped = out.clamped || forward.clamped || bracket.clamped;
  return out;
}

Probability p_forward_k(const ConnectivityParams& p, std::size_t k) {
  check_params(p);
  if (k < 1) throw std::domain_error("p_forward_k needs k >= 1");
  const double mean = -p.Q();
  double term = std::exp(p.Q());
  double below = term;
  for (std::size_t j = 1; j < k; ++j) {
    term *= mean / static_cast<double>(j);
    below += term;
  }
  return finish(1.0 - below, p);
}

TwoConnectivityTerms two_connectivity_terms(const ConnectivityParams& p) {
  check_params(p);
  if (p.M < 3.0) throw std::domain_error("two-connectivity terms need M >= 3");
  const double Q = p.Q();
  const double eQ = std::exp(Q);
  const double denom = 1.0 - (1.0 - Q) * eQ;
  if (denom == 0.0) {
    throw std::domain_error("two-connectivity terms: 1 - (1 - Q) exp(Q) = 0");
  }
  const double c = eQ / denom;
  const double u = p.scan_angle * p.range * p.range / 2.0;
  const double outside = 1.0 - u;
  const double y = reverse_exponent(p);
  const double ey_m1 = std::expm1(y);
  const double tail2 = ey_m1 - y;  // e^y - 1 - y

  TwoConnectivityTerms t;
  t.s1 = c * std::pow(outside, p.M - 1.0) * tail2;
  t.s2 = c * u * std::pow(outside, p.M - 2.0) *
         ((p.M - 1.0) * tail2 - y * ey_m1);
  t.s3 = c * (p.M * p.scan_angle * p.scan_angle * p.range * p.range /
              (4.0 * kPi)) *
         std::pow(outside, p.M - 2.0) * ey_m1;
  return t;
}

double s2_as_quoted(const ConnectivityParams& p) {
  check_params(p);
  const double Q = p.Q();
  const double eQ = std::exp(Q);
  const double c = eQ / (1.0 - (1.0 - Q) * eQ);
  const double u = p.scan_angle * p.range * p.range / 2.0;
  const double y = reverse_exponent(p);
  const double ey = std::exp(y);
  return c * u * std::pow(1.0 - u, p.M - 2.0) *
         ((p.M - 1.0) * (ey - y) + y * (ey - 1.0) - 1.0);
}

Probability p_backward_given_forward_2(const ConnectivityParams& p) {
  const auto t = two_connectivity_terms(p);
  return finish(1.0 - t.s1 - t.s2 - t.s3, p);
}

Probability p_connected_k(const ConnectivityParams& p, std::size_t k) {
  Probability forward, bracket;
  if (k == 1) {
    forward = p_forward(p);
    bracket = p_backward_given_forward(p);
  } else if (k == 2) {
    forward = p_forward_k(p, 2);
    bracket = p_backward_given_forward_2(p);
  } else {
    throw std::domain_error("closed forms exist for k = 1 and k = 2 only");
  }
  Probability out = finish(forward.value * std::pow(bracket.value, p.M), p);
  out.clamped = out.clamped || forward.clamped || bracket.clamped;
  return out;
}

MonteCarloEstimate monte_carlo_p_connected(std::size_t M, double area_side,
                                           double scan_angle, double range,
                                           std::size_t k,
                                           const MonteCarloOptions& options) {
  if (options.trials < 1) throw std::domain_error("trials must be >= 1");
  std::vector<char> connected(options.trials, 0);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    Rng rng = make_substream(options.seed, options.stream, t);
    const auto g = netgraph::deploy(M, area_side, scan_angle, range, rng,
                                    {options.border, false});
    connected[t] = netgraph::is_k_connected(g, k) ? 1 : 0;
  });

  MonteCarloEstimate out;
  out.trials = options.trials;
  for (char c : connected) out.successes += static_cast<std::size_t>(c);
  const double n = static_cast<double>(out.trials);
  out.estimate = static_cast<double>(out.successes) / n;
  out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
  return out;
}

NodeFrequencies monte_carlo_node_frequencies(std::size_t M, double area_side,
                                             double scan_angle, double range,
                                             std::size_t k,
                                             const MonteCarloOptions& options) {
  if (options.trials < 1) throw std::domain_error("trials must be >= 1");
  struct Counts {
    std::size_t nodes = 0, forward = 0, both = 0;
  };
  std::vector<Counts> per_trial(options.trials);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    Rng rng = make_substream(options.seed, options.stream, t);
    const auto g = netgraph::deploy(M, area_side, scan_angle, range, rng,
                                    {options.border, false});
    Counts c;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool fwd = g.out_degree(i) >= k;
      ++c.nodes;
      if (fwd) {
        ++c.forward;
        if (g.in_degree(i) >= k) ++c.both;
      }
    }
    per_trial[t] = c;
  });

  Counts total;
  for (const auto& c : per_trial) {
    total.nodes += c.nodes;
    total.forward += c.forward;
    total.both += c.both;
  }
  NodeFrequencies out;
  out.node_samples = total.nodes;
  const double n = static_cast<double>(total.nodes);
  out.forward = static_cast<double>(total.forward) / n;
  out.forward_stderr = std::sqrt(out.forward * (1.0 - out.forward) / n);
  if (total.forward > 0) {
    const double nf = static_cast<double>(total.forward);
    out.backward_given_forward = static_cast<double>(total.both) / nf;
    out.backward_given_forward_stderr = std::sqrt(
        out.backward_given_forward * (1.0 - out.backward_given_forward) / nf);
  }
  return out;
}

}  // namespace uowsn::connectivity

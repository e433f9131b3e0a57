#pragma once

#include <Eigen/Dense>

#include "rwle/graph.hpp"

namespace rwle {

// Lazy-walk quantities. P is column-stochastic with columns indexed by the
// source node, so distributions evolve as pi_{t+1} = P * pi_t.
struct WalkAnalysis {
  Eigen::MatrixXd P;
  Eigen::VectorXd pi_star;
  long t_mix = -1;
};

Eigen::MatrixXd transition_matrix(const Graph& g);
Eigen::VectorXd stationary_distribution(const Graph& g);

struct MixingOptions {
  long max_steps = 500000;
  long max_n = 4096;  // dense matrix-power budget
  bool check_monotone = true;
};

// Smallest t such that max_i || P^t e_i - pi_star ||_inf <= 1/(2n), by
// iterated multiplication testing all n starts per step. Asserts along the
// way that the max-over-starts distance never increases.
long mixing_time_exact(const Graph& g, const MixingOptions& opt = {});

WalkAnalysis analyze_walk(const Graph& g, const MixingOptions& opt = {});

struct CutResult {
  long cut_edges = 0;
  long vol_small = 0;
  long phi_num = 0, phi_den = 1;  // exact rational phi = cut_edges / vol_small
  std::vector<int> best_cut;
  double phi() const { return static_cast<double>(phi_num) / static_cast<double>(phi_den); }
};

// Minimum cut-conductance over all 2^(n-1)-1 proper cuts. Capped at n <= 24;
// larger graphs get a SizeLimitError pointing at the spectral bounds.
CutResult conductance_exact(const Graph& g);

struct SpectralBounds {
  double lower = 0, upper = 0;
  double gap = 0;  // spectral gap of the degree-symmetrized lazy operator
};

// Cheeger sandwich (gap/2, sqrt(2*gap)) around the conductance.
SpectralBounds conductance_spectral_bounds(const Graph& g);

struct SandwichReport {
  double phi_lo = 0, phi_hi = 0;  // equal when the exact oracle was usable
  bool exact_phi = false;
  long t_mix = -1;
  double c_lo = 0, c_hi = 0;
  bool pass = false;
};

// Checks c_lo/phi <= t_mix <= c_hi/phi^2. Uses the exact conductance when
// n <= 24, otherwise the spectral interval (lower bound for the upper test,
// upper bound for the lower test).
SandwichReport check_phimix_sandwich(const Graph& g, double c_lo, double c_hi,
                                     const MixingOptions& opt = {});

}  // namespace rwle

#include "rwle/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rwle {

Eigen::MatrixXd transition_matrix(const Graph& g) {
  if (!g.connected()) throw PreconditionError("transition matrix needs a connected graph");
  const int n = g.n();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    P(u, u) = 0.5;
    double step = 1.0 / (2.0 * g.degree(u));
    for (int p = 1; p <= g.degree(u); ++p) P(g.peer(u, p).node, u) = step;
  }
  return P;
}

Eigen::VectorXd stationary_distribution(const Graph& g) {
  if (!g.connected()) throw PreconditionError("stationary distribution needs a connected graph");
  const int n = g.n();
  Eigen::VectorXd pi(n);
  double denom = 2.0 * g.m();
  for (int u = 0; u < n; ++u) pi(u) = g.degree(u) / denom;
  return pi;
}

long mixing_time_exact(const Graph& g, const MixingOptions& opt) {
  const int n = g.n();
  if (n > opt.max_n)
    throw SizeLimitError("mixing_time_exact: n exceeds the dense matrix-power budget");
  Eigen::MatrixXd P = transition_matrix(g);
  Eigen::VectorXd pi = stationary_distribution(g);
  const double thresh = 1.0 / (2.0 * n);

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);  // columns = P^t e_i
  double prev = std::numeric_limits<double>::infinity();
  for (long t = 0; t <= opt.max_steps; ++t) {
    double dist = (M.colwise() - pi).cwiseAbs().maxCoeff();
    if (opt.check_monotone && dist > prev + 1e-12)
      throw NumericError("max-over-starts distance increased at t=" + std::to_string(t));
    prev = dist;
    if (dist <= thresh) return t;
    M = P * M;
  }
  throw NonConvergenceError("mixing time iteration budget exceeded");
}

WalkAnalysis analyze_walk(const Graph& g, const MixingOptions& opt) {
  WalkAnalysis wa;
  wa.P = transition_matrix(g);
  wa.pi_star = stationary_distribution(g);
  wa.t_mix = mixing_time_exact(g, opt);
  return wa;
}

CutResult conductance_exact(const Graph& g) {
  const int n = g.n();
  if (n > 24) throw SizeLimitError("conductance_exact capped at n <= 24; use spectral bounds");
  if (!g.connected()) throw PreconditionError("conductance needs a connected graph");
  if (n < 2) throw InvalidSizeError("conductance needs n >= 2");

  std::vector<long> deg(n);
  long vol_total = 0;
  for (int u = 0; u < n; ++u) {
    deg[u] = g.degree(u);
    vol_total += deg[u];
  }

  // Gray-code walk over all subsets of {1..n-1} (node 0 stays outside so each
  // cut is visited once); each step flips one node and updates cut size and
  // volume in O(deg).
  std::vector<char> inside(n, 0);
  long cut = 0, vol = 0;
  long best_num = 1, best_den = 0;  // +infinity
  uint64_t best_mask = 0;
  long best_cut_edges = 0, best_vol = 0;

  const uint64_t total = 1ULL << (n - 1);
  uint64_t gray_prev = 0;
  for (uint64_t i = 1; i < total; ++i) {
    uint64_t gray = i ^ (i >> 1);
    int flip = std::countr_zero(gray ^ gray_prev) + 1;  // node index to toggle
    gray_prev = gray;
    bool entering = !inside[flip];
    inside[flip] = entering;
    vol += entering ? deg[flip] : -deg[flip];
    for (int p = 1; p <= g.degree(flip); ++p) {
      int v = g.peer(flip, p).node;
      bool same = inside[v] == inside[flip];
      cut += same ? -1 : 1;
    }
    long side = std::min(vol, vol_total - vol);
    // compare cut/side < best_num/best_den without division
    if (side > 0 && cut * best_den < best_num * side) {
      best_num = cut;
      best_den = side;
      best_mask = gray;
      best_cut_edges = cut;
      best_vol = side;
    }
  }

  CutResult r;
  r.cut_edges = best_cut_edges;
  r.vol_small = best_vol;
  long gcd = std::gcd(best_num, best_den);
  r.phi_num = best_num / gcd;
  r.phi_den = best_den / gcd;
  std::vector<int> cut_nodes;
  long cut_vol = 0;
  for (int i = 1; i < n; ++i)
    if (best_mask & (1ULL << (i - 1))) {
      cut_nodes.push_back(i);
      cut_vol += deg[i];
    }
  if (cut_vol <= vol_total - cut_vol) {
    r.best_cut = std::move(cut_nodes);
  } else {  // report the smaller-volume side as the witness
    std::vector<char> mark(n, 0);
    for (int u : cut_nodes) mark[u] = 1;
    for (int u = 0; u < n; ++u)
      if (!mark[u]) r.best_cut.push_back(u);
  }
  return r;
}

SpectralBounds conductance_spectral_bounds(const Graph& g) {
  if (!g.connected()) throw PreconditionError("spectral bounds need a connected graph");
  const int n = g.n();
  Eigen::VectorXd inv_sqrt_deg(n);
  for (int u = 0; u < n; ++u) inv_sqrt_deg(u) = 1.0 / std::sqrt(static_cast<double>(g.degree(u)));
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    L(u, u) = 0.5;
    for (int p = 1; p <= g.degree(u); ++p) {
      int v = g.peer(u, p).node;
      L(u, v) += 0.5 * inv_sqrt_deg(u) * inv_sqrt_deg(v);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
  if (solver.info() != Eigen::Success) {
    double residual = (L - L.transpose()).cwiseAbs().maxCoeff();
    throw NumericError("eigenvalue iteration failed to converge; asymmetry residual " +
                       std::to_string(residual));
  }
  double lambda2 = solver.eigenvalues()(n - 2);
  SpectralBounds b;
  b.gap = 1.0 - lambda2;
  b.lower = b.gap / 2.0;
  b.upper = std::sqrt(2.0 * b.gap);
  return b;
}

SandwichReport check_phimix_sandwich(const Graph& g, double c_lo, double c_hi,
                                     const MixingOptions& opt) {
  SandwichReport rep;
  rep.c_lo = c_lo;
  rep.c_hi = c_hi;
  if (g.n() <= 24) {
    double phi = conductance_exact(g).phi();
    rep.phi_lo = rep.phi_hi = phi;
    rep.exact_phi = true;
  } else {
    SpectralBounds b = conductance_spectral_bounds(g);
    rep.phi_lo = b.lower;
    rep.phi_hi = b.upper;
  }
  rep.t_mix = mixing_time_exact(g, opt);
  rep.pass = (c_lo / rep.phi_hi <= rep.t_mix) &&
             (rep.t_mix <= c_hi / (rep.phi_lo * rep.phi_lo));
  return rep;
}

}  // namespace rwle

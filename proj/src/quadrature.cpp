#include "freebound/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "freebound/types.hpp"

namespace freebound {

namespace {

// Newton iteration on P_n with the three-term recurrence. Initial guesses are
// the Chebyshev-like estimates; converges in a handful of steps.
GaussLegendre compute_gl(int n) {
  GaussLegendre r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n / 2 + n % 2; ++i) {
    long double x = std::cos(M_PI * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = x;
      for (int k = 2; k <= n; ++k) {
        long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0L);
      long double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - x * x) * pp * pp);
    r.nodes[i] = static_cast<double>(-x);  // ascending order
    r.nodes[n - 1 - i] = static_cast<double>(x);
    r.weights[i] = static_cast<double>(w);
    r.weights[n - 1 - i] = static_cast<double>(w);
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussLegendre& GaussLegendre::get(int n) {
  if (n < 1) throw Error("quadrature order must be positive");
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

QuadratureRule::QuadratureRule(Eigen::VectorXd lo, Eigen::VectorXd hi,
                               int points_per_axis)
    : lo_(std::move(lo)), hi_(std::move(hi)), points_(points_per_axis) {
  if (lo_.size() != hi_.size()) throw Error("quadrature box dims mismatch");
  for (int i = 0; i < lo_.size(); ++i)
    if (!(hi_[i] > lo_[i])) throw Error("quadrature box is empty");
}

long QuadratureRule::total_points() const {
  long t = 1;
  for (int i = 0; i < dim(); ++i) t *= points_;
  return t;
}

void QuadratureRule::for_each_node(
    const std::function<void(const Eigen::VectorXd&, double)>& cb) const {
  const int d = dim();
  const auto& gl = GaussLegendre::get(points_);
  Eigen::VectorXd mid = 0.5 * (lo_ + hi_);
  Eigen::VectorXd rad = 0.5 * (hi_ - lo_);
  std::vector<int> idx(d, 0);
  Eigen::VectorXd p(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      p[i] = mid[i] + rad[i] * gl.nodes[idx[i]];
      w *= rad[i] * gl.weights[idx[i]];
    }
    cb(p, w);
    int ax = 0;
    while (ax < d && ++idx[ax] == points_) idx[ax++] = 0;
    if (ax == d) break;
  }
}

double QuadratureRule::integrate(
    const std::function<double(const Eigen::VectorXd&)>& f) const {
  long double acc = 0.0L;
  for_each_node([&](const Eigen::VectorXd& p, double w) { acc += (long double)(w * f(p)); });
  return static_cast<double>(acc);
}

double RefinementPair::rel_change() const {
  const double scale = std::max({std::fabs(coarse), std::fabs(fine), 1e-300});
  return std::fabs(fine - coarse) / scale;
}

RefinementPair integrate_refined(
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int points,
    const std::function<double(const Eigen::VectorXd&)>& f) {
  RefinementPair r;
  r.coarse = QuadratureRule(lo, hi, points).integrate(f);
  r.fine = QuadratureRule(lo, hi, 2 * points).integrate(f);
  return r;
}

}  // namespace freebound

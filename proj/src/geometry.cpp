#include "freebound/geometry.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "freebound/fd.hpp"
#include "freebound/types.hpp"

namespace freebound {

namespace {

using VecL = std::vector<long double>;

Eigen::VectorXd abs_steps(const ParametricHypersurface& s, double h) {
  Eigen::VectorXd steps(s.dim);
  for (int i = 0; i < s.dim; ++i) steps[i] = h * s.box.length(i);
  return steps;
}

VecL chart_eval(const ParametricHypersurface& s, const VecL& p) {
  VecL out(s.dim + 1);
  s.chart(p.data(), out.data());
  return out;
}

using VecXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using MatXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct ChartJetL {
  VecXl point;
  MatXl d1;
  std::vector<VecXl> d2;  // row-major, like ChartJet
};

// Chart jet by finite differences in extended precision. Centered stencils
// where the box allows, shifted ladders of one extra node otherwise (keeps
// both derivative orders at 4). The unrounded result feeds the extended
// sampler; fd_jet below rounds it for the double pipeline.
ChartJetL fd_jet_l(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                   const JetOptions& opt) {
  const int n = s.dim;
  const int m = n + 1;
  ChartJetL jet;
  jet.point.resize(m);
  jet.d1.resize(m, n);
  jet.d2.assign(n * n, VecXl::Zero(m));

  VecL base(n);
  for (int i = 0; i < n; ++i) base[i] = p[i];
  VecL F0 = chart_eval(s, base);
  for (int k = 0; k < m; ++k) jet.point[k] = F0[k];

  std::vector<fd::Stencil> st(n);
  Eigen::VectorXd hs = abs_steps(s, opt.h);
  for (int i = 0; i < n; ++i) {
    const long double lo = s.box.lo[i], hi = s.box.hi[i];
    const long double hi_step = hs[i];
    const bool per = s.box.periodic[i];
    const int half = opt.points / 2;
    bool centered_fits =
        per || (p[i] - half * hs[i] >= s.box.lo[i] - 1e-14 &&
                p[i] + half * hs[i] <= s.box.hi[i] + 1e-14);
    const int pts = centered_fits ? opt.points : opt.points + 1;
    st[i] = fd::make_stencil(p[i], lo, hi, per, hi_step, pts);
  }

  // Single-axis sweeps: first and pure second derivatives.
  std::vector<std::vector<VecL>> axis_vals(n);
  for (int i = 0; i < n; ++i) {
    const auto& sti = st[i];
    axis_vals[i].resize(sti.offsets.size());
    for (size_t a = 0; a < sti.offsets.size(); ++a) {
      if (sti.offsets[a] == 0) {
        axis_vals[i][a] = F0;
        continue;
      }
      VecL q = base;
      q[i] += sti.offsets[a] * (long double)hs[i];
      axis_vals[i][a] = chart_eval(s, q);
    }
    for (int k = 0; k < m; ++k) {
      long double a1 = 0, a2 = 0;
      for (size_t a = 0; a < sti.offsets.size(); ++a) {
        a1 += sti.w1[a] * axis_vals[i][a][k];
        a2 += sti.w2[a] * axis_vals[i][a][k];
      }
      jet.d1(k, i) = a1;
      jet.d2[i * n + i][k] = a2;
    }
  }

  // Mixed second derivatives as composed first-derivative stencils.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      VecL acc(m, 0.0L);
      for (size_t a = 0; a < st[i].offsets.size(); ++a)
        for (size_t b = 0; b < st[j].offsets.size(); ++b) {
          const long double w = st[i].w1[a] * st[j].w1[b];
          if (w == 0.0L) continue;
          VecL q = base;
          q[i] += st[i].offsets[a] * (long double)hs[i];
          q[j] += st[j].offsets[b] * (long double)hs[j];
          VecL Fq = chart_eval(s, q);
          for (int k = 0; k < m; ++k) acc[k] += w * Fq[k];
        }
      VecXl v(m);
      for (int k = 0; k < m; ++k) v[k] = acc[k];
      jet.d2[i * n + j] = v;
      jet.d2[j * n + i] = std::move(v);
    }
  return jet;
}

ChartJet fd_jet(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                const JetOptions& opt) {
  ChartJetL l = fd_jet_l(s, p, opt);
  ChartJet jet;
  jet.point = l.point.cast<double>();
  jet.d1 = l.d1.cast<double>();
  jet.d2.resize(l.d2.size());
  for (size_t i = 0; i < l.d2.size(); ++i) jet.d2[i] = l.d2[i].cast<double>();
  return jet;
}

// Hodge-dual normal: N_k = (-1)^k det(d1 with row k removed), which makes
// <N, w> = det([w | d1]) for every ambient w; N is orthogonal to the tangent
// space and |N| = sqrt(det g).
Eigen::VectorXd raw_normal(const Eigen::MatrixXd& d1) {
  const int n = static_cast<int>(d1.cols());
  const int m = n + 1;
  Eigen::VectorXd N(m);
  Eigen::MatrixXd sub(n, n);
  for (int k = 0; k < m; ++k) {
    int r = 0;
    for (int row = 0; row < m; ++row) {
      if (row == k) continue;
      sub.row(r++) = d1.row(row);
    }
    N[k] = ((k % 2) ? -1.0 : 1.0) * sub.determinant();
  }
  return N;
}

// 3-point first/second differences of a chart scalar field along one axis,
// with the stencil shifted inward where the box requires it.
struct FieldStencil {
  std::vector<double> nodes_shift;  // absolute displacement along the axis
  std::vector<double> w1, w2;
};

FieldStencil field_stencil(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                           int axis, double h_abs) {
  fd::Stencil st = fd::make_stencil(p[axis], s.box.lo[axis], s.box.hi[axis],
                                    s.box.periodic[axis], h_abs, 3);
  FieldStencil f;
  for (size_t a = 0; a < st.offsets.size(); ++a) {
    f.nodes_shift.push_back(st.offsets[a] * h_abs);
    f.w1.push_back(static_cast<double>(st.w1[a]));
    f.w2.push_back(static_cast<double>(st.w2[a]));
  }
  return f;
}

double apply_stencil(const ScalarField& f, const Eigen::VectorXd& p, int axis,
                     const FieldStencil& st, const std::vector<double>& w) {
  double acc = 0;
  Eigen::VectorXd q = p;
  for (size_t a = 0; a < st.nodes_shift.size(); ++a) {
    q[axis] = p[axis] + st.nodes_shift[a];
    acc += w[a] * f(q);
  }
  return acc;
}

double field_partial(const ParametricHypersurface& s, const ScalarField& f,
                     const Eigen::VectorXd& p, int axis, double h_abs) {
  FieldStencil st = field_stencil(s, p, axis, h_abs);
  return apply_stencil(f, p, axis, st, st.w1);
}

double field_second_same(const ParametricHypersurface& s, const ScalarField& f,
                         const Eigen::VectorXd& p, int axis, double h_abs) {
  FieldStencil st = field_stencil(s, p, axis, h_abs);
  return apply_stencil(f, p, axis, st, st.w2);
}

double field_second_cross(const ParametricHypersurface& s, const ScalarField& f,
                          const Eigen::VectorXd& p, int ai, int aj, double hi,
                          double hj) {
  FieldStencil si = field_stencil(s, p, ai, hi);
  FieldStencil sj = field_stencil(s, p, aj, hj);
  double acc = 0;
  Eigen::VectorXd q = p;
  for (size_t a = 0; a < si.nodes_shift.size(); ++a) {
    if (si.w1[a] == 0) continue;
    for (size_t b = 0; b < sj.nodes_shift.size(); ++b) {
      if (sj.w1[b] == 0) continue;
      q[ai] = p[ai] + si.nodes_shift[a];
      q[aj] = p[aj] + sj.nodes_shift[b];
      acc += si.w1[a] * sj.w1[b] * f(q);
    }
  }
  return acc;
}

// Long double twins of the field stencils above. Same nodes and weights;
// only the field values and the accumulator widen.
long double apply_stencil_l(const LongScalarField& f, const Eigen::VectorXd& p,
                            int axis, const FieldStencil& st,
                            const std::vector<double>& w) {
  long double acc = 0;
  Eigen::VectorXd q = p;
  for (size_t a = 0; a < st.nodes_shift.size(); ++a) {
    q[axis] = p[axis] + st.nodes_shift[a];
    acc += static_cast<long double>(w[a]) * f(q);
  }
  return acc;
}

long double field_partial_l(const ParametricHypersurface& s, const LongScalarField& f,
                            const Eigen::VectorXd& p, int axis, double h_abs) {
  FieldStencil st = field_stencil(s, p, axis, h_abs);
  return apply_stencil_l(f, p, axis, st, st.w1);
}

long double field_second_same_l(const ParametricHypersurface& s,
                                const LongScalarField& f, const Eigen::VectorXd& p,
                                int axis, double h_abs) {
  FieldStencil st = field_stencil(s, p, axis, h_abs);
  return apply_stencil_l(f, p, axis, st, st.w2);
}

long double field_second_cross_l(const ParametricHypersurface& s,
                                 const LongScalarField& f, const Eigen::VectorXd& p,
                                 int ai, int aj, double hi, double hj) {
  FieldStencil si = field_stencil(s, p, ai, hi);
  FieldStencil sj = field_stencil(s, p, aj, hj);
  long double acc = 0;
  Eigen::VectorXd q = p;
  for (size_t a = 0; a < si.nodes_shift.size(); ++a) {
    if (si.w1[a] == 0) continue;
    for (size_t b = 0; b < sj.nodes_shift.size(); ++b) {
      if (sj.w1[b] == 0) continue;
      q[ai] = p[ai] + si.nodes_shift[a];
      q[aj] = p[aj] + sj.nodes_shift[b];
      acc += static_cast<long double>(si.w1[a] * sj.w1[b]) * f(q);
    }
  }
  return acc;
}

}  // namespace

ChartJet jet_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                const JetOptions& opt) {
  if (p.size() != s.dim) throw Error("parameter point has wrong dimension");
  switch (opt.mode) {
    case JetOptions::Mode::analytic:
      if (!s.has_jet()) throw Error("surface '" + s.id + "' has no closed-form jet");
      return s.jet(p);
    case JetOptions::Mode::finite_difference:
      return fd_jet(s, p, opt);
    case JetOptions::Mode::automatic:
    default:
      return s.has_jet() ? s.jet(p) : fd_jet(s, p, opt);
  }
}

GeometrySample sample_from_jet(const ChartJet& jet, double orientation,
                               const KillingField* V) {
  const int n = static_cast<int>(jet.d1.cols());
  GeometrySample gs;
  gs.point = jet.point;
  gs.metric = jet.d1.transpose() * jet.d1;
  const double detg = gs.metric.determinant();
  if (!(detg > 1e-14))
    throw DegenerateChartError("metric determinant " + std::to_string(detg) +
                               " below immersion threshold");
  gs.sqrt_det_g = std::sqrt(detg);
  gs.inverse_metric = gs.metric.inverse();

  Eigen::VectorXd N = raw_normal(jet.d1);
  gs.normal = orientation * N / N.norm();

  gs.second_form.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gs.second_form(i, j) = -jet.second(i, j).dot(gs.normal);
  // Symmetrize away FD asymmetry in the mixed partials.
  gs.second_form = (0.5 * (gs.second_form + gs.second_form.transpose())).eval();

  Eigen::MatrixXd S = gs.inverse_metric * gs.second_form;
  gs.mean_curvature = S.trace();
  gs.a_norm_sq = (S * S).trace();
  gs.support = gs.point.dot(gs.normal);

  if (V) {
    gs.s_v = gs.normal.dot((*V)(gs.point));
    if (std::fabs(gs.s_v) > 1e-10) {
      gs.v_sq = 1.0 / (gs.s_v * gs.s_v);
      gs.q = gs.support * gs.support * (*gs.v_sq);
    }
  }
  return gs;
}

GeometrySample sample_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                         const JetOptions& opt, const KillingField* V) {
  return sample_from_jet(jet_at(s, p, opt), s.orientation, V);
}

ExtendedSample extended_sample_at(const ParametricHypersurface& s,
                                  const Eigen::VectorXd& p, const JetOptions& opt,
                                  const KillingField* V) {
  if (p.size() != s.dim) throw Error("parameter point has wrong dimension");
  const int n = s.dim;
  const int m = n + 1;
  ChartJetL jet = fd_jet_l(s, p, opt);

  MatXl g = jet.d1.transpose() * jet.d1;
  const long double detg = g.determinant();
  if (!(detg > 1e-14))
    throw DegenerateChartError("metric determinant " +
                               std::to_string(static_cast<double>(detg)) +
                               " below immersion threshold");
  MatXl ginv = g.inverse();

  VecXl N(m);
  MatXl sub(n, n);
  for (int k = 0; k < m; ++k) {
    int r = 0;
    for (int row = 0; row < m; ++row) {
      if (row == k) continue;
      sub.row(r++) = jet.d1.row(row);
    }
    N[k] = ((k % 2) ? -1.0L : 1.0L) * sub.determinant();
  }
  VecXl nu = static_cast<long double>(s.orientation) * N / N.norm();

  MatXl hform(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hform(i, j) = -jet.d2[i * n + j].dot(nu);
  hform = (0.5L * (hform + hform.transpose())).eval();

  MatXl S = ginv * hform;
  ExtendedSample out;
  out.a_norm_sq = (S * S).trace();
  out.support = jet.point.dot(nu);
  if (V) {
    VecXl Vx = V->skew().cast<long double>() * jet.point +
               V->translation_part().cast<long double>();
    out.s_v = nu.dot(Vx);
  }
  return out;
}

Eigen::MatrixXd metric_at(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                          double h) {
  JetOptions opt;
  opt.h = h;
  return sample_at(s, p, opt).metric;
}

Eigen::VectorXd unit_normal(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                            double h) {
  JetOptions opt;
  opt.h = h;
  return sample_at(s, p, opt).normal;
}

GeometrySample shape_operator(const ParametricHypersurface& s,
                              const Eigen::VectorXd& p, double h) {
  JetOptions opt;
  opt.h = h;
  return sample_at(s, p, opt);
}

double graph_quantity(const ParametricHypersurface& s, const KillingField& V,
                      const Eigen::VectorXd& p, double h) {
  JetOptions opt;
  opt.h = h;
  return sample_at(s, p, opt, &V).s_v;
}

double support_function(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                        double h) {
  JetOptions opt;
  opt.h = h;
  return sample_at(s, p, opt).support;
}

double q_quantity(const ParametricHypersurface& s, const KillingField& V,
                  const Eigen::VectorXd& p, double h) {
  JetOptions opt;
  opt.h = h;
  GeometrySample gs = sample_at(s, p, opt, &V);
  if (!gs.q)
    throw ZeroGraphQuantityError("s_V = " + std::to_string(gs.s_v) +
                                 " too close to zero for Q at this point");
  return *gs.q;
}

std::vector<Eigen::MatrixXd> christoffels(const ParametricHypersurface& s,
                                          const Eigen::VectorXd& p, double h,
                                          const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  auto metric_field = [&](const Eigen::VectorXd& q) {
    return sample_at(s, q, jets).metric;
  };
  // dg[l](i,j) = d_l g_ij, one matrix-valued 3-point difference per axis.
  std::vector<Eigen::MatrixXd> dg(n);
  for (int l = 0; l < n; ++l) {
    FieldStencil st = field_stencil(s, p, l, hs[l]);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd q = p;
    for (size_t a = 0; a < st.nodes_shift.size(); ++a) {
      q[l] = p[l] + st.nodes_shift[a];
      acc += st.w1[a] * metric_field(q);
    }
    dg[l] = acc;
  }
  Eigen::MatrixXd gi = sample_at(s, p, jets).inverse_metric;
  std::vector<Eigen::MatrixXd> gamma(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int l = 0; l < n; ++l)
          acc += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = 0.5 * acc;
      }
  return gamma;
}

double laplace_beltrami(const ParametricHypersurface& s, const ScalarField& f,
                        const Eigen::VectorXd& p, double h, const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  GeometrySample gs = sample_at(s, p, jets);
  std::vector<Eigen::MatrixXd> gamma = christoffels(s, p, h, jets);

  Eigen::VectorXd df(n);
  for (int k = 0; k < n; ++k) df[k] = field_partial(s, f, p, k, hs[k]);

  double acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (gs.inverse_metric(i, j) == 0.0) continue;
      double dd = (i == j) ? field_second_same(s, f, p, i, hs[i])
                           : field_second_cross(s, f, p, i, j, hs[i], hs[j]);
      double gam = 0;
      for (int k = 0; k < n; ++k) gam += gamma[k](i, j) * df[k];
      acc += gs.inverse_metric(i, j) * (dd - gam);
    }
  return acc;
}

double laplace_beltrami_extended(const ParametricHypersurface& s,
                                 const LongScalarField& f, const Eigen::VectorXd& p,
                                 double h, const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  GeometrySample gs = sample_at(s, p, jets);
  std::vector<Eigen::MatrixXd> gamma = christoffels(s, p, h, jets);

  std::vector<long double> df(n);
  for (int k = 0; k < n; ++k) df[k] = field_partial_l(s, f, p, k, hs[k]);

  long double acc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (gs.inverse_metric(i, j) == 0.0) continue;
      long double dd = (i == j)
                           ? field_second_same_l(s, f, p, i, hs[i])
                           : field_second_cross_l(s, f, p, i, j, hs[i], hs[j]);
      long double gam = 0;
      for (int k = 0; k < n; ++k)
        gam += static_cast<long double>(gamma[k](i, j)) * df[k];
      acc += static_cast<long double>(gs.inverse_metric(i, j)) * (dd - gam);
    }
  return static_cast<double>(acc);
}

double laplace_beltrami_divergence(const ParametricHypersurface& s,
                                   const ScalarField& f, const Eigen::VectorXd& p,
                                   double h, const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  GeometrySample gs = sample_at(s, p, jets);
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    ScalarField flux = [&, i](const Eigen::VectorXd& q) {
      GeometrySample sq = sample_at(s, q, jets);
      double v = 0;
      for (int j = 0; j < n; ++j)
        v += sq.inverse_metric(i, j) * field_partial(s, f, q, j, hs[j]);
      return sq.sqrt_det_g * v;
    };
    acc += field_partial(s, flux, p, i, hs[i]);
  }
  return acc / gs.sqrt_det_g;
}

SurfaceGradient surface_gradient(const ParametricHypersurface& s, const ScalarField& f,
                                 const Eigen::VectorXd& p, double h,
                                 const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  GeometrySample gs = sample_at(s, p, jets);
  ChartJet jet = jet_at(s, p, jets);
  SurfaceGradient out;
  out.partials.resize(n);
  for (int k = 0; k < n; ++k) out.partials[k] = field_partial(s, f, p, k, hs[k]);
  out.chart_components = gs.inverse_metric * out.partials;
  out.ambient = jet.d1 * out.chart_components;
  out.norm_sq = out.partials.dot(out.chart_components);
  return out;
}

SecondFormDerivative second_form_derivative(const ParametricHypersurface& s,
                                            const Eigen::VectorXd& p, double h,
                                            const JetOptions& jets) {
  const int n = s.dim;
  Eigen::VectorXd hs = abs_steps(s, h);
  GeometrySample gs = sample_at(s, p, jets);
  std::vector<Eigen::MatrixXd> gamma = christoffels(s, p, h, jets);

  // dh[k](i,j) = d_k h_ij by matrix-valued 3-point differences.
  std::vector<Eigen::MatrixXd> dh(n);
  for (int k = 0; k < n; ++k) {
    FieldStencil st = field_stencil(s, p, k, hs[k]);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd q = p;
    for (size_t a = 0; a < st.nodes_shift.size(); ++a) {
      q[k] = p[k] + st.nodes_shift[a];
      acc += st.w1[a] * sample_at(s, q, jets).second_form;
    }
    dh[k] = acc;
  }

  SecondFormDerivative out;
  out.cov.assign(n, Eigen::MatrixXd::Zero(n, n));
  const Eigen::MatrixXd& hmat = gs.second_form;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dh[k](i, j);
        for (int l = 0; l < n; ++l)
          v -= gamma[l](k, i) * hmat(l, j) + gamma[l](k, j) * hmat(i, l);
        out.cov[k](i, j) = v;
      }

  const Eigen::MatrixXd& gi = gs.inverse_metric;
  double tot = 0;
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) {
      if (gi(k, kp) == 0.0) continue;
      for (int i = 0; i < n; ++i)
        for (int ip = 0; ip < n; ++ip)
          for (int j = 0; j < n; ++j)
            for (int jp = 0; jp < n; ++jp)
              tot += gi(k, kp) * gi(i, ip) * gi(j, jp) * out.cov[k](i, j) *
                     out.cov[kp](ip, jp);
    }
  out.norm_sq = tot;
  return out;
}

double nabla_A_norm_sq(const ParametricHypersurface& s, const Eigen::VectorXd& p,
                       double h) {
  return second_form_derivative(s, p, h).norm_sq;
}

Conormal outward_conormal(const ParametricHypersurface& s, const BoundaryFace& face,
                          const Eigen::VectorXd& p, const JetOptions& jets) {
  GeometrySample gs = sample_at(s, p, jets);
  ChartJet jet = jet_at(s, p, jets);
  const int b = face.axis;
  // Raised differential of the face coordinate, normalized in g.
  Eigen::VectorXd comp = gs.inverse_metric.col(b);
  double norm = std::sqrt(gs.inverse_metric(b, b));
  comp /= norm;
  if (!face.upper) comp = -comp;
  Conormal out;
  out.chart_components = comp;
  out.ambient = jet.d1 * comp;
  return out;
}

double normal_derivative(const ParametricHypersurface& s, const BoundaryFace& face,
                         const ScalarField& f, const Eigen::VectorXd& p, double h,
                         const JetOptions& jets) {
  Conormal eta = outward_conormal(s, face, p, jets);
  Eigen::VectorXd hs = abs_steps(s, h);
  const int n = s.dim;
  double acc = 0;
  for (int k = 0; k < n; ++k)
    acc += eta.chart_components[k] * field_partial(s, f, p, k, hs[k]);
  return acc;
}

QuadratureRule quadrature_for(const ParametricHypersurface& s, int points_per_axis) {
  return QuadratureRule(s.box.lo, s.box.hi, points_per_axis);
}

double surface_area(const ParametricHypersurface& s, const QuadratureRule& quad) {
  if (quad.dim() != s.dim) throw Error("quadrature dimension mismatch");
  return quad.integrate([&](const Eigen::VectorXd& p) {
    ChartJet jet = jet_at(s, p);
    Eigen::MatrixXd g = jet.d1.transpose() * jet.d1;
    const double detg = g.determinant();
    if (detg < 0) throw DegenerateChartError("negative metric determinant");
    return std::sqrt(detg);
  });
}

double boundary_volume(const ParametricHypersurface& s, const QuadratureRule& quad) {
  if (s.sphere_faces.empty())
    throw PreconditionViolation("surface '" + s.id + "' has no boundary faces");
  const int n = s.dim;
  double total = 0;
  for (const BoundaryFace& face : s.sphere_faces) {
    if (n == 1) throw Error("boundary volume needs dim >= 2");
    Eigen::VectorXd lo(n - 1), hi(n - 1);
    std::vector<int> axes;
    for (int i = 0; i < n; ++i)
      if (i != face.axis) {
        lo[axes.size()] = s.box.lo[i];
        hi[axes.size()] = s.box.hi[i];
        axes.push_back(i);
      }
    QuadratureRule face_rule(lo, hi, quad.points_per_axis());
    const double coord = face.coordinate(s.box);
    total += face_rule.integrate([&](const Eigen::VectorXd& q) {
      Eigen::VectorXd p(n);
      p[face.axis] = coord;
      for (size_t i = 0; i < axes.size(); ++i) p[axes[i]] = q[i];
      ChartJet jet = jet_at(s, p);
      Eigen::MatrixXd g = jet.d1.transpose() * jet.d1;
      Eigen::MatrixXd induced(n - 1, n - 1);
      for (size_t i = 0; i < axes.size(); ++i)
        for (size_t j = 0; j < axes.size(); ++j)
          induced(i, j) = g(axes[i], axes[j]);
      const double det = induced.determinant();
      if (det < 0) throw DegenerateChartError("negative induced determinant");
      return std::sqrt(det);
    });
  }
  return total;
}

namespace {

CertifiedIntegral certify(int initial_points, double rel_tol, int max_points,
                          const std::function<double(int)>& eval) {
  CertifiedIntegral out;
  int pts = initial_points;
  double prev = eval(pts);
  while (pts * 2 <= max_points) {
    pts *= 2;
    const double next = eval(pts);
    out.rel_change = std::fabs(next - prev) /
                     std::max({std::fabs(next), std::fabs(prev), 1e-300});
    out.value = next;
    out.points = pts;
    if (out.rel_change < rel_tol) {
      out.converged = true;
      return out;
    }
    prev = next;
  }
  return out;
}

}  // namespace

CertifiedIntegral certified_surface_area(const ParametricHypersurface& s,
                                         int initial_points, double rel_tol,
                                         int max_points) {
  return certify(initial_points, rel_tol, max_points, [&](int pts) {
    return surface_area(s, quadrature_for(s, pts));
  });
}

CertifiedIntegral certified_boundary_volume(const ParametricHypersurface& s,
                                            int initial_points, double rel_tol,
                                            int max_points) {
  return certify(initial_points, rel_tol, max_points, [&](int pts) {
    return boundary_volume(s, quadrature_for(s, pts));
  });
}

double integrate_scalar(const ParametricHypersurface& s, const QuadratureRule& quad,
                        const std::function<double(const Eigen::VectorXd&)>& value) {
  return quad.integrate([&](const Eigen::VectorXd& p) {
    ChartJet jet = jet_at(s, p);
    Eigen::MatrixXd g = jet.d1.transpose() * jet.d1;
    return std::sqrt(g.determinant()) * value(p);
  });
}

double integrate_boundary_scalar(
    const ParametricHypersurface& s, int points_per_axis,
    const std::function<double(const BoundaryFace&, const Eigen::VectorXd&)>& value) {
  if (s.sphere_faces.empty())
    throw PreconditionViolation("surface '" + s.id + "' has no boundary faces");
  const int n = s.dim;
  double total = 0;
  for (const BoundaryFace& face : s.sphere_faces) {
    Eigen::VectorXd lo(n - 1), hi(n - 1);
    std::vector<int> axes;
    for (int i = 0; i < n; ++i)
      if (i != face.axis) {
        lo[axes.size()] = s.box.lo[i];
        hi[axes.size()] = s.box.hi[i];
        axes.push_back(i);
      }
    QuadratureRule face_rule(lo, hi, points_per_axis);
    const double coord = face.coordinate(s.box);
    total += face_rule.integrate([&](const Eigen::VectorXd& q) {
      Eigen::VectorXd p(n);
      p[face.axis] = coord;
      for (size_t i = 0; i < axes.size(); ++i) p[axes[i]] = q[i];
      ChartJet jet = jet_at(s, p);
      Eigen::MatrixXd g = jet.d1.transpose() * jet.d1;
      Eigen::MatrixXd induced(n - 1, n - 1);
      for (size_t i = 0; i < axes.size(); ++i)
        for (size_t j = 0; j < axes.size(); ++j)
          induced(i, j) = g(axes[i], axes[j]);
      return std::sqrt(induced.determinant()) * value(face, p);
    });
  }
  return total;
}

}  // namespace freebound

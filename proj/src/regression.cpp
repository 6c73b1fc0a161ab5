#include "cenobreak/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "cenobreak/kernels_detail.hpp"

namespace cenobreak {

Design design_rows(std::span<const double> y, ModelSpec spec) {
  Design d;
  d.spec = spec;
  d.offset = sample_offset(spec);
  if (y.size() < d.offset + 1) throw std::runtime_error("series too short for spec");
  if (spec == ModelSpec::Mean) {
    d.resp.assign(y.begin(), y.end());
  } else {
    d.resp.assign(y.begin() + 1, y.end());
    d.lag.assign(y.begin(), y.end() - 1);
  }
  return d;
}

namespace {

std::vector<double> prefix_sum(std::span<const double> v,
                               double (*f)(double, double), std::span<const double> w) {
  std::vector<double> p(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = p[i] + f(v[i], w.empty() ? 0.0 : w[i]);
  return p;
}

}  // namespace

SegmentCost SegmentCost::mean(std::span<const double> r) {
  SegmentCost c;
  c.n_ = r.size();
  c.q_ = 1;
  c.sy_ = prefix_sum(r, [](double a, double) { return a; }, {});
  c.syy_ = prefix_sum(r, [](double a, double) { return a * a; }, {});
  return c;
}

SegmentCost SegmentCost::intercept_slope(std::span<const double> resp,
                                         std::span<const double> lag) {
  if (resp.size() != lag.size()) throw std::logic_error("resp/lag length mismatch");
  SegmentCost c;
  c.n_ = resp.size();
  c.q_ = 2;
  c.sy_ = prefix_sum(resp, [](double a, double) { return a; }, {});
  c.syy_ = prefix_sum(resp, [](double a, double) { return a * a; }, {});
  c.sw_ = prefix_sum(lag, [](double a, double) { return a; }, {});
  c.sww_ = prefix_sum(lag, [](double a, double) { return a * a; }, {});
  c.swy_ = prefix_sum(resp, [](double a, double b) { return a * b; }, lag);
  return c;
}

double SegmentCost::ssr(std::size_t i, std::size_t j) const {
  const auto ii = static_cast<std::int64_t>(i);
  const auto jj = static_cast<std::int64_t>(j);
  if (q_ == 1) return kernels::q1_cost(q1_view(), ii, jj);
  return kernels::q2_cost(q2_view(), ii, jj);
}

SegmentCost make_segment_cost(const Design& design, const GlobalCoefficients& beta) {
  switch (design.spec) {
    case ModelSpec::Mean:
      return SegmentCost::mean(design.resp);
    case ModelSpec::AR:
      return SegmentCost::intercept_slope(design.resp, design.lag);
    case ModelSpec::FixedAR: {
      if (beta.beta.size() != 1) throw std::logic_error("FixedAR needs beta = {phi}");
      const double phi = beta.beta[0];
      std::vector<double> adj(design.rows());
      for (std::size_t t = 0; t < adj.size(); ++t) adj[t] = design.resp[t] - phi * design.lag[t];
      return SegmentCost::mean(adj);
    }
  }
  throw std::logic_error("unknown spec");
}

SsrTable segment_ssr_table(const Design& design, const GlobalCoefficients& beta) {
  const std::size_t n = design.rows();
  const int q = design.q();
  SsrTable table(n, q);

  // Adjusted response (identity unless FixedAR with a supplied beta).
  std::vector<double> r(design.resp);
  if (design.spec == ModelSpec::FixedAR) {
    if (beta.beta.size() != 1) throw std::logic_error("FixedAR needs beta = {phi}");
    for (std::size_t t = 0; t < n; ++t) r[t] -= beta.beta[0] * design.lag[t];
  }
  const bool slope = design.spec == ModelSpec::AR;

  for (std::size_t i = 0; i < n; ++i) {
    double cn = 0.0, sy = 0.0, syy = 0.0, sw = 0.0, sww = 0.0, swy = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      cn += 1.0;
      sy += r[j];
      syy += r[j] * r[j];
      if (slope) {
        const double w = design.lag[j];
        sw += w;
        sww += w * w;
        swy += w * r[j];
      }
      const std::size_t len = j - i + 1;
      if (len < static_cast<std::size_t>(q)) continue;
      double ssr;
      if (!slope) {
        ssr = syy - (sy * sy) / cn;
        ssr = ssr > 0.0 ? ssr : 0.0;
      } else {
        const double det = cn * sww - sw * sw;
        if (kernels::moment2x2_degenerate(cn, sw, sww, det)) {
          continue;  // entry stays +infinity
        }
        const double b0 = (sww * sy - sw * swy) / det;
        const double b1 = (cn * swy - sw * sy) / det;
        ssr = syy - b0 * sy - b1 * swy;
        ssr = ssr > 0.0 ? ssr : 0.0;
      }
      table.at(i, j) = ssr;
    }
  }
  return table;
}

namespace {

SegmentFit fit_one_segment(const Design& design, std::span<const double> adjusted,
                           std::size_t a, std::size_t b) {
  SegmentFit fit;
  fit.start = a;
  fit.end = b;
  const auto len = static_cast<double>(b - a + 1);
  const int q = design.q();
  if (design.spec != ModelSpec::AR) {
    double sy = 0.0, syy = 0.0;
    for (std::size_t t = a; t <= b; ++t) {
      sy += adjusted[t];
      syy += adjusted[t] * adjusted[t];
    }
    const double c = sy / len;
    fit.delta = {c};
    fit.ssr = std::max(syy - sy * sy / len, 0.0);
  } else {
    double sy = 0.0, syy = 0.0, sw = 0.0, sww = 0.0, swy = 0.0;
    for (std::size_t t = a; t <= b; ++t) {
      const double yv = design.resp[t], wv = design.lag[t];
      sy += yv;
      syy += yv * yv;
      sw += wv;
      sww += wv * wv;
      swy += wv * yv;
    }
    const double det = len * sww - sw * sw;
    if (kernels::moment2x2_degenerate(len, sw, sww, det)) {
      fit.degenerate = true;
      fit.ssr = std::numeric_limits<double>::infinity();
      fit.sigma2 = std::numeric_limits<double>::quiet_NaN();
      fit.delta = {std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN()};
      return fit;
    }
    const double c = (sww * sy - sw * swy) / det;
    const double phi = (len * swy - sw * sy) / det;
    fit.delta = {c, phi};
    fit.ssr = std::max(syy - c * sy - phi * swy, 0.0);
  }
  const double dof = len - static_cast<double>(q);
  fit.sigma2 = dof > 0 ? fit.ssr / dof : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

}  // namespace

PartitionFit fit_segments(const Design& design, const std::vector<std::size_t>& breaks,
                          const GlobalCoefficients& beta) {
  const std::size_t n = design.rows();
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (breaks[k] + 1 >= n) throw std::runtime_error("break index out of range");
    if (k > 0 && breaks[k] <= breaks[k - 1]) {
      throw std::runtime_error("break indices must be strictly increasing");
    }
  }
  std::vector<double> adjusted(design.resp);
  if (design.spec == ModelSpec::FixedAR) {
    if (beta.beta.size() != 1) throw std::logic_error("FixedAR needs beta = {phi}");
    for (std::size_t t = 0; t < n; ++t) adjusted[t] -= beta.beta[0] * design.lag[t];
  }
  PartitionFit out;
  std::size_t a = 0;
  for (std::size_t k = 0; k <= breaks.size(); ++k) {
    const std::size_t b = k < breaks.size() ? breaks[k] : n - 1;
    out.segments.push_back(fit_one_segment(design, adjusted, a, b));
    out.total_ssr += out.segments.back().ssr;
    a = b + 1;
  }
  return out;
}

JointFixedArFit joint_fixed_ar_fit(const Design& design,
                                   const std::vector<std::size_t>& breaks) {
  if (design.spec != ModelSpec::FixedAR) throw std::logic_error("spec must be FixedAR");
  const std::size_t n = design.rows();
  const std::size_t nseg = breaks.size() + 1;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(1 + nseg));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  std::size_t seg = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (seg < breaks.size() && t > breaks[seg]) ++seg;
    X(static_cast<Eigen::Index>(t), 0) = design.lag[t];
    X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(1 + seg)) = 1.0;
    y(static_cast<Eigen::Index>(t)) = design.resp[t];
  }
  const OlsFit f = ols(X, y);
  JointFixedArFit out;
  out.phi = f.coef(0);
  out.ssr = f.ssr;
  const auto dof = static_cast<double>(n) - static_cast<double>(1 + nseg);
  out.phi_var_ols = dof > 0 ? f.ssr / dof * f.xtx_inv(0, 0) : 0.0;
  out.intercepts.resize(nseg);
  for (std::size_t s = 0; s < nseg; ++s) out.intercepts[s] = f.coef(static_cast<Eigen::Index>(1 + s));
  return out;
}

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  OlsFit fit;
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd xty = X.transpose() * y;
  const auto ldlt = xtx.ldlt();
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("singular design in OLS");
  fit.coef = ldlt.solve(xty);
  fit.xtx_inv = ldlt.solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  fit.resid = y - X * fit.coef;
  fit.ssr = fit.resid.squaredNorm();
  return fit;
}

std::size_t min_segment_obs_from_h(double h_myr, double bin_kyr) {
  if (h_myr <= 0 || bin_kyr <= 0) throw std::runtime_error("h and bin size must be positive");
  const double obs = std::round(h_myr * 1000.0 / bin_kyr);
  return obs < 1.0 ? 1 : static_cast<std::size_t>(obs);
}

}  // namespace cenobreak

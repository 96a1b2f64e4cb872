#include "ecomplex/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "ecomplex/kernels.hpp"
#include "ecomplex/stats.hpp"

namespace ecomplex {

void DesignMatrix::validate() const {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (col_names.size() != p || is_dummy.size() != p)
    throw std::invalid_argument("DesignMatrix: column metadata out of sync");
  if (y.size() != n) throw std::invalid_argument("DesignMatrix: y size mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& name : col_names)
    if (!seen.insert(name).second)
      throw std::invalid_argument("DesignMatrix: duplicate column name '" + name + "'");
  for (double v : x.data())
    if (!std::isfinite(v)) throw std::invalid_argument("DesignMatrix: non-finite cell");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("DesignMatrix: non-finite response");
  for (std::size_t i = 0; i < n; ++i) {
    double dummy_sum = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      if (is_dummy[j]) dummy_sum += x(i, j);
    if (dummy_sum > 1.0 + 1e-12)
      throw std::invalid_argument("DesignMatrix: dummy columns overlap in a row");
  }
}

namespace {

constexpr double kRankTol = 1e-10;

struct QrFactors {
  Matrix v;               // householder vectors, column k in rows k..n-1
  std::vector<double> beta;  // 2 / v^T v per column
  Matrix r;               // p x p upper triangular
  std::size_t n = 0, p = 0;
};

// Householder QR; throws on rank deficiency.
QrFactors qr_factorize(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  Matrix a = x;
  QrFactors f;
  f.n = n;
  f.p = p;
  f.v = Matrix(n, p);
  f.beta.assign(p, 0.0);
  f.r = Matrix(p, p);

  for (std::size_t k = 0; k < p; ++k) {
    double norm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) norm2 += a(i, k) * a(i, k);
    const double norm = std::sqrt(norm2);
    const double alpha = a(k, k) >= 0 ? -norm : norm;

    double vnorm2 = 0.0;
    f.v(k, k) = a(k, k) - alpha;
    vnorm2 += f.v(k, k) * f.v(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      f.v(i, k) = a(i, k);
      vnorm2 += a(i, k) * a(i, k);
    }
    f.beta[k] = vnorm2 > 0 ? 2.0 / vnorm2 : 0.0;

    if (f.beta[k] > 0) {
      for (std::size_t j = k; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += f.v(i, k) * a(i, j);
        s *= f.beta[k];
        for (std::size_t i = k; i < n; ++i) a(i, j) -= s * f.v(i, k);
      }
    }
    for (std::size_t j = k; j < p; ++j) f.r(k, j) = a(k, j);
  }

  double scale = 0.0;
  for (std::size_t k = 0; k < p; ++k) scale = std::max(scale, std::fabs(f.r(k, k)));
  if (scale <= 0) throw std::runtime_error("ols_fit: design matrix is zero");
  for (std::size_t k = 0; k < p; ++k)
    if (std::fabs(f.r(k, k)) <= kRankTol * scale)
      throw std::runtime_error("ols_fit: rank-deficient design (column '" + std::to_string(k) +
                               "' is collinear)");
  return f;
}

// apply Q^T to a vector
std::vector<double> apply_qt(const QrFactors& f, const std::vector<double>& y) {
  std::vector<double> w = y;
  for (std::size_t k = 0; k < f.p; ++k) {
    if (f.beta[k] <= 0) continue;
    double s = 0.0;
    for (std::size_t i = k; i < f.n; ++i) s += f.v(i, k) * w[i];
    s *= f.beta[k];
    for (std::size_t i = k; i < f.n; ++i) w[i] -= s * f.v(i, k);
  }
  return w;
}

std::vector<double> back_substitute(const Matrix& r, const std::vector<double>& rhs) {
  const std::size_t p = r.rows();
  std::vector<double> b(p, 0.0);
  for (std::size_t kk = p; kk-- > 0;) {
    double s = rhs[kk];
    for (std::size_t j = kk + 1; j < p; ++j) s -= r(kk, j) * b[j];
    b[kk] = s / r(kk, kk);
  }
  return b;
}

// (X^T X)^-1 = R^-1 R^-T
Matrix xtx_inverse(const Matrix& r) {
  const std::size_t p = r.rows();
  Matrix rinv(p, p);
  for (std::size_t col = 0; col < p; ++col) {
    std::vector<double> e(p, 0.0);
    e[col] = 1.0;
    const std::vector<double> sol = back_substitute(r, e);
    for (std::size_t i = 0; i < p; ++i) rinv(i, col) = sol[i];
  }
  Matrix g(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) g(i, j) = kernels::dot(rinv.row(i), rinv.row(j), p);
  return g;
}

RegressionFit fit_impl(const DesignMatrix& d, bool with_vif);

std::vector<double> vif_impl(const DesignMatrix& d) {
  const std::size_t p = d.x.cols();
  const std::size_t n = d.x.rows();
  std::vector<double> out(p, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t j = 0; j < p; ++j) {
    if (d.is_dummy[j] || static_cast<int>(j) == d.intercept_col) continue;
    DesignMatrix aux;
    aux.x = Matrix(n, p - 1);
    std::size_t col = 0;
    for (std::size_t k = 0; k < p; ++k) {
      if (k == j) continue;
      aux.col_names.push_back(d.col_names[k]);
      aux.is_dummy.push_back(d.is_dummy[k]);
      if (static_cast<int>(k) == d.intercept_col) aux.intercept_col = static_cast<int>(col);
      for (std::size_t i = 0; i < n; ++i) aux.x(i, col) = d.x(i, k);
      ++col;
    }
    aux.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) aux.y[i] = d.x(i, j);
    try {
      const RegressionFit fit = fit_impl(aux, /*with_vif=*/false);
      out[j] = fit.r2 >= 1.0 - 1e-12 ? std::numeric_limits<double>::infinity()
                                     : 1.0 / (1.0 - fit.r2);
    } catch (const std::exception&) {
      out[j] = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

RegressionFit fit_impl(const DesignMatrix& d, bool with_vif) {
  d.validate();
  const std::size_t n = d.x.rows();
  const std::size_t p = d.x.cols();
  if (n <= p)
    throw std::runtime_error("ols_fit: need more observations than columns (n=" +
                             std::to_string(n) + ", p=" + std::to_string(p) + ")");

  const QrFactors f = qr_factorize(d.x);
  const std::vector<double> qty = apply_qt(f, d.y);
  const std::vector<double> rhs(qty.begin(), qty.begin() + static_cast<long>(p));
  const std::vector<double> b = back_substitute(f.r, rhs);

  RegressionFit fit;
  fit.n_obs = n;
  fit.n_cols = p;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.residuals[i] = d.y[i] - kernels::dot(d.x.row(i), b.data(), p);
  fit.rss = kernels::dot(fit.residuals.data(), fit.residuals.data(), n);

  const bool has_intercept = d.intercept_col >= 0;
  if (has_intercept) {
    const double ybar = stats::mean(d.y.data(), n);
    fit.tss = kernels::centered_sumsq(d.y.data(), n, ybar);
  } else {
    fit.tss = kernels::dot(d.y.data(), d.y.data(), n);
  }
  fit.r2 = fit.tss > 0 ? 1.0 - fit.rss / fit.tss : 0.0;

  const double df_resid = static_cast<double>(n - p);
  const double sigma2 = fit.rss / df_resid;
  const Matrix g = xtx_inverse(f.r);

  fit.coefficients.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    Coefficient& c = fit.coefficients[j];
    c.name = d.col_names[j];
    c.estimate = b[j];
    c.std_error = std::sqrt(sigma2 * g(j, j));
    c.t_stat = c.std_error > 0 ? c.estimate / c.std_error
                               : std::numeric_limits<double>::quiet_NaN();
    c.p_value = stats::t_sf_two_sided(c.t_stat, df_resid);
  }

  const double q = static_cast<double>(p) - (has_intercept ? 1.0 : 0.0);
  if (q > 0 && fit.tss > fit.rss) {
    fit.f_stat = ((fit.tss - fit.rss) / q) / (fit.rss / df_resid);
    fit.f_p_value = stats::f_sf(fit.f_stat, q, df_resid);
  } else {
    fit.f_stat = 0.0;
    fit.f_p_value = 1.0;
  }
  const double n_minus = has_intercept ? static_cast<double>(n - 1) : static_cast<double>(n);
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * n_minus / df_resid;

  if (with_vif) fit.vif = vif_impl(d);
  return fit;
}

}  // namespace

RegressionFit ols_fit(const DesignMatrix& design, bool compute_vif) {
  return fit_impl(design, compute_vif);
}

std::vector<double> vif(const DesignMatrix& design) {
  design.validate();
  return vif_impl(design);
}

double annualized_growth(double gdp_start, double gdp_end, int span, GrowthMethod method) {
  if (!(gdp_start > 0) || !(gdp_end > 0))
    throw std::invalid_argument("annualized_growth: GDP levels must be positive");
  if (span < 1) throw std::invalid_argument("annualized_growth: span must be >= 1");
  const double ratio = gdp_end / gdp_start;
  const double inv_span = 1.0 / static_cast<double>(span);
  return method == GrowthMethod::Geometric ? std::pow(ratio, inv_span) - 1.0
                                           : std::log(ratio) * inv_span;
}

namespace {

using Getter = std::function<double(const Observation&)>;

DesignMatrix build_design(const std::vector<Observation>& obs,
                          const std::vector<std::pair<std::string, Getter>>& regressors,
                          const Getter& response) {
  if (obs.empty()) throw std::runtime_error("regression suite: empty observation table");
  std::set<int> years;
  for (const auto& o : obs) years.insert(o.year);

  DesignMatrix d;
  d.col_names.push_back("constant");
  d.is_dummy.push_back(false);
  d.intercept_col = 0;
  for (const auto& [name, getter] : regressors) {
    d.col_names.push_back(name);
    d.is_dummy.push_back(false);
  }
  // year fixed effects, first year dropped
  std::vector<int> dummy_years(years.begin(), years.end());
  if (!dummy_years.empty()) dummy_years.erase(dummy_years.begin());
  for (int y : dummy_years) {
    d.col_names.push_back("year_" + std::to_string(y));
    d.is_dummy.push_back(true);
  }

  const std::size_t p = d.col_names.size();
  d.x = Matrix(obs.size(), p);
  d.y.resize(obs.size());
  d.row_ids.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Observation& o = obs[i];
    d.x(i, 0) = 1.0;
    std::size_t col = 1;
    for (const auto& [name, getter] : regressors) d.x(i, col++) = getter(o);
    for (int y : dummy_years) d.x(i, col++) = o.year == y ? 1.0 : 0.0;
    d.y[i] = response(o);
    d.row_ids.emplace_back(o.country, o.year);
  }
  return d;
}

const Getter kOmega = [](const Observation& o) { return o.omega; };
const Getter kPi = [](const Observation& o) { return o.pi; };
const Getter kGrowth = [](const Observation& o) { return o.growth; };
const Getter kEci = [](const Observation& o) { return o.eci; };
const Getter kEci2 = [](const Observation& o) { return o.eci * o.eci; };
const Getter kLnGdp = [](const Observation& o) { return o.ln_gdp; };
const Getter kLnGdp2 = [](const Observation& o) { return o.ln_gdp * o.ln_gdp; };
const Getter kHc = [](const Observation& o) { return o.human_capital; };
const Getter kHc2 = [](const Observation& o) { return o.human_capital * o.human_capital; };
const Getter kLnPop = [](const Observation& o) { return o.ln_pop; };
const Getter kLnStock = [](const Observation& o) { return o.ln_capital_stock; };
const Getter kOmegaPi = [](const Observation& o) { return o.omega * o.pi; };

}  // namespace

std::vector<RegressionFit> run_table1_suite(const std::vector<Observation>& obs) {
  if (obs.empty()) throw std::runtime_error("run_table1_suite: empty observation table");
  using Spec = std::vector<std::pair<std::string, Getter>>;
  const std::vector<Spec> specs = {
      {{"eci", kEci}, {"eci_sq", kEci2}},
      {{"ln_gdp", kLnGdp}, {"ln_gdp_sq", kLnGdp2}},
      {{"eci", kEci}, {"eci_sq", kEci2}, {"human_capital", kHc}},
      {{"eci", kEci}, {"eci_sq", kEci2}, {"human_capital", kHc}, {"ln_capital_stock", kLnStock}},
      {{"eci", kEci}, {"eci_sq", kEci2}, {"human_capital", kHc}, {"human_capital_sq", kHc2}},
  };
  std::vector<RegressionFit> fits;
  fits.reserve(specs.size());
  for (const auto& spec : specs) fits.push_back(ols_fit(build_design(obs, spec, kOmega)));
  return fits;
}

GrowthSuiteResult run_table2_suite(const std::vector<Observation>& obs) {
  std::vector<Observation> with_growth;
  for (const auto& o : obs)
    if (std::isfinite(o.growth)) with_growth.push_back(o);
  if (with_growth.empty()) throw std::runtime_error("run_table2_suite: no growth observations");

  using Spec = std::vector<std::pair<std::string, Getter>>;
  const Spec controls = {{"eci", kEci},
                         {"ln_gdp", kLnGdp},
                         {"ln_pop", kLnPop},
                         {"human_capital", kHc},
                         {"ln_capital_stock", kLnStock}};
  auto with_controls = [&controls](Spec head) {
    head.insert(head.end(), controls.begin(), controls.end());
    return head;
  };
  const std::vector<Spec> specs = {
      {{"omega", kOmega}},
      {{"pi", kPi}},
      {{"omega", kOmega}, {"pi", kPi}},
      controls,
      with_controls({{"omega", kOmega}}),
      with_controls({{"pi", kPi}}),
      with_controls({{"omega", kOmega}, {"pi", kPi}}),
  };

  GrowthSuiteResult result;
  result.n_obs = with_growth.size();
  for (const auto& spec : specs)
    result.models.push_back(ols_fit(build_design(with_growth, spec, kGrowth)));

  // interaction variant of the omega+pi model and its nested F test
  const Spec interaction = {{"omega", kOmega}, {"pi", kPi}, {"omega_x_pi", kOmegaPi}};
  result.interaction_model = ols_fit(build_design(with_growth, interaction, kGrowth));
  const RegressionFit& restricted = result.models[2];
  const RegressionFit& full = result.interaction_model;
  const double df_full = static_cast<double>(full.n_obs - full.n_cols);
  result.interaction_f_stat = (restricted.rss - full.rss) / (full.rss / df_full);
  result.interaction_f_p = stats::f_sf(result.interaction_f_stat, 1.0, df_full);
  return result;
}

std::vector<DeltaRobustnessRow> delta_robustness(
    const std::vector<int>& deltas,
    const std::function<std::vector<Observation>(int)>& build_observations) {
  std::vector<DeltaRobustnessRow> rows;
  for (int delta : deltas) {
    if (delta < 1)
      throw std::invalid_argument("delta_robustness: delta must be >= 1 (got " +
                                  std::to_string(delta) + ")");
    const std::vector<Observation> obs = build_observations(delta);
    const GrowthSuiteResult suite = run_table2_suite(obs);

    DeltaRobustnessRow row;
    row.delta = delta;
    row.n_obs = suite.n_obs;
    const auto grab = [](const RegressionFit& fit, const std::string& name, double* est,
                         double* se, double* p) {
      for (const auto& c : fit.coefficients)
        if (c.name == name) {
          *est = c.estimate;
          *se = c.std_error;
          *p = c.p_value;
          return;
        }
    };
    grab(suite.models[0], "omega", &row.alpha1_base, &row.se_base, &row.p_base);
    grab(suite.models[4], "omega", &row.alpha1_controls, &row.se_controls, &row.p_controls);
    rows.push_back(row);
  }
  return rows;
}

CubicFit cubic_minimum_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("cubic_minimum_fit: size mismatch");
  if (x.size() < 5) throw std::runtime_error("cubic_minimum_fit: need at least 5 points");

  const double x_lo = *std::min_element(x.begin(), x.end());
  const double x_hi = *std::max_element(x.begin(), x.end());
  if (!(x_hi > x_lo)) throw std::runtime_error("cubic_minimum_fit: x has no spread");

  // fit in centered coordinates for conditioning; map back afterwards
  const double shift = stats::mean(x.data(), x.size());
  DesignMatrix d;
  d.col_names = {"c0", "c1", "c2", "c3"};
  d.is_dummy = {false, false, false, false};
  d.intercept_col = 0;
  d.x = Matrix(x.size(), 4);
  d.y = y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - shift;
    d.x(i, 0) = 1.0;
    d.x(i, 1) = u;
    d.x(i, 2) = u * u;
    d.x(i, 3) = u * u * u;
  }
  const RegressionFit fit = ols_fit(d, /*compute_vif=*/false);
  const double a0 = fit.coefficients[0].estimate;
  const double a1 = fit.coefficients[1].estimate;
  const double a2 = fit.coefficients[2].estimate;
  const double a3 = fit.coefficients[3].estimate;

  CubicFit out;
  out.x_lo = x_lo;
  out.x_hi = x_hi;
  out.coefficients = {a0 - a1 * shift + a2 * shift * shift - a3 * shift * shift * shift,
                      a1 - 2.0 * a2 * shift + 3.0 * a3 * shift * shift,
                      a2 - 3.0 * a3 * shift, a3};

  auto value_at = [&](double u) { return a0 + u * (a1 + u * (a2 + u * a3)); };
  const double u_lo = x_lo - shift;
  const double u_hi = x_hi - shift;

  // interior local minimum of the fitted cubic: root of the derivative with
  // positive second derivative, inside the observed range
  const double range = u_hi - u_lo;
  const double deriv_scale =
      std::fabs(a1) + std::fabs(a2) * range + std::fabs(a3) * range * range;
  std::vector<double> candidates;
  if (std::fabs(a3) * range * range > 1e-14 * std::max(deriv_scale, 1e-300)) {
    const double disc = 4.0 * a2 * a2 - 12.0 * a3 * a1;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      const double r1 = (-2.0 * a2 - sq) / (6.0 * a3);
      const double r2 = (-2.0 * a2 + sq) / (6.0 * a3);
      candidates = {std::min(r1, r2), std::max(r1, r2)};
    }
  } else if (a2 != 0.0) {
    candidates = {-a1 / (2.0 * a2)};
  }

  for (double u : candidates) {
    if (u < u_lo || u > u_hi) continue;
    const double second = 6.0 * a3 * u + 2.0 * a2;
    if (second > 0) {
      out.interior = true;
      out.argmin = u + shift;
      out.fitted_min = value_at(u);
      return out;
    }
  }

  const double v_lo = value_at(u_lo);
  const double v_hi = value_at(u_hi);
  out.interior = false;
  out.argmin = v_lo <= v_hi ? x_lo : x_hi;
  out.fitted_min = std::min(v_lo, v_hi);
  return out;
}

}  // namespace ecomplex

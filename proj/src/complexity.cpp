#include "ecomplex/complexity.hpp"

#include <cmath>
#include <stdexcept>

#include "ecomplex/kernels.hpp"
#include "ecomplex/stats.hpp"

namespace ecomplex {

AdvantageMatrix AdvantageMatrix::from_rca(int year, std::vector<std::string> countries,
                                          std::vector<std::string> products, Matrix rca,
                                          double threshold) {
  AdvantageMatrix adv;
  adv.year = year;
  adv.countries = std::move(countries);
  adv.products = std::move(products);
  adv.rca = std::move(rca);
  adv.rca_threshold = threshold;
  const std::size_t nc = adv.rca.rows();
  const std::size_t np = adv.rca.cols();
  adv.m = Matrix(nc, np);
  adv.diversity.assign(nc, 0.0);
  adv.ubiquity.assign(np, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t p = 0; p < np; ++p) {
      const double bit = adv.rca(c, p) >= threshold ? 1.0 : 0.0;
      adv.m(c, p) = bit;
      adv.diversity[c] += bit;
      adv.ubiquity[p] += bit;
    }
  }
  return adv;
}

AdvantageMatrix compute_rca(const TradePanel& panel, int year, double rca_threshold) {
  const int yi = panel.year_index(year);
  if (yi < 0)
    throw std::runtime_error("compute_rca: year " + std::to_string(year) + " not in panel");
  const Matrix& x = panel.values[static_cast<std::size_t>(yi)];
  const std::size_t nc = x.rows();
  const std::size_t np = x.cols();

  std::vector<double> country_total(nc, 0.0);
  std::vector<double> product_total(np, 0.0);
  double global = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    country_total[c] = kernels::sum(x.row(c), np);
    global += country_total[c];
  }
  if (global <= 0) throw std::runtime_error("compute_rca: panel has no exports in this year");
  for (std::size_t p = 0; p < np; ++p) {
    double t = 0.0;
    for (std::size_t c = 0; c < nc; ++c) t += x(c, p);
    product_total[p] = t;
  }

  Matrix r(nc, np);
  for (std::size_t c = 0; c < nc; ++c) {
    if (country_total[c] <= 0) continue;  // row stays zero
    for (std::size_t p = 0; p < np; ++p) {
      if (product_total[p] <= 0) continue;
      const double country_share = x(c, p) / country_total[c];
      const double world_share = product_total[p] / global;
      r(c, p) = country_share / world_share;
    }
  }
  return AdvantageMatrix::from_rca(year, panel.countries, panel.products, std::move(r),
                                   rca_threshold);
}

AdvantageMatrix drop_degenerate(const AdvantageMatrix& adv, DropReport* report) {
  DropReport local;
  DropReport& rep = report ? *report : local;

  std::vector<std::size_t> crows(adv.m.rows());
  std::vector<std::size_t> pcols(adv.m.cols());
  for (std::size_t i = 0; i < crows.size(); ++i) crows[i] = i;
  for (std::size_t i = 0; i < pcols.size(); ++i) pcols[i] = i;

  bool changed = true;
  while (changed) {
    changed = false;
    ++rep.passes;
    std::vector<std::size_t> keep_c, keep_p;
    for (std::size_t c : crows) {
      double k = 0.0;
      for (std::size_t p : pcols) k += adv.m(c, p);
      if (k > 0)
        keep_c.push_back(c);
      else {
        rep.removed_countries.push_back(adv.countries[c]);
        changed = true;
      }
    }
    for (std::size_t p : pcols) {
      double k = 0.0;
      for (std::size_t c : keep_c) k += adv.m(c, p);
      if (k > 0)
        keep_p.push_back(p);
      else {
        rep.removed_products.push_back(adv.products[p]);
        changed = true;
      }
    }
    crows = std::move(keep_c);
    pcols = std::move(keep_p);
    if (crows.empty() || pcols.empty())
      throw std::runtime_error("drop_degenerate: nothing left after removing zero rows/columns");
  }

  AdvantageMatrix out;
  out.year = adv.year;
  out.rca_threshold = adv.rca_threshold;
  out.countries.reserve(crows.size());
  out.products.reserve(pcols.size());
  for (std::size_t c : crows) out.countries.push_back(adv.countries[c]);
  for (std::size_t p : pcols) out.products.push_back(adv.products[p]);
  out.rca = Matrix(crows.size(), pcols.size());
  for (std::size_t i = 0; i < crows.size(); ++i)
    for (std::size_t j = 0; j < pcols.size(); ++j) out.rca(i, j) = adv.rca(crows[i], pcols[j]);
  return AdvantageMatrix::from_rca(out.year, std::move(out.countries), std::move(out.products),
                                   std::move(out.rca), out.rca_threshold);
}

namespace {

void zscore_inplace(std::vector<double>* v) {
  const std::size_t n = v->size();
  const double mu = stats::mean(v->data(), n);
  const double sd = stats::population_sd(v->data(), n);
  if (!(sd > 0))
    throw std::runtime_error("compute_eci_pci: degenerate scores (zero variance)");
  for (double& x : *v) x = (x - mu) / sd;
}

// Start vectors may legitimately be constant (regular degree sequences);
// center them to zero instead of failing.
void zscore_inplace_soft(std::vector<double>* v) {
  const std::size_t n = v->size();
  const double mu = stats::mean(v->data(), n);
  const double sd = stats::population_sd(v->data(), n);
  for (double& x : *v) x = sd > 0 ? (x - mu) / sd : 0.0;
}

// pci = z-score of (1/k_p) sum_c M_cp eci_c
std::vector<double> pci_from_eci(const AdvantageMatrix& adv, const std::vector<double>& eci) {
  const std::size_t nc = adv.m.rows();
  const std::size_t np = adv.m.cols();
  std::vector<double> pci(np, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const double* mrow = adv.m.row(c);
    for (std::size_t p = 0; p < np; ++p)
      if (mrow[p] != 0.0) pci[p] += eci[c];
  }
  for (std::size_t p = 0; p < np; ++p) pci[p] /= adv.ubiquity[p];
  zscore_inplace(&pci);
  return pci;
}

void fix_sign(const AdvantageMatrix& adv, std::vector<double>* eci, std::vector<double>* pci) {
  const double corr = stats::pearson(eci->data(), adv.diversity.data(), eci->size());
  if (corr < 0) {
    for (double& x : *eci) x = -x;
    for (double& x : *pci) x = -x;
  }
}

// Householder reduction of a symmetric matrix to tridiagonal form with the
// accumulated transformation left in z.
void tridiagonalize(Matrix& z, std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t n = z.rows();
  diag.assign(n, 0.0);
  off.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (i > 1) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        off[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = f >= 0 ? -std::sqrt(h) : std::sqrt(h);
        off[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          off[j] = g / h;
          f += off[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          off[j] = g = off[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * off[k] + g * z(i, k);
        }
      }
    } else {
      off[i] = z(i, l);
    }
    diag[i] = h;
  }
  diag[0] = 0.0;
  off[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diag[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    diag[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z(j, i) = 0.0;
      z(i, j) = 0.0;
    }
  }
}

// Implicit-shift QL on a symmetric tridiagonal matrix, rotations applied to
// the eigenvector columns of z. Throws when an eigenvalue fails to settle.
void ql_implicit(std::vector<double>& diag, std::vector<double>& off, Matrix& z, int max_sweeps) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) off[i - 1] = off[i];
  off[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    while (true) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const double dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(off[m]) <= 1e-300 || std::fabs(off[m]) <= 2.3e-16 * dd) break;
      }
      if (m == l) break;
      if (++sweeps > max_sweeps)
        throw std::runtime_error("compute_eci_pci: eigenvalue iteration did not converge");
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = std::hypot(g, 1.0);
      g = diag[m] - diag[l] + off[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
      double s = 1.0, c = 1.0, p = 0.0;
      for (std::size_t i = m; i-- > l;) {
        double f = s * off[i];
        const double b = c * off[i];
        r = std::hypot(f, g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          off[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          f = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * f;
          z(k, i) = c * z(k, i) - s * f;
        }
      }
      if (r == 0.0 && m > l + 1) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0.0;
    }
  }
}

ComplexityScores eci_eigenvector(const AdvantageMatrix& adv, int max_iter, double tol) {
  (void)tol;  // the dense solver converges to machine precision
  const std::size_t nc = adv.m.rows();
  const std::size_t np = adv.m.cols();

  // Symmetric operator similar to the country-space operator S:
  // T = D_c^-1/2 M D_p^-1 M^T D_c^-1/2. T shares the eigenvalues of S, its
  // top eigenvector is sqrt(k_c), and D_c^-1/2 maps its eigenvectors back
  // to eigenvectors of S.
  Matrix b(nc, np);
  for (std::size_t c = 0; c < nc; ++c) {
    const double dc = 1.0 / std::sqrt(adv.diversity[c]);
    for (std::size_t p = 0; p < np; ++p)
      b(c, p) = adv.m(c, p) * dc / std::sqrt(adv.ubiquity[p]);
  }
  Matrix z(nc, nc);
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t j = i; j < nc; ++j) {
      const double v = kernels::dot(b.row(i), b.row(j), np);
      z(i, j) = v;
      z(j, i) = v;
    }

  std::vector<double> eigenvalues, off;
  tridiagonalize(z, eigenvalues, off);
  ql_implicit(eigenvalues, off, z, std::max(30, max_iter));

  // the trivial eigenvector is the one aligned with sqrt(k_c); the scores
  // live in the eigenvector of the largest remaining eigenvalue
  std::vector<double> top(nc);
  for (std::size_t c = 0; c < nc; ++c) top[c] = std::sqrt(adv.diversity[c]);
  const double top_norm = std::sqrt(kernels::dot(top.data(), top.data(), nc));
  std::size_t trivial = 0;
  double best_align = -1.0;
  for (std::size_t j = 0; j < nc; ++j) {
    double proj = 0.0;
    for (std::size_t i = 0; i < nc; ++i) proj += z(i, j) * top[i];
    const double align = std::fabs(proj) / top_norm;
    if (align > best_align) {
      best_align = align;
      trivial = j;
    }
  }
  std::size_t second = nc;
  for (std::size_t j = 0; j < nc; ++j) {
    if (j == trivial) continue;
    if (second == nc || eigenvalues[j] > eigenvalues[second]) second = j;
  }
  if (second == nc || eigenvalues[second] <= 1e-12)
    throw std::runtime_error(
        "compute_eci_pci: degenerate matrix (no distinct second eigenvector)");

  // map back to country space and standardize
  std::vector<double> eci(nc);
  for (std::size_t c = 0; c < nc; ++c) eci[c] = z(c, second) / std::sqrt(adv.diversity[c]);
  zscore_inplace(&eci);
  std::vector<double> pci = pci_from_eci(adv, eci);

  ComplexityScores scores;
  scores.year = adv.year;
  scores.countries = adv.countries;
  scores.products = adv.products;
  scores.eci = std::move(eci);
  scores.pci = std::move(pci);
  scores.method = EciMethod::Eigenvector;
  scores.iterations = 0;  // direct solve; iteration counts apply to reflections
  fix_sign(adv, &scores.eci, &scores.pci);
  return scores;
}

ComplexityScores eci_reflections(const AdvantageMatrix& adv, int max_iter, double tol) {
  const std::size_t nc = adv.m.rows();
  const std::size_t np = adv.m.cols();

  std::vector<double> eci(adv.diversity);
  std::vector<double> pci(adv.ubiquity);
  zscore_inplace_soft(&eci);
  zscore_inplace_soft(&pci);

  // tol <= 0 requests a fixed number of iterations (used by the
  // cross-validation against the eigenvector method)
  int iterations = 0;
  bool converged = tol <= 0;
  for (int it = 0; it < max_iter; ++it) {
    ++iterations;
    std::vector<double> next_eci(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c)
      next_eci[c] = kernels::dot(adv.m.row(c), pci.data(), np) / adv.diversity[c];
    zscore_inplace(&next_eci);

    std::vector<double> next_pci(np, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
      const double* mrow = adv.m.row(c);
      for (std::size_t p = 0; p < np; ++p)
        if (mrow[p] != 0.0) next_pci[p] += next_eci[c];
    }
    for (std::size_t p = 0; p < np; ++p) next_pci[p] /= adv.ubiquity[p];
    zscore_inplace(&next_pci);

    const double ce = stats::pearson(next_eci.data(), eci.data(), nc);
    const double cp = stats::pearson(next_pci.data(), pci.data(), np);
    eci = std::move(next_eci);
    pci = std::move(next_pci);
    if (tol > 0 && ce > 1.0 - tol && cp > 1.0 - tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("compute_eci_pci: reflections did not converge");

  ComplexityScores scores;
  scores.year = adv.year;
  scores.countries = adv.countries;
  scores.products = adv.products;
  scores.eci = std::move(eci);
  scores.pci = std::move(pci);
  scores.method = EciMethod::Reflections;
  scores.iterations = iterations;
  fix_sign(adv, &scores.eci, &scores.pci);
  return scores;
}

}  // namespace

ComplexityScores compute_eci_pci(const AdvantageMatrix& adv, EciMethod method, int max_iter,
                                 double tol) {
  const std::size_t nc = adv.m.rows();
  const std::size_t np = adv.m.cols();
  if (nc < 2 || np < 2)
    throw std::runtime_error("compute_eci_pci: need at least 2 countries and 2 products");
  for (std::size_t c = 0; c < nc; ++c)
    if (adv.diversity[c] <= 0)
      throw std::runtime_error("compute_eci_pci: zero row survived (run drop_degenerate first)");
  for (std::size_t p = 0; p < np; ++p)
    if (adv.ubiquity[p] <= 0)
      throw std::runtime_error(
          "compute_eci_pci: zero column survived (run drop_degenerate first)");
  if (max_iter < 1) throw std::invalid_argument("compute_eci_pci: max_iter must be >= 1");

  return method == EciMethod::Eigenvector ? eci_eigenvector(adv, max_iter, tol)
                                          : eci_reflections(adv, max_iter, tol);
}

}  // namespace ecomplex

#include "ecomplex/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "ecomplex/kernels.hpp"

namespace ecomplex {

ProximityMatrix compute_proximity(const AdvantageMatrix& adv) {
  const std::size_t np = adv.m.cols();
  for (std::size_t p = 0; p < np; ++p)
    if (adv.ubiquity[p] <= 0)
      throw std::runtime_error("compute_proximity: product '" + adv.products[p] +
                               "' has zero ubiquity");

  // product-major copy so co-export counts are dots over contiguous rows
  const Matrix mt = adv.m.transposed();
  ProximityMatrix prox;
  prox.year = adv.year;
  prox.products = adv.products;
  prox.phi = Matrix(np, np);
  const std::size_t nc = adv.m.rows();
  for (std::size_t p = 0; p < np; ++p) {
    prox.phi(p, p) = 1.0;
    for (std::size_t q = p + 1; q < np; ++q) {
      const double together = kernels::dot(mt.row(p), mt.row(q), nc);
      const double phi = together / std::max(adv.ubiquity[p], adv.ubiquity[q]);
      prox.phi(p, q) = phi;
      prox.phi(q, p) = phi;
    }
  }
  return prox;
}

ProximityMatrix pooled_proximity(const std::vector<AdvantageMatrix>& advs) {
  if (advs.empty()) throw std::invalid_argument("pooled_proximity: no advantage matrices");
  ProximityMatrix pooled = compute_proximity(advs.front());
  for (std::size_t i = 1; i < advs.size(); ++i) {
    if (advs[i].products != pooled.products)
      throw std::runtime_error("pooled_proximity: product lists differ across years");
    const ProximityMatrix year = compute_proximity(advs[i]);
    for (std::size_t k = 0; k < pooled.phi.data().size(); ++k)
      pooled.phi.data()[k] += year.phi.data()[k];
  }
  const double scale = 1.0 / static_cast<double>(advs.size());
  for (double& v : pooled.phi.data()) v *= scale;
  for (std::size_t p = 0; p < pooled.phi.rows(); ++p) pooled.phi(p, p) = 1.0;
  pooled.year = 0;  // pooled across years
  return pooled;
}

DensityMatrix compute_density(const AdvantageMatrix& adv, const ProximityMatrix& prox) {
  const std::size_t nc = adv.m.rows();
  const std::size_t np = adv.m.cols();
  if (prox.phi.rows() != np)
    throw std::invalid_argument("compute_density: proximity/advantage size mismatch");

  // row sums excluding the unit diagonal
  std::vector<double> denom(np);
  for (std::size_t p = 0; p < np; ++p) {
    denom[p] = kernels::sum(prox.phi.row(p), np) - 1.0;
    if (denom[p] <= 0)
      throw std::runtime_error("compute_density: product '" + prox.products[p] +
                               "' is isolated (zero proximity row)");
  }

  DensityMatrix dens;
  dens.year = adv.year;
  dens.countries = adv.countries;
  dens.products = adv.products;
  dens.omega = Matrix(nc, np);
  for (std::size_t c = 0; c < nc; ++c) {
    const double* basket = adv.m.row(c);
    for (std::size_t p = 0; p < np; ++p) {
      const double num = kernels::dot(basket, prox.phi.row(p), np) - basket[p];
      dens.omega(c, p) = num / denom[p];
    }
  }
  return dens;
}

std::vector<EntryCurveBin> entry_probability_curve(const std::vector<AdvantageMatrix>& advs,
                                                   const std::vector<DensityMatrix>& densities,
                                                   const std::vector<ProximityMatrix>& proxs,
                                                   int horizon, CurveBinning binning,
                                                   std::size_t n_bins) {
  if (horizon < 1) throw std::invalid_argument("entry_probability_curve: horizon must be >= 1");
  if (n_bins == 0) throw std::invalid_argument("entry_probability_curve: need at least one bin");
  if (binning == CurveBinning::Density && densities.size() != advs.size())
    throw std::invalid_argument("entry_probability_curve: densities not aligned with advs");
  if (binning == CurveBinning::MaxProximity && proxs.size() != advs.size())
    throw std::invalid_argument("entry_probability_curve: proximities not aligned with advs");

  std::unordered_map<int, std::size_t> by_year;
  for (std::size_t i = 0; i < advs.size(); ++i) by_year.emplace(advs[i].year, i);

  std::vector<EntryCurveBin> bins(n_bins);
  const double width = 1.0 / static_cast<double>(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lo = static_cast<double>(b) * width;
    bins[b].hi = static_cast<double>(b + 1) * width;
  }

  bool any_pair = false;
  for (std::size_t i = 0; i < advs.size(); ++i) {
    const auto later = by_year.find(advs[i].year + horizon);
    if (later == by_year.end()) continue;
    any_pair = true;
    const AdvantageMatrix& now = advs[i];
    const AdvantageMatrix& then = advs[later->second];

    // entity lookup by label; membership can differ across years
    std::unordered_map<std::string, std::size_t> cix, pix;
    for (std::size_t c = 0; c < then.countries.size(); ++c) cix.emplace(then.countries[c], c);
    for (std::size_t p = 0; p < then.products.size(); ++p) pix.emplace(then.products[p], p);

    for (std::size_t c = 0; c < now.countries.size(); ++c) {
      const auto c2 = cix.find(now.countries[c]);
      if (c2 == cix.end()) continue;
      for (std::size_t p = 0; p < now.products.size(); ++p) {
        if (now.rca(c, p) >= now.rca_threshold) continue;  // already in the basket
        const auto p2 = pix.find(now.products[p]);
        if (p2 == pix.end()) continue;

        double x = 0.0;
        if (binning == CurveBinning::Density) {
          x = densities[i].omega(c, p);
        } else {
          const double* phi_row = proxs[i].phi.row(p);
          const double* basket = now.m.row(c);
          double best = 0.0;
          for (std::size_t q = 0; q < now.products.size(); ++q)
            if (q != p && basket[q] != 0.0 && phi_row[q] > best) best = phi_row[q];
          x = best;
        }
        auto b = static_cast<long long>(x / width);
        b = std::clamp<long long>(b, 0, static_cast<long long>(n_bins) - 1);
        EntryCurveBin& bin = bins[static_cast<std::size_t>(b)];
        ++bin.n_pairs;
        if (then.rca(c2->second, p2->second) >= then.rca_threshold) ++bin.n_transitions;
      }
    }
  }
  if (!any_pair)
    throw std::runtime_error("entry_probability_curve: horizon spans beyond the data");

  for (EntryCurveBin& bin : bins)
    bin.probability = bin.n_pairs == 0
                          ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(bin.n_transitions) / static_cast<double>(bin.n_pairs);
  return bins;
}

}  // namespace ecomplex

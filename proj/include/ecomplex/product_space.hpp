#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ecomplex/complexity.hpp"
#include "ecomplex/matrix.hpp"

namespace ecomplex {

struct ProximityMatrix {
  int year = 0;
  std::vector<std::string> products;
  Matrix phi;  // symmetric, in [0,1], unit diagonal
};

struct DensityMatrix {
  int year = 0;
  std::vector<std::string> countries;
  std::vector<std::string> products;
  Matrix omega;  // in [0,1]
};

// phi[p,q] = sum_c M_cp M_cq / max(k_p, k_q); diagonal set to 1.
// Throws when a zero-ubiquity product is present.
ProximityMatrix compute_proximity(const AdvantageMatrix& adv);

// Element-wise mean of the per-year proximity matrices (all matrices must
// share the same product list).
ProximityMatrix pooled_proximity(const std::vector<AdvantageMatrix>& advs);

// omega[c,p] = sum_{q != p} M_cq phi[p,q] / sum_{q != p} phi[p,q].
// The diagonal is excluded from both sums. Throws on an isolated product.
DensityMatrix compute_density(const AdvantageMatrix& adv, const ProximityMatrix& prox);

enum class CurveBinning { Density, MaxProximity };

struct EntryCurveBin {
  double lo = 0.0, hi = 0.0;
  std::size_t n_pairs = 0;
  std::size_t n_transitions = 0;
  double probability = 0.0;  // NaN when the bin is empty
};

// Probability that a (country, product) pair below the RCA threshold at
// year y reaches the threshold at y + horizon, as a function of the chosen
// relatedness measure, pooled over all year pairs with both ends present.
// advs/densities/proxs are per-year and aligned; entity membership may vary
// across years (pairs missing at y + horizon are skipped).
std::vector<EntryCurveBin> entry_probability_curve(const std::vector<AdvantageMatrix>& advs,
                                                   const std::vector<DensityMatrix>& densities,
                                                   const std::vector<ProximityMatrix>& proxs,
                                                   int horizon, CurveBinning binning,
                                                   std::size_t n_bins = 20);

}  // namespace ecomplex

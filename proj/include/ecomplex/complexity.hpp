#pragma once

#include <string>
#include <vector>

#include "ecomplex/matrix.hpp"
#include "ecomplex/panel.hpp"

namespace ecomplex {

// Per-year revealed-comparative-advantage structure: the RCA ratio matrix,
// its binarization at the threshold, and the derived diversity/ubiquity
// degree vectors.
struct AdvantageMatrix {
  int year = 0;
  std::vector<std::string> countries;
  std::vector<std::string> products;
  Matrix rca;                   // R[c,p]
  Matrix m;                     // 1 when R >= threshold
  std::vector<double> diversity;  // k_c, row sums of m
  std::vector<double> ubiquity;   // k_p, column sums of m
  double rca_threshold = 1.0;

  static AdvantageMatrix from_rca(int year, std::vector<std::string> countries,
                                  std::vector<std::string> products, Matrix rca,
                                  double threshold = 1.0);
};

// R[c,p] = (X_cp / sum_p X_cp) / (sum_c X_cp / sum_cp X_cp). Rows or columns
// with no exports yield zero RCA across the row/column.
AdvantageMatrix compute_rca(const TradePanel& panel, int year, double rca_threshold = 1.0);

struct DropReport {
  std::vector<std::string> removed_countries;
  std::vector<std::string> removed_products;
  int passes = 0;
};

// Iteratively removes zero rows and zero columns of m until none remain.
// Throws when everything would be removed.
AdvantageMatrix drop_degenerate(const AdvantageMatrix& adv, DropReport* report = nullptr);

enum class EciMethod { Eigenvector, Reflections };

struct ComplexityScores {
  int year = 0;
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> eci;  // z-scored, corr(eci, k_c) >= 0
  std::vector<double> pci;  // z-scored
  EciMethod method = EciMethod::Eigenvector;
  int iterations = 0;
};

// Eigenvector method: the eigenvector of the second-largest eigenvalue of
// the country-space operator S = D_c^-1 M D_p^-1 M^T, computed through the
// similar symmetric operator and deflated power iteration. Reflections
// method: the degree-seeded average-of-averages iteration with per-step
// z-scoring. Both are z-scored per year with the sign fixed against
// diversity.
ComplexityScores compute_eci_pci(const AdvantageMatrix& adv,
                                 EciMethod method = EciMethod::Eigenvector, int max_iter = 1000,
                                 double tol = 1e-9);

}  // namespace ecomplex

#include "ecomplex/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "ecomplex/stats.hpp"

namespace ecomplex {

void JumpConfig::validate() const {
  if (backward_window < 1 || forward_window < 1)
    throw std::invalid_argument("JumpConfig: windows must be >= 1");
  if (transition_gap < 1) throw std::invalid_argument("JumpConfig: transition gap must be >= 1");
  if (!(rca_threshold > 0)) throw std::invalid_argument("JumpConfig: threshold must be positive");
}

JumpScan detect_jumps(const std::vector<AdvantageMatrix>& advs, const JumpConfig& cfg,
                      const std::vector<int>& baseline_years) {
  cfg.validate();
  if (advs.empty()) throw std::invalid_argument("detect_jumps: no advantage matrices");
  for (const auto& adv : advs)
    if (adv.countries != advs.front().countries || adv.products != advs.front().products)
      throw std::invalid_argument("detect_jumps: advantage matrices must share one universe");

  std::unordered_map<int, std::size_t> by_year;
  for (std::size_t i = 0; i < advs.size(); ++i) by_year.emplace(advs[i].year, i);

  JumpScan scan;
  const double thr = cfg.rca_threshold;
  std::vector<int> baselines(baseline_years);
  std::sort(baselines.begin(), baselines.end());

  // a baseline is evaluable only when every window year exists
  std::vector<std::size_t> back_ix, fwd_ix;
  for (int y : baselines) {
    bool ok = by_year.count(y) && by_year.count(y + cfg.transition_gap);
    for (int j = 1; ok && j <= cfg.backward_window; ++j) ok = by_year.count(y - j) > 0;
    for (int j = 0; ok && j < cfg.forward_window; ++j)
      ok = by_year.count(y + cfg.transition_gap + j) > 0;
    if (ok) scan.baselines_evaluated.push_back(y);
  }
  if (scan.baselines_evaluated.empty()) {
    scan.empty_reason = "no baseline year has full backward/forward window coverage";
    return scan;
  }

  const std::size_t nc = advs.front().countries.size();
  const std::size_t np = advs.front().products.size();
  for (int y : scan.baselines_evaluated) {
    const AdvantageMatrix& base = advs[by_year.at(y)];
    const AdvantageMatrix& entry = advs[by_year.at(y + cfg.transition_gap)];
    back_ix.clear();
    fwd_ix.clear();
    for (int j = 1; j <= cfg.backward_window; ++j) back_ix.push_back(by_year.at(y - j));
    for (int j = 0; j < cfg.forward_window; ++j)
      fwd_ix.push_back(by_year.at(y + cfg.transition_gap + j));

    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t p = 0; p < np; ++p) {
        if (!(base.rca(c, p) < thr)) continue;
        if (!(entry.rca(c, p) >= thr)) continue;
        bool ok = true;
        for (std::size_t ix : back_ix)
          if (!(advs[ix].rca(c, p) < thr)) {
            ok = false;
            break;
          }
        for (std::size_t k = 0; ok && k < fwd_ix.size(); ++k)
          if (!(advs[fwd_ix[k]].rca(c, p) >= thr)) ok = false;
        if (!ok) continue;

        JumpEvent event;
        event.country = base.countries[c];
        event.product = base.products[p];
        event.baseline_year = y;
        event.entry_year = y + cfg.transition_gap;
        scan.events.push_back(std::move(event));
      }
    }
  }
  return scan;
}

std::pair<int, bool> survival_time(const JumpEvent& event,
                                   const std::vector<AdvantageMatrix>& advs,
                                   double rca_threshold) {
  std::unordered_map<int, std::size_t> by_year;
  for (std::size_t i = 0; i < advs.size(); ++i) by_year.emplace(advs[i].year, i);
  const auto start = by_year.find(event.entry_year);
  if (start == by_year.end())
    throw std::invalid_argument("survival_time: entry year not covered by the data");

  const AdvantageMatrix& first = advs[start->second];
  const auto cit = std::find(first.countries.begin(), first.countries.end(), event.country);
  const auto pit = std::find(first.products.begin(), first.products.end(), event.product);
  if (cit == first.countries.end() || pit == first.products.end())
    throw std::invalid_argument("survival_time: event entity missing from the universe");
  const std::size_t c = static_cast<std::size_t>(cit - first.countries.begin());
  const std::size_t p = static_cast<std::size_t>(pit - first.products.begin());

  int years = 0;
  int current = event.entry_year;
  while (true) {
    const auto it = by_year.find(current);
    if (it == by_year.end()) return {years, true};  // ran off the panel: censored
    if (!(advs[it->second].rca(c, p) >= rca_threshold)) return {years, false};
    ++years;
    ++current;
  }
}

std::vector<SurvivalCorrelationRow> survival_vs_development(
    const std::vector<JumpEvent>& events, const std::vector<ComplexityScores>& scores,
    const std::vector<AdvantageMatrix>& advs, const std::vector<DensityMatrix>& densities,
    const CovariateTable& covariates, const std::vector<int>& reference_years,
    bool include_censored) {
  // per-country mean survival
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& e : events) {
    if (e.censored && !include_censored) continue;
    auto& slot = acc[e.country];
    slot.first += static_cast<double>(e.survival);
    slot.second += 1;
  }
  if (acc.size() < 3)
    throw std::runtime_error("survival_vs_development: fewer than 3 countries with survivals");

  std::unordered_map<int, std::size_t> score_by_year, adv_by_year, dens_by_year;
  for (std::size_t i = 0; i < scores.size(); ++i) score_by_year.emplace(scores[i].year, i);
  for (std::size_t i = 0; i < advs.size(); ++i) adv_by_year.emplace(advs[i].year, i);
  for (std::size_t i = 0; i < densities.size(); ++i) dens_by_year.emplace(densities[i].year, i);

  std::vector<SurvivalCorrelationRow> rows;
  for (int ref : reference_years) {
    SurvivalCorrelationRow row;
    row.ref_year = ref;
    std::vector<double> surv_eci, val_eci, surv_gdp, val_gdp, surv_div, val_div, surv_den,
        val_den;

    const auto sit = score_by_year.find(ref);
    const auto ait = adv_by_year.find(ref);
    const auto dit = dens_by_year.find(ref);
    for (const auto& [country, sum_count] : acc) {
      const double mean_survival = sum_count.first / static_cast<double>(sum_count.second);
      if (sit != score_by_year.end()) {
        const ComplexityScores& sc = scores[sit->second];
        const auto cix = std::find(sc.countries.begin(), sc.countries.end(), country);
        if (cix != sc.countries.end()) {
          surv_eci.push_back(mean_survival);
          val_eci.push_back(sc.eci[static_cast<std::size_t>(cix - sc.countries.begin())]);
        }
      }
      const CovariateRow* cov = covariates.find(country, ref);
      if (cov != nullptr && !std::isnan(cov->gdp_pc)) {
        surv_gdp.push_back(mean_survival);
        val_gdp.push_back(cov->gdp_pc);
      }
      if (ait != adv_by_year.end()) {
        const AdvantageMatrix& adv = advs[ait->second];
        const auto cix = std::find(adv.countries.begin(), adv.countries.end(), country);
        if (cix != adv.countries.end()) {
          const std::size_t c = static_cast<std::size_t>(cix - adv.countries.begin());
          surv_div.push_back(mean_survival);
          val_div.push_back(adv.diversity[c]);
          if (dit != dens_by_year.end()) {
            // mean density across the option set at the reference year
            const DensityMatrix& den = densities[dit->second];
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t p = 0; p < adv.m.cols(); ++p)
              if (adv.rca(c, p) < adv.rca_threshold) {
                sum += den.omega(c, p);
                ++n;
              }
            if (n > 0) {
              surv_den.push_back(mean_survival);
              val_den.push_back(sum / static_cast<double>(n));
            }
          }
        }
      }
    }

    auto corr = [](const std::vector<double>& s, const std::vector<double>& v) {
      return s.size() >= 3 ? stats::pearson(s.data(), v.data(), s.size())
                           : std::numeric_limits<double>::quiet_NaN();
    };
    row.n_countries = acc.size();
    row.r_eci = corr(surv_eci, val_eci);
    row.r_gdp = corr(surv_gdp, val_gdp);
    row.r_diversity = corr(surv_div, val_div);
    row.r_option_density = corr(surv_den, val_den);
    rows.push_back(row);
  }
  return rows;
}

AutocorrelationResult direction_autocorrelation(const std::vector<DirectionVector>& vectors,
                                                int lag, int grid_step) {
  if (lag < 1) throw std::invalid_argument("direction_autocorrelation: lag must be >= 1");
  if (grid_step < 1)
    throw std::invalid_argument("direction_autocorrelation: grid step must be >= 1");

  std::map<std::string, std::map<int, std::pair<double, double>>> series;
  std::size_t longest = 0;
  for (const auto& v : vectors)
    series[v.country][v.y_start] = {v.omega_bar, v.pci_bar};
  for (const auto& [country, s] : series) longest = std::max(longest, s.size());
  if (static_cast<std::size_t>(lag) >= longest)
    throw std::invalid_argument("direction_autocorrelation: lag exceeds every series length");

  AutocorrelationResult out;
  out.lag = lag;
  std::vector<double> ac_omega, ac_pi;
  const int offset = lag * grid_step;

  for (const auto& [country, s] : series) {
    if (s.size() <= static_cast<std::size_t>(lag) + 1) {
      ++out.skipped_short;
      continue;
    }
    std::vector<double> o_now, o_later, p_now, p_later;
    for (const auto& [year, op] : s) {
      const auto later = s.find(year + offset);
      if (later == s.end()) continue;
      o_now.push_back(op.first);
      o_later.push_back(later->second.first);
      p_now.push_back(op.second);
      p_later.push_back(later->second.second);
    }
    if (o_now.size() < 2) {
      ++out.skipped_short;
      continue;
    }
    const double ro = stats::pearson(o_now.data(), o_later.data(), o_now.size());
    const double rp = stats::pearson(p_now.data(), p_later.data(), p_now.size());
    if (std::isnan(ro) && std::isnan(rp)) {
      ++out.skipped_zero_variance;
      continue;
    }
    if (!std::isnan(ro)) ac_omega.push_back(ro);
    if (!std::isnan(rp)) ac_pi.push_back(rp);
  }

  auto summarize = [](const std::vector<double>& ac, double* mean_out, double* t_out,
                      double* p_out, std::size_t* n_out) {
    *n_out = ac.size();
    if (ac.size() < 2) return;
    const double mu = stats::mean(ac.data(), ac.size());
    const double sd = stats::sample_sd(ac.data(), ac.size());
    *mean_out = mu;
    if (sd > 0) {
      const double t = mu / (sd / std::sqrt(static_cast<double>(ac.size())));
      *t_out = t;
      *p_out = stats::t_sf_two_sided(t, static_cast<double>(ac.size() - 1));
    }
  };
  summarize(ac_omega, &out.mean_ac_omega, &out.t_omega, &out.p_omega, &out.n_countries_omega);
  summarize(ac_pi, &out.mean_ac_pi, &out.t_pi, &out.p_pi, &out.n_countries_pi);
  if (out.n_countries_omega == 0 && out.n_countries_pi == 0)
    throw std::runtime_error("direction_autocorrelation: no country series long enough");
  return out;
}

}  // namespace ecomplex

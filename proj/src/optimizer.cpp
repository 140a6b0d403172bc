// Copyright 2026 The MCB-MSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "mcb/csv.hpp"
#include "mcb/lambert_w.hpp"
#include "mcb/rng.hpp"

namespace mcb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe_infeasible(std::size_t user, double best, double gamma_min) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "infeasible instance: user %zu best SINR %.6g below gamma_min %.6g at max power",
                user, best, gamma_min);
  return buf;
}

}  // namespace

// --- catalog & caching -----------------------------------------------------

double ContentCatalog::top_mass(int files) const {
  const int n = std::clamp(files, 0, file_count());
  double m = 0.0;
  for (int f = 0; f < n; ++f) m += popularity[static_cast<std::size_t>(f)];
  return m;
}

ContentCatalog zipf_popularity(int file_count, double alpha) {
  if (file_count < 1) throw InvalidArgument("zipf: file count must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidArgument("zipf: alpha must be >= 0");
  ContentCatalog c;
  c.skew = alpha;
  c.popularity.resize(static_cast<std::size_t>(file_count));
  for (int f = 0; f < file_count; ++f) {
    c.popularity[static_cast<std::size_t>(f)] = std::pow(static_cast<double>(f + 1), -alpha);
  }
  const double z = std::accumulate(c.popularity.begin(), c.popularity.end(), 0.0);
  for (double& p : c.popularity) p /= z;
  return c;
}

double CacheVector::hit_mass(std::size_t bs, const ContentCatalog& catalog) const {
  const auto& row = q.at(bs);
  double m = 0.0;
  for (std::size_t f = 0; f < row.size() && f < catalog.popularity.size(); ++f) {
    m += catalog.popularity[f] * row[f];
  }
  return m;
}

bool CacheVector::feasible() const {
  for (std::size_t i = 0; i < q.size(); ++i) {
    double s = 0.0;
    for (double v : q[i]) {
      if (v < 0.0 || v > 1.0) return false;
      s += v;
    }
    if (s > capacity.at(i) + 1e-12) return false;
  }
  return true;
}

CacheVector optimal_cache(const ContentCatalog& catalog, std::span<const int> capacities) {
  CacheVector cv;
  const std::size_t f_count = catalog.popularity.size();
  // The catalog is sorted, but rank explicitly so unsorted input still works.
  std::vector<std::size_t> order(f_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return catalog.popularity[a] > catalog.popularity[b];
  });
  for (int cap : capacities) {
    if (cap < 0) throw InvalidArgument("cache capacity must be >= 0");
    std::vector<double> row(f_count, 0.0);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(cap), f_count);
    for (std::size_t r = 0; r < take; ++r) row[order[r]] = 1.0;
    cv.q.push_back(std::move(row));
    cv.capacity.push_back(cap);
  }
  return cv;
}

// --- radio model -----------------------------------------------------------

void RadioInstance::validate() const {
  const std::size_t b = bs_count();
  if (b == 0 || user_count() == 0) throw InvalidArgument("radio instance needs stations and users");
  for (const auto& row : gain) {
    if (row.size() != user_count()) throw InvalidArgument("ragged gain matrix");
    for (double g : row) {
      if (!(g > 0.0)) throw InvalidArgument("channel gains must be > 0");
    }
  }
  if (is_macro.size() != b || max_power_w.size() != b || harvest_w.size() != b ||
      cache_capacity.size() != b) {
    throw InvalidArgument("per-station vectors must match the station count");
  }
  for (double p : max_power_w) {
    if (!(p > 0.0)) throw InvalidArgument("max power must be > 0");
  }
  for (double e : harvest_w) {
    if (!(e >= 0.0)) throw InvalidArgument("harvest must be >= 0");
  }
  if (!(gamma_min > 0.0)) throw InvalidArgument("gamma_min must be > 0");
  if (!(noise_w > 0.0) || !(bandwidth_hz > 0.0)) throw InvalidArgument("noise and bandwidth must be > 0");
  if (!(bandwidth_share > 0.0 && bandwidth_share <= 1.0)) {
    throw InvalidArgument("bandwidth_share must be in (0, 1]");
  }
  if (!(sharing_index >= 0.0 && sharing_index <= 1.0)) {
    throw InvalidArgument("sharing_index must be in [0, 1]");
  }
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be >= 0");
}

std::vector<std::size_t> PrimalState::loads(std::size_t bs_count) const {
  std::vector<std::size_t> k(bs_count, 0);
  for (int a : association) ++k.at(static_cast<std::size_t>(a));
  return k;
}

double sinr(std::size_t bs, std::size_t user, std::span<const double> power_w,
            const RadioInstance& instance) {
  double interference = instance.noise_w;
  for (std::size_t i = 0; i < instance.bs_count(); ++i) {
    if (i != bs) interference += power_w[i] * instance.gain[i][user];
  }
  return power_w[bs] * instance.gain[bs][user] / interference;
}

double link_capacity(std::size_t bs, std::size_t user, std::span<const double> power_w,
                     const RadioInstance& instance) {
  return instance.bandwidth_hz * std::log1p(sinr(bs, user, power_w, instance));
}

double throughput(std::size_t bs, std::size_t user, std::span<const double> power_w,
                  std::span<const int> association, const CacheVector& cache,
                  const ContentCatalog& catalog, const RadioInstance& instance) {
  if (association[user] != static_cast<int>(bs)) return 0.0;
  const auto k = static_cast<double>(
      std::count(association.begin(), association.end(), static_cast<int>(bs)));
  const double hit = cache.hit_mass(bs, catalog);
  return std::pow(hit, k) * instance.bandwidth_hz * instance.bandwidth_share / k *
         std::log1p(sinr(bs, user, power_w, instance));
}

int associate(std::size_t user, double mu_j, std::span<const double> v,
              std::span<const double> power_w, const RadioInstance& instance) {
  int best = -1;
  double best_score = kNegInf;
  for (std::size_t i = 0; i < instance.bs_count(); ++i) {
    const double g = sinr(i, user, power_w, instance);
    const double c = instance.bandwidth_hz * std::log1p(g);
    if (!(c > 0.0)) continue;
    const double score = std::log(c) + mu_j * g - v[i];
    if (best < 0 || score > best_score) {
      best = static_cast<int>(i);
      best_score = score;
    }
  }
  if (best < 0) throw DomainError("user " + std::to_string(user) + " cannot be associated");
  return best;
}

double optimal_k(double v, double hit_mass) {
  if (!(hit_mass > 0.0 && hit_mass < 1.0)) {
    throw DomainError("optimal_k: hit mass must lie in (0, 1)");
  }
  const double a = 2.0 * std::log(hit_mass);
  return -lambert_w0(-a * std::exp(v - 1.0)) / a;
}

double k_curvature(double hit_mass, double k) { return 2.0 * std::log(hit_mass) - 1.0 / k; }

double StepSchedule::at(int t) const { return step0 / std::sqrt(static_cast<double>(std::max(t, 1))); }

DualState dual_update(const DualState& dual, std::span<const int> association,
                      std::span<const double> k, std::span<const double> power_w,
                      const RadioInstance& instance, const StepSchedule& schedule) {
  DualState next = dual;
  next.iteration = dual.iteration + 1;
  next.step = schedule.at(next.iteration);
  std::vector<double> load(instance.bs_count(), 0.0);
  for (std::size_t j = 0; j < association.size(); ++j) {
    const auto i = static_cast<std::size_t>(association[j]);
    load[i] += 1.0;
    const double served = sinr(i, j, power_w, instance);
    next.mu[j] = std::max(0.0, dual.mu[j] - next.step * (served - instance.gamma_min));
  }
  for (std::size_t i = 0; i < instance.bs_count(); ++i) {
    next.v[i] = std::max(0.0, dual.v[i] - next.step * (k[i] - load[i]));
  }
  return next;
}

double association_objective(std::span<const int> association, std::span<const double> power_w,
                             const RadioInstance& instance, const CacheVector& cache,
                             const ContentCatalog& catalog) {
  const std::size_t b = instance.bs_count();
  std::vector<double> load(b, 0.0);
  double obj = 0.0;
  for (std::size_t j = 0; j < association.size(); ++j) {
    const auto i = static_cast<std::size_t>(association[j]);
    load[i] += 1.0;
    const double c = link_capacity(i, j, power_w, instance);
    if (!(c > 0.0)) return kNegInf;
    obj += std::log(c);
  }
  for (std::size_t i = 0; i < b; ++i) {
    const double k = load[i];
    if (k == 0.0) continue;
    const double hit = cache.hit_mass(i, catalog);
    if (!(hit > 0.0)) return kNegInf;
    obj += k * k * std::log(hit) - k * std::log(k);
  }
  return obj;
}

bool sinr_feasible(std::span<const int> association, std::span<const double> power_w,
                   const RadioInstance& instance) {
  for (std::size_t j = 0; j < association.size(); ++j) {
    if (sinr(static_cast<std::size_t>(association[j]), j, power_w, instance) < instance.gamma_min) {
      return false;
    }
  }
  return true;
}

// --- power sharing ---------------------------------------------------------

double PowerSettlement::total_grid() const {
  return std::accumulate(grid_w.begin(), grid_w.end(), 0.0);
}

PowerSettlement power_and_grid(const RadioInstance& instance, std::span<const double> power_w) {
  const std::size_t b = instance.bs_count();
  PowerSettlement s;
  s.grid_w.assign(b, 0.0);
  s.shared_w.assign(b, std::vector<double>(b, 0.0));
  std::vector<double> surplus(b, 0.0), deficit(b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    if (power_w[i] > instance.max_power_w[i] * (1.0 + 1e-12)) {
      throw InvalidArgument("power above station maximum");
    }
    const double diff = instance.harvest_w[i] - power_w[i];
    (diff > 0.0 ? surplus[i] : deficit[i]) = std::abs(diff);
  }
  const double beta = instance.sharing_index;
  if (beta > 0.0) {
    std::vector<std::size_t> donors(b);
    std::iota(donors.begin(), donors.end(), 0);
    std::stable_sort(donors.begin(), donors.end(),
                     [&](std::size_t a, std::size_t c) { return surplus[a] > surplus[c]; });
    for (std::size_t d : donors) {
      if (!(surplus[d] > 0.0)) break;
      for (std::size_t r = 0; r < b && surplus[d] > 0.0; ++r) {
        if (r == d || !(deficit[r] > 0.0)) continue;
        const double send = std::min(surplus[d], deficit[r] / beta);
        s.shared_w[d][r] += send;
        surplus[d] -= send;
        deficit[r] = std::max(0.0, deficit[r] - beta * send);
      }
    }
  }
  s.grid_w = deficit;
  return s;
}

bool power_balance_holds(const RadioInstance& instance, std::span<const double> power_w,
                         const PowerSettlement& settlement, double tol) {
  const std::size_t b = instance.bs_count();
  for (std::size_t i = 0; i < b; ++i) {
    if (settlement.grid_w[i] < 0.0) return false;
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      if (k == i) continue;
      if (settlement.shared_w[k][i] < 0.0 || settlement.shared_w[i][k] < 0.0) return false;
      in += settlement.shared_w[k][i];
      out += settlement.shared_w[i][k];
    }
    const double supply =
        settlement.grid_w[i] + instance.harvest_w[i] + instance.sharing_index * in - out;
    if (power_w[i] > supply + tol) return false;
  }
  return true;
}

InfeasibleInstance::InfeasibleInstance(std::size_t user, double best_sinr, double gamma_min)
    : Error(describe_infeasible(user, best_sinr, gamma_min)), user_(user) {}

void check_feasible(const RadioInstance& instance) {
  instance.validate();
  for (std::size_t j = 0; j < instance.user_count(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < instance.bs_count(); ++i) {
      best = std::max(best, sinr(i, j, instance.max_power_w, instance));
    }
    if (best < instance.gamma_min) throw InfeasibleInstance(j, best, instance.gamma_min);
  }
}

// --- solver ----------------------------------------------------------------

namespace {

std::vector<double> loads_of(std::span<const int> association, std::size_t b) {
  std::vector<double> load(b, 0.0);
  for (int a : association) load[static_cast<std::size_t>(a)] += 1.0;
  return load;
}

double grid_cost(const RadioInstance& instance, std::span<const double> power_w) {
  return instance.eta * power_and_grid(instance, power_w).total_grid();
}

void improve_by_moves(std::vector<int>& association, std::span<const double> power_w,
                      const RadioInstance& instance, const CacheVector& cache,
                      const ContentCatalog& catalog) {
  double current = association_objective(association, power_w, instance, cache, catalog);
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t j = 0; j < association.size(); ++j) {
      const int from = association[j];
      for (std::size_t i = 0; i < instance.bs_count(); ++i) {
        if (static_cast<int>(i) == from) continue;
        if (sinr(i, j, power_w, instance) < instance.gamma_min) continue;
        association[j] = static_cast<int>(i);
        const double cand = association_objective(association, power_w, instance, cache, catalog);
        if (cand > current + 1e-12 * std::max(1.0, std::abs(current))) {
          current = cand;
          moved = true;
          break;
        }
        association[j] = from;
      }
    }
  }
}

void refine_powers(std::vector<double>& power_w, std::span<const int> association,
                   const RadioInstance& instance, const CacheVector& cache,
                   const ContentCatalog& catalog, int levels) {
  auto score = [&](std::span<const double> p) {
    if (!sinr_feasible(association, p, instance)) return kNegInf;
    return association_objective(association, p, instance, cache, catalog) - grid_cost(instance, p);
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < instance.bs_count(); ++i) {
      std::vector<double> trial = power_w;
      double best_p = power_w[i];
      double best = score(power_w);
      for (int l = 0; l < levels; ++l) {
        trial[i] = instance.max_power_w[i] * db_to_linear(-static_cast<double>(l));
        const double s = score(trial);
        if (s > best) {
          best = s;
          best_p = trial[i];
        }
      }
      power_w[i] = best_p;
    }
  }
}

}  // namespace

SolveResult solve(const RadioInstance& instance, const ContentCatalog& catalog,
                  const SolverOptions& options) {
  check_feasible(instance);
  if (options.max_iter < 1) throw InvalidArgument("solver max_iter must be >= 1");
  const std::size_t b = instance.bs_count();
  const std::size_t u = instance.user_count();

  const CacheVector cache = optimal_cache(catalog, instance.cache_capacity);
  std::vector<double> hit(b);
  for (std::size_t i = 0; i < b; ++i) hit[i] = cache.hit_mass(i, catalog);

  std::vector<double> power = instance.max_power_w;
  const double grid = grid_cost(instance, power);

  SolveResult result;
  DualState dual;
  dual.mu.assign(u, 0.0);
  dual.v.assign(b, 0.0);

  std::vector<int> association(u, 0);
  std::vector<int> best_assoc;
  double best_obj = kNegInf;
  std::vector<double> k(b, 0.0);
  double min_mult = 0.0;

  for (int t = 1; t <= options.max_iter; ++t) {
    for (std::size_t j = 0; j < u; ++j) {
      association[j] = associate(j, dual.mu[j], dual.v, power, instance);
    }
    const std::vector<double> load = loads_of(association, b);
    for (std::size_t i = 0; i < b; ++i) {
      if (hit[i] >= 1.0) {
        k[i] = load[i];
      } else if (hit[i] <= 0.0) {
        k[i] = 0.0;
      } else {
        k[i] = optimal_k(dual.v[i], hit[i]);
      }
    }

    const double obj = association_objective(association, power, instance, cache, catalog) - grid;
    double violation = 0.0;
    for (std::size_t j = 0; j < u; ++j) {
      const double g = sinr(static_cast<std::size_t>(association[j]), j, power, instance);
      violation = std::max(violation, instance.gamma_min - g);
    }
    for (std::size_t i = 0; i < b; ++i) violation = std::max(violation, std::abs(k[i] - load[i]));
    result.trace.push_back({t, obj, violation});

    if (sinr_feasible(association, power, instance) && obj > best_obj) {
      best_obj = obj;
      best_assoc = association;
    }

    DualState next = dual_update(dual, association, k, power, instance, options.schedule);
    double change = 0.0;
    for (std::size_t j = 0; j < u; ++j) {
      change = std::max(change, std::abs(next.mu[j] - dual.mu[j]));
      min_mult = std::min(min_mult, next.mu[j]);
    }
    for (std::size_t i = 0; i < b; ++i) {
      change = std::max(change, std::abs(next.v[i] - dual.v[i]));
      min_mult = std::min(min_mult, next.v[i]);
    }
    dual = std::move(next);
    result.iterations = t;
    if (t > 1 && change < options.tol) {
      result.converged = true;
      break;
    }
  }

  if (best_assoc.empty()) best_assoc = association;
  if (options.local_search) improve_by_moves(best_assoc, power, instance, cache, catalog);
  if (options.power_refinement) {
    refine_powers(power, best_assoc, instance, cache, catalog, options.power_levels);
    if (options.local_search) improve_by_moves(best_assoc, power, instance, cache, catalog);
  }

  const PowerSettlement settlement = power_and_grid(instance, power);
  result.primal.association = std::move(best_assoc);
  result.primal.power_w = power;
  result.primal.grid_w = settlement.grid_w;
  result.primal.shared_w = settlement.shared_w;
  const auto final_load = loads_of(result.primal.association, b);
  result.primal.k = final_load;
  result.dual = std::move(dual);
  result.min_multiplier = min_mult;
  result.objective =
      association_objective(result.primal.association, power, instance, cache, catalog) -
      instance.eta * settlement.total_grid();
  return result;
}

std::vector<int> strongest_signal_association(std::span<const double> power_w,
                                              const RadioInstance& instance) {
  std::vector<int> a(instance.user_count(), 0);
  for (std::size_t j = 0; j < instance.user_count(); ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < instance.bs_count(); ++i) {
      const double rx = power_w[i] * instance.gain[i][j];
      if (rx > best) {
        best = rx;
        a[j] = static_cast<int>(i);
      }
    }
  }
  return a;
}

namespace {

PrimalState settle(const RadioInstance& instance, std::vector<double> power) {
  PrimalState p;
  p.association = strongest_signal_association(power, instance);
  const PowerSettlement s = power_and_grid(instance, power);
  p.power_w = std::move(power);
  p.grid_w = s.grid_w;
  p.shared_w = s.shared_w;
  p.k = loads_of(p.association, instance.bs_count());
  return p;
}

}  // namespace

PrimalState fpa_allocate(const RadioInstance& instance) {
  instance.validate();
  return settle(instance, instance.max_power_w);
}

PrimalState rpa_allocate(const RadioInstance& instance, std::uint64_t seed) {
  instance.validate();
  Rng rng(derive_seed(seed, "rpa"));
  std::vector<double> power(instance.bs_count());
  for (std::size_t i = 0; i < power.size(); ++i) {
    power[i] = instance.max_power_w[i] * rng.uniform_open_closed();
  }
  return settle(instance, std::move(power));
}

RadioMetrics evaluate(const PrimalState& primal, const RadioInstance& instance,
                      const CacheVector& cache, const ContentCatalog& catalog) {
  RadioMetrics m;
  const std::size_t b = instance.bs_count();
  const auto load = loads_of(primal.association, b);
  m.user_throughput.assign(instance.user_count(), 0.0);
  m.backhaul_load.assign(b, 0.0);
  for (std::size_t j = 0; j < instance.user_count(); ++j) {
    const auto i = static_cast<std::size_t>(primal.association[j]);
    const double r = throughput(i, j, primal.power_w, primal.association, cache, catalog, instance);
    m.user_throughput[j] = r;
    m.sum_rate += r;
    const double air = instance.bandwidth_hz * instance.bandwidth_share / load[i] *
                       std::log1p(sinr(i, j, primal.power_w, instance));
    m.backhaul_load[i] += (1.0 - cache.hit_mass(i, catalog)) * air;
  }
  m.grid_w = std::accumulate(primal.grid_w.begin(), primal.grid_w.end(), 0.0);
  m.radiated_w = std::accumulate(primal.power_w.begin(), primal.power_w.end(), 0.0);
  return m;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  csv::write_row(os, {"iteration", "objective", "max_violation"});
  for (const auto& r : trace) {
    csv::write_row(os, {std::to_string(r.iteration), csv::number(r.objective),
                        csv::number(r.max_violation)});
  }
}

void write_gains_csv(std::ostream& os, const RadioInstance& instance) {
  csv::write_row(os, {"bs", "user", "gain"});
  for (std::size_t i = 0; i < instance.bs_count(); ++i) {
    for (std::size_t j = 0; j < instance.user_count(); ++j) {
      csv::write_row(os, {std::to_string(i), std::to_string(j), csv::number(instance.gain[i][j])});
    }
  }
}

void read_gains_csv(std::istream& is, RadioInstance& instance) {
  const auto rows = csv::read(is);
  if (rows.empty() || rows.front() != csv::Row{"bs", "user", "gain"}) {
    throw InvalidArgument("gains csv: expected header bs,user,gain");
  }
  std::size_t b = 0, u = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw InvalidArgument("gains csv: bad row " + std::to_string(r + 1));
    b = std::max<std::size_t>(b, std::stoul(rows[r][0]) + 1);
    u = std::max<std::size_t>(u, std::stoul(rows[r][1]) + 1);
  }
  std::vector<std::vector<double>> gain(b, std::vector<double>(u, 0.0));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double g = std::stod(rows[r][2]);
    if (!(g > 0.0)) throw InvalidArgument("gains csv: gain must be > 0 on row " + std::to_string(r + 1));
    gain[std::stoul(rows[r][0])][std::stoul(rows[r][1])] = g;
  }
  for (const auto& row : gain) {
    for (double g : row) {
      if (g == 0.0) throw InvalidArgument("gains csv: missing bs/user pair");
    }
  }
  instance.gain = std::move(gain);
}

}  // namespace mcb

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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mcb/common.hpp"

namespace mcb {

/// Zipf-like request popularity, sorted most popular first.
struct ContentCatalog {
  double skew = 0.0;
  std::vector<double> popularity;

  int file_count() const { return static_cast<int>(popularity.size()); }
  /// Probability mass of the `files` most popular files.
  double top_mass(int files) const;
};

/// p_f proportional to f^-alpha, f = 1..F, normalized to 1.
ContentCatalog zipf_popularity(int file_count, double alpha);

/// q[i][f] in [0, 1]: probability that base station i caches file f.
struct CacheVector {
  std::vector<std::vector<double>> q;
  std::vector<int> capacity;

  std::size_t bs_count() const { return q.size(); }
  /// sum_f p_f q_fi.
  double hit_mass(std::size_t bs, const ContentCatalog& catalog) const;
  /// Every row respects its capacity and every entry lies in [0, 1].
  bool feasible() const;
};

/// Each base station caches exactly its `capacity` most popular files
/// (everything when capacity >= F).
CacheVector optimal_cache(const ContentCatalog& catalog, std::span<const int> capacities);

/// Multi-tier radio instance. gain[i][j] is the linear channel gain from
/// base station i to user j.
struct RadioInstance {
  std::vector<bool> is_macro;
  std::vector<std::vector<double>> gain;
  double noise_w = 1e-14;
  double bandwidth_hz = 1e6;
  double bandwidth_share = 1.0;
  double gamma_min = 0.1;
  std::vector<double> max_power_w;
  double eta = 1.0;  // grid price weight
  std::vector<double> harvest_w;
  double sharing_index = 0.8;  // fraction of exported power that arrives
  std::vector<int> cache_capacity;

  std::size_t bs_count() const { return gain.size(); }
  std::size_t user_count() const { return gain.empty() ? 0 : gain.front().size(); }
  void validate() const;
};

/// Association of users to base stations, powers, and grid/sharing flows.
struct PrimalState {
  std::vector<int> association;  // user -> base station
  std::vector<double> power_w;
  std::vector<double> grid_w;
  std::vector<std::vector<double>> shared_w;  // shared_w[i][i'] exported from i to i'
  std::vector<double> k;                      // users per base station

  int x(std::size_t bs, std::size_t user) const {
    return association.at(user) == static_cast<int>(bs) ? 1 : 0;
  }
  std::vector<std::size_t> loads(std::size_t bs_count) const;
};

struct DualState {
  std::vector<double> mu;  // per user, SINR constraint
  std::vector<double> v;   // per base station, cluster-size consistency
  int iteration = 0;
  double step = 0.0;
};

/// P_i h_ij / (sum_{i' != i} P_i' h_i'j + sigma^2).
double sinr(std::size_t bs, std::size_t user, std::span<const double> power_w,
            const RadioInstance& instance);

/// c_ij = B ln(1 + gamma_ij).
double link_capacity(std::size_t bs, std::size_t user, std::span<const double> power_w,
                     const RadioInstance& instance);

/// R_ij = hit_i^k_i * (B beta / k_i) * ln(1 + gamma_ij), with k_i the load of
/// `bs`. Returns 0 for users not associated with `bs`.
double throughput(std::size_t bs, std::size_t user, std::span<const double> power_w,
                  std::span<const int> association, const CacheVector& cache,
                  const ContentCatalog& catalog, const RadioInstance& instance);

/// i* = argmax_i ln(c_ij) + mu_j gamma_ij - v_i, ties to the lowest index.
/// Throws DomainError when every c_ij is zero.
int associate(std::size_t user, double mu_j, std::span<const double> v,
              std::span<const double> power_w, const RadioInstance& instance);

/// Stationary point of k^2 ln(m) - k ln(k) + v k:
///   k* = -W(-2 ln(m) e^(v-1)) / (2 ln(m)).
/// Throws DomainError unless 0 < hit_mass < 1.
double optimal_k(double v, double hit_mass);

/// 2 ln(m) - 1/k; negative wherever optimal_k returns.
double k_curvature(double hit_mass, double k);

/// delta(t) = step0 / sqrt(t).
struct StepSchedule {
  double step0 = 0.1;
  double at(int t) const;
};

/// Projected subgradient step on (mu, v) given the current x and k.
DualState dual_update(const DualState& dual, std::span<const int> association,
                      std::span<const double> k, std::span<const double> power_w,
                      const RadioInstance& instance, const StepSchedule& schedule);

/// sum_j ln(c_{a(j) j}) + sum_i [k_i^2 ln(hit_i) - k_i ln(k_i)], k_i = load.
/// -inf if any served user has zero capacity or a loaded cell has hit 0.
double association_objective(std::span<const int> association, std::span<const double> power_w,
                             const RadioInstance& instance, const CacheVector& cache,
                             const ContentCatalog& catalog);

/// Every user's SINR at its base station meets gamma_min.
bool sinr_feasible(std::span<const int> association, std::span<const double> power_w,
                   const RadioInstance& instance);

struct PowerSettlement {
  std::vector<double> grid_w;
  std::vector<std::vector<double>> shared_w;

  double total_grid() const;
};

/// Greedy settlement: harvest first, surplus stations export (largest surplus
/// first, to deficits in index order) at efficiency sharing_index, the grid
/// covers what remains.
PowerSettlement power_and_grid(const RadioInstance& instance, std::span<const double> power_w);

/// Power balance holds for every station within `tol` watts.
bool power_balance_holds(const RadioInstance& instance, std::span<const double> power_w,
                         const PowerSettlement& settlement, double tol = 1e-12);

class InfeasibleInstance : public Error {
 public:
  InfeasibleInstance(std::size_t user, double best_sinr, double gamma_min);
  std::size_t user() const { return user_; }

 private:
  std::size_t user_;
};

/// Throws InfeasibleInstance for the first user whose best SINR at maximum
/// power falls short of gamma_min.
void check_feasible(const RadioInstance& instance);

struct SolverOptions {
  int max_iter = 2000;
  double tol = 1e-6;
  StepSchedule schedule;
  /// Single-user moves that raise the association objective, applied to
  /// the best dual iterate.
  bool local_search = true;
  /// Outer coordinate pass over per-station power levels.
  bool power_refinement = false;
  int power_levels = 31;  // 0, -1, ..., -30 dB below P_max
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double max_violation = 0.0;
};

struct SolveResult {
  PrimalState primal;
  DualState dual;
  std::vector<TraceRow> trace;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;  // grid-weighted: association objective - eta * sum G
  /// Smallest multiplier seen across all iterations (>= 0 by projection).
  double min_multiplier = 0.0;
};

/// Caching by popularity, then dual iterations of per-user association and
/// per-station cluster size, stopping at max_iter or when no multiplier moves
/// by more than tol. The best SINR-feasible iterate is returned.
SolveResult solve(const RadioInstance& instance, const ContentCatalog& catalog,
                  const SolverOptions& options = {});

/// Every base station at P_max; users join the strongest received signal.
PrimalState fpa_allocate(const RadioInstance& instance);

/// P_i uniform on (0, P_max]; strongest-signal association.
PrimalState rpa_allocate(const RadioInstance& instance, std::uint64_t seed);

/// Strongest-received-power association for the given powers.
std::vector<int> strongest_signal_association(std::span<const double> power_w,
                                              const RadioInstance& instance);

struct RadioMetrics {
  double sum_rate = 0.0;                // sum_j R_{a(j) j}, nat/s
  std::vector<double> user_throughput;  // nat/s
  double grid_w = 0.0;
  double radiated_w = 0.0;
  std::vector<double> backhaul_load;    // per station, miss traffic nat/s
};

RadioMetrics evaluate(const PrimalState& primal, const RadioInstance& instance,
                      const CacheVector& cache, const ContentCatalog& catalog);

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);

/// Gains as CSV: header "bs,user,gain", one row per pair.
void write_gains_csv(std::ostream& os, const RadioInstance& instance);
/// Reads gains written by write_gains_csv into `instance.gain`; bs and user
/// counts come from the file.
void read_gains_csv(std::istream& is, RadioInstance& instance);

}  // namespace mcb

#pragma once

// Seeded instance generation for the felt-production scenario grid.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by
// the C++ standard, seeded through SplitMix64. Integer draws use rejection
// sampling on the raw 64-bit output instead of std::uniform_int_distribution
// (whose algorithm is implementation-defined), so a seed produces the same
// demand matrix with any conforming compiler and standard library.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "lsms/errors.hpp"
#include "lsms/model.hpp"

namespace lsms::gen {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Folds a list of coordinates into a seed: h <- splitmix64(h ^ splitmix64(k + 1)).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(base);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 1));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform integer in [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw input_error("uniform_int: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return lo + static_cast<std::int64_t>(engine_());
    const std::uint64_t threshold = (0 - range) % range;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return lo + static_cast<std::int64_t>(x % range);
    }
  }

 private:
  std::mt19937_64 engine_;
};

enum class Horizon { t10, t20, t30 };
enum class Level { low, med, high };

inline constexpr std::array<Horizon, 3> kHorizons{Horizon::t10, Horizon::t20, Horizon::t30};
inline constexpr std::array<Level, 3> kLevels{Level::low, Level::med, Level::high};

struct DemandBounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

inline std::size_t index_of(Horizon h) { return static_cast<std::size_t>(h); }
inline std::size_t index_of(Level l) { return static_cast<std::size_t>(l); }

inline std::size_t periods(Horizon h) {
  constexpr std::array<std::size_t, 3> t{10, 20, 30};
  return t[index_of(h)];
}

inline DemandBounds demand_bounds(Horizon h) {
  constexpr std::array<DemandBounds, 3> d{{{80, 120}, {180, 250}, {290, 350}}};
  return d[index_of(h)];
}

inline double capacity_minutes(Level l) {
  constexpr std::array<double, 3> m{630.0, 720.0, 810.0};
  return m[index_of(l)];
}

/// (end item cap, WIP cap) for an inventory level.
inline std::pair<double, double> inventory_caps(Level l) {
  constexpr std::array<std::pair<double, double>, 3> caps{{{6.0, 3.0}, {12.0, 6.0}, {18.0, 9.0}}};
  return caps[index_of(l)];
}

inline std::string_view to_string(Level l) {
  constexpr std::array<std::string_view, 3> names{"low", "med", "high"};
  return names[index_of(l)];
}

inline std::string_view to_string(Horizon h) {
  constexpr std::array<std::string_view, 3> names{"T10", "T20", "T30"};
  return names[index_of(h)];
}

inline std::optional<Level> parse_level(std::string_view s) {
  if (s == "low") return Level::low;
  if (s == "med" || s == "medium") return Level::med;
  if (s == "high") return Level::high;
  return std::nullopt;
}

inline std::optional<Horizon> parse_horizon(std::string_view s) {
  if (s == "T10" || s == "10") return Horizon::t10;
  if (s == "T20" || s == "20") return Horizon::t20;
  if (s == "T30" || s == "30") return Horizon::t30;
  return std::nullopt;
}

/// Everything about an instance that does not depend on the scenario levels.
struct ParameterBlock {
  std::vector<double> vao_cost;
  std::vector<double> transport_cost;
  std::vector<double> end_hold_cost;
  std::vector<double> wip_hold_cost;
  std::vector<double> energy_rate;
  std::vector<ProcTimeBounds> proc_time_bounds;
  Array2<int> route;
  std::vector<std::vector<std::size_t>> sequence;
  double unit_length = 0.0;
};

/// The felt plant: costs, speed bounds and routing of the four products.
inline ParameterBlock felt_plant_parameters() {
  ParameterBlock p;
  p.vao_cost = {2400.0, 5400.0, 1000.0};
  p.transport_cost = {100.0, 120.0, 120.0, 140.0};
  p.end_hold_cost = {300.0, 150.0, 300.0, 150.0};
  p.wip_hold_cost = {0.0, 50.0, 0.0, 50.0};
  p.energy_rate = {1.16, 3.09, 0.0};
  p.proc_time_bounds = {{50.0, 80.0}, {22.2, 26.6}, {80.0, 80.0}};
  p.route = Array2<int>(kNumProducts, kNumMachines);
  p.sequence = {{0}, {0, 2}, {0, 1}, {0, 1, 2}};
  for (std::size_t i = 0; i < kNumProducts; ++i)
    for (auto m : p.sequence[i]) p.route(i, m) = 1;
  p.unit_length = 400.0;
  return p;
}

inline constexpr std::array<double, 4> kProductShares{0.16, 0.04, 0.64, 0.16};

struct GeneratorConfig {
  Horizon horizon = Horizon::t10;
  Level capacity = Level::high;
  Level inventory = Level::high;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::array<double, 4> product_shares = kProductShares;
  ParameterBlock params = felt_plant_parameters();
  // Scaled-down instances (e.g. oracle comparisons) override these.
  std::optional<std::size_t> periods_override;
  std::optional<DemandBounds> demand_override;

  std::size_t num_periods() const { return periods_override.value_or(periods(horizon)); }
  DemandBounds bounds() const { return demand_override.value_or(demand_bounds(horizon)); }
};

inline void validate(const GeneratorConfig& cfg) {
  double sum = 0.0;
  for (double s : cfg.product_shares) {
    if (!(s >= 0.0)) throw input_error("product shares must be nonnegative");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw input_error("product shares must sum to 1");
  const auto b = cfg.bounds();
  if (b.lo < 0 || b.hi < b.lo) throw input_error("demand bounds need 0 <= lo <= hi");
  if (cfg.num_periods() == 0) throw input_error("horizon needs at least one period");
}

/// Splits `total` into integer parts proportional to `shares`, handing the
/// leftover units to the largest fractional remainders (lower index on ties).
inline std::array<std::int64_t, 4> split_by_shares(std::int64_t total,
                                                   const std::array<double, 4>& shares) {
  std::array<std::int64_t, 4> parts{};
  std::array<double, 4> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double quota = static_cast<double>(total) * shares[i];
    parts[i] = static_cast<std::int64_t>(std::floor(quota + 1e-9));
    remainder[i] = quota - static_cast<double>(parts[i]);
    assigned += parts[i];
  }
  for (std::int64_t left = total - assigned; left > 0; --left) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i)
      if (remainder[i] > remainder[best]) best = i;
    ++parts[best];
    remainder[best] = -1.0;
  }
  return parts;
}

/// Demand matrix [product][period] with nonnegative integer entries: a total
/// drawn uniformly from the horizon's bounds, split by product shares, and
/// each unit placed in a uniformly random period.
inline Matrix generate_demand(const GeneratorConfig& cfg) {
  validate(cfg);
  const auto T = cfg.num_periods();
  const auto bounds = cfg.bounds();
  Rng rng(cfg.seed);
  const auto total = rng.uniform_int(bounds.lo, bounds.hi);
  const auto parts = split_by_shares(total, cfg.product_shares);
  Matrix demand(kNumProducts, T, 0.0);
  for (std::size_t i = 0; i < kNumProducts; ++i)
    for (std::int64_t k = 0; k < parts[i]; ++k)
      demand(i, static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(T) - 1))) +=
          1.0;
  return demand;
}

/// Assembles an instance from a parameter block and scenario data.
inline Instance make_instance(const ParameterBlock& p, Matrix demand, double capacity_per_period,
                              double end_inv_cap, double wip_inv_cap) {
  Instance inst;
  inst.num_products = kNumProducts;
  inst.num_machines = kNumMachines;
  inst.num_periods = demand.cols();
  inst.route = p.route;
  inst.sequence = p.sequence;
  inst.vao_cost = p.vao_cost;
  inst.transport_cost = p.transport_cost;
  inst.end_hold_cost = p.end_hold_cost;
  inst.wip_hold_cost = p.wip_hold_cost;
  inst.energy_rate = p.energy_rate;
  inst.proc_time_bounds = p.proc_time_bounds;
  inst.demand = std::move(demand);
  inst.capacity.assign(inst.num_periods, capacity_per_period);
  inst.end_inv_cap = end_inv_cap;
  inst.wip_inv_cap = wip_inv_cap;
  inst.unit_length = p.unit_length;
  validate(inst);
  return inst;
}

inline Instance build_instance(const GeneratorConfig& cfg) {
  const auto [s_max, u_max] = inventory_caps(cfg.inventory);
  return make_instance(cfg.params, generate_demand(cfg), capacity_minutes(cfg.capacity), s_max,
                       u_max);
}

inline constexpr std::uint64_t kDefaultBaseSeed = 0x4C534D53ULL;

enum class SeedSharing {
  per_horizon,  // one demand draw per (horizon, replicate), reused by all 9 cells
  per_cell,     // independent draw for every cell and replicate
};

/// The horizon x capacity x inventory x replicate lattice, horizon-major.
inline std::vector<GeneratorConfig> enumerate_grid(std::size_t seeds_per_cell,
                                                   std::uint64_t base_seed = kDefaultBaseSeed,
                                                   SeedSharing sharing = SeedSharing::per_horizon) {
  if (seeds_per_cell < 1) throw input_error("seeds_per_cell must be at least 1");
  std::vector<GeneratorConfig> grid;
  grid.reserve(27 * seeds_per_cell);
  for (auto h : kHorizons)
    for (auto cap : kLevels)
      for (auto inv : kLevels)
        for (std::size_t r = 0; r < seeds_per_cell; ++r) {
          GeneratorConfig cfg;
          cfg.horizon = h;
          cfg.capacity = cap;
          cfg.inventory = inv;
          cfg.replicate = r;
          cfg.seed = sharing == SeedSharing::per_horizon
                         ? derive_seed(base_seed, {index_of(h), r})
                         : derive_seed(base_seed, {index_of(h), index_of(cap), index_of(inv), r});
          grid.push_back(std::move(cfg));
        }
  return grid;
}

/// A short-horizon instance with the plant parameters and the T=10 demand
/// bounds scaled by periods/10, used for brute-force comparisons.
inline GeneratorConfig scaled_config(std::size_t num_periods, Level capacity, Level inventory,
                                     std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.capacity = capacity;
  cfg.inventory = inventory;
  cfg.seed = seed;
  cfg.periods_override = num_periods;
  const auto base = demand_bounds(Horizon::t10);
  const auto n = static_cast<std::int64_t>(num_periods);
  cfg.demand_override = DemandBounds{base.lo * n / 10, base.hi * n / 10};
  return cfg;
}

inline void write_grid_csv(std::ostream& os, const std::vector<GeneratorConfig>& grid) {
  os << "horizon,T,capacity,m_t,inventory,s_max,u_max,replicate,seed\n";
  for (const auto& c : grid) {
    const auto [s_max, u_max] = inventory_caps(c.inventory);
    os << to_string(c.horizon) << ',' << c.num_periods() << ',' << to_string(c.capacity) << ','
       << capacity_minutes(c.capacity) << ',' << to_string(c.inventory) << ',' << s_max << ','
       << u_max << ',' << c.replicate << ',' << c.seed << '\n';
  }
}

}  // namespace lsms::gen

#pragma once

#include <charconv>
#include <cstdlib>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "wetrelay/battery.hpp"
#include "wetrelay/batteryless.hpp"
#include "wetrelay/benchmarks.hpp"
#include "wetrelay/channel.hpp"

namespace wetrelay {

enum class Quantity { kCapBatteryless, kCapUnlimited, kBench1, kBench2, kBench3 };

inline std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::kCapBatteryless: return "cap_batteryless";
    case Quantity::kCapUnlimited: return "cap_unlimited";
    case Quantity::kBench1: return "bench1";
    case Quantity::kBench2: return "bench2";
    case Quantity::kBench3: return "bench3";
  }
  return "?";
}

inline Quantity quantity_from_string(const std::string& s) {
  if (s == "cap_batteryless") return Quantity::kCapBatteryless;
  if (s == "cap_unlimited") return Quantity::kCapUnlimited;
  if (s == "bench1") return Quantity::kBench1;
  if (s == "bench2") return Quantity::kBench2;
  if (s == "bench3") return Quantity::kBench3;
  throw ConfigError("unknown quantity: " + s);
}

enum class SweptVariable { kPR, kDSR, kPC };
enum class RateUnits { kBitsPerSecond, kBitsPerSymbol };

inline std::string to_string(SweptVariable v) {
  switch (v) {
    case SweptVariable::kPR: return "P_R";
    case SweptVariable::kDSR: return "d_SR";
    case SweptVariable::kPC: return "P_C";
  }
  return "?";
}

struct SweepConfig {
  SystemParams base;
  SweptVariable swept = SweptVariable::kPR;
  std::vector<double> grid;
  std::vector<Quantity> quantities;
  std::vector<double> pc_values;  // when non-empty, every quantity is run per P_C
  RateUnits units = RateUnits::kBitsPerSecond;
  BatterylessOptions batteryless;
  CostConstrainedConfig battery;

  void validate() const {
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
    if (quantities.empty()) throw ConfigError("sweep quantities are empty");
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    for (auto q : quantities) {
      if (pc_values.empty()) {
        names.push_back(to_string(q));
      } else {
        for (double pc : pc_values) {
          char buf[64];
          auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), pc,
                                         std::chars_format::general, 12);
          names.push_back(to_string(q) + "@pc=" + std::string(buf, end));
        }
      }
    }
    return names;
  }
};

struct CellResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string case_tag;
  std::string bottleneck;
  std::string error;  // empty on success
};

struct SweepRow {
  double swept_value = 0.0;
  std::vector<CellResult> cells;
  std::string case_tag;    // from the first capacity column that carries one
  std::string bottleneck;
};

namespace detail {

inline CellResult evaluate_cell(Quantity q, SystemParams params, const SweepConfig& cfg) {
  CellResult cell;
  try {
    const auto ch = build_normalized_channel(params);
    const double scale = cfg.units == RateUnits::kBitsPerSecond ? 2.0 * params.B : 1.0;
    switch (q) {
      case Quantity::kCapBatteryless: {
        const auto r = capacity_batteryless(ch, params, cfg.batteryless);
        cell.value = r.capacity_bits_per_symbol * scale;
        cell.case_tag = to_string(r.case_tag);
        cell.bottleneck = to_string(r.bottleneck);
        break;
      }
      case Quantity::kCapUnlimited: {
        const auto r = capacity_unlimited_battery(ch, params, cfg.battery);
        cell.value = r.capacity_bits_per_symbol * scale;
        cell.bottleneck = to_string(r.bottleneck);
        break;
      }
      case Quantity::kBench1:
        cell.value =
            benchmark1_rate(ch, params, cfg.batteryless.quad, cfg.batteryless.smith) * scale;
        break;
      case Quantity::kBench2:
        cell.value = benchmark2_rate(ch, params) * scale;
        break;
      case Quantity::kBench3:
        cell.value = benchmark3_rate(ch, params) * scale;
        break;
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

inline SweepRow evaluate_row(double value, const SweepConfig& cfg) {
  SweepRow row;
  row.swept_value = value;
  SystemParams base = cfg.base;
  switch (cfg.swept) {
    case SweptVariable::kPR: base.P_R = value; break;
    case SweptVariable::kDSR: base.d_SR = value; break;
    case SweptVariable::kPC: base.P_C = value; break;
  }
  for (auto q : cfg.quantities) {
    if (cfg.pc_values.empty()) {
      row.cells.push_back(evaluate_cell(q, base, cfg));
    } else {
      for (double pc : cfg.pc_values) {
        SystemParams p = base;
        p.P_C = pc;
        row.cells.push_back(evaluate_cell(q, p, cfg));
      }
    }
  }
  for (const auto& c : row.cells) {
    if (row.case_tag.empty() && !c.case_tag.empty()) row.case_tag = c.case_tag;
    if (row.bottleneck.empty() && !c.bottleneck.empty()) row.bottleneck = c.bottleneck;
  }
  return row;
}

inline int sweep_thread_count(size_t rows) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("CAP_NUM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(std::min<long>(v, 256));
  }
  return static_cast<int>(std::min<size_t>(n, rows));
}

}  // namespace detail

/// Evaluate every requested quantity over the grid. Cells are independent
/// pure computations; rows are filled into pre-assigned slots so the output
/// is identical for any worker count.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  cfg.base.validate();
  std::vector<SweepRow> rows(cfg.grid.size());
  const int workers = detail::sweep_thread_count(cfg.grid.size());
  if (workers <= 1) {
    for (size_t i = 0; i < cfg.grid.size(); ++i) rows[i] = detail::evaluate_row(cfg.grid[i], cfg);
    return rows;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cfg.grid.size()) return;
      rows[i] = detail::evaluate_row(cfg.grid[i], cfg);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return rows;
}

/// Figure presets. The P_R grids are documented here: fig3/fig3a sweep 20
/// log-spaced points on [0.05, 5] W; fig4 compares P_C values on [0.05, 2] W.
inline SweepConfig load_preset(const std::string& name) {
  SweepConfig cfg;
  cfg.base = SystemParams{};  // Sec V.A defaults
  auto log_grid = [](double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    g.back() = hi;
    return g;
  };
  if (name == "fig3" || name == "fig3a") {
    cfg.base.d_SR = name == "fig3a" ? 20.0 : 10.0;
    cfg.swept = SweptVariable::kPR;
    cfg.grid = log_grid(0.05, 5.0, 20);
    cfg.quantities = {Quantity::kCapBatteryless, Quantity::kCapUnlimited, Quantity::kBench1,
                      Quantity::kBench2, Quantity::kBench3};
  } else if (name == "fig4") {
    cfg.base.d_SR = 10.0;
    cfg.swept = SweptVariable::kPR;
    cfg.grid = log_grid(0.05, 2.0, 20);
    cfg.quantities = {Quantity::kCapBatteryless, Quantity::kCapUnlimited};
    cfg.pc_values = {0.0, 1e-3};
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return cfg;
}

namespace detail {

inline std::string format_sig12(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, end);
}

inline std::string csv_sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace detail

inline void write_csv(const std::vector<SweepRow>& rows, const SweepConfig& cfg,
                      std::ostream& os) {
  os << to_string(cfg.swept);
  for (const auto& name : cfg.column_names()) os << ',' << name;
  os << ",case_tag,bottleneck\n";
  for (const auto& row : rows) {
    os << detail::format_sig12(row.swept_value);
    for (const auto& cell : row.cells) {
      os << ',';
      if (cell.error.empty())
        os << detail::format_sig12(cell.value);
      else
        os << "ERROR(" << detail::csv_sanitize(cell.error) << ")";
    }
    os << ',' << row.case_tag << ',' << row.bottleneck << '\n';
  }
}

}  // namespace wetrelay

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covert_fbl/csv.hpp"

namespace covert_fbl::figures {

enum class FigureId { Fig2, Fig3, Fig4, Fig5, Fig6, Fig7, Fig8 };

inline constexpr FigureId kAllFigures[] = {FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5,
                                           FigureId::Fig6, FigureId::Fig7, FigureId::Fig8};

struct GridSpec {
  double min;
  double max;
  std::size_t points;
  bool log = true;
};

/// Grid is over n for every figure except FIG5, where it is over delta.
struct FigureParams {
  FigureId id;
  double delta = 0.1;
  double eps = 0.1;
  double c = 1.0;
  std::int64_t n = 2000;
  GridSpec grid{100, 10000, 50, true};
  std::vector<double> taus;
};

/// Keys: delta, eps, c, n, tau (comma list), grid (min:max:points[:log|lin]),
/// n_min, n_max, points, spacing. Only keys used by the figure are accepted.
using Overrides = std::map<std::string, std::string>;

FigureParams default_params(FigureId id);
void apply_overrides(FigureParams& params, const Overrides& overrides);
void validate(const FigureParams& params);

GridSpec parse_grid(std::string_view text);
std::vector<std::int64_t> integer_grid(const GridSpec& grid);
std::vector<double> real_grid(const GridSpec& grid);

/// One row per grid point, computed in parallel into ordered slots.
Table run_figure(const FigureParams& params, unsigned workers = 1);

std::optional<FigureId> parse_figure_id(std::string_view text);
const char* to_string(FigureId id);

}  // namespace covert_fbl::figures

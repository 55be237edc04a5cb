#include <doctest.h>

#include "approx.hpp"

#include <cmath>
#include <string>

#include "covert_fbl/channel_metrics.hpp"
#include "covert_fbl/csv.hpp"
#include "covert_fbl/errors.hpp"
#include "covert_fbl/figures.hpp"

using namespace covert_fbl;
using namespace covert_fbl::figures;

namespace {

FigureParams small(FigureId id, std::size_t points = 8) {
  FigureParams p = default_params(id);
  p.grid.points = points;
  return p;
}

}  // namespace

TEST_CASE("figure ids") {
  for (const FigureId id : kAllFigures) CHECK(parse_figure_id(to_string(id)) == id);
  CHECK(parse_figure_id("FIG9") == std::nullopt);
  CHECK(parse_figure_id("fig2") == FigureId::Fig2);
  CHECK(parse_figure_id("8") == FigureId::Fig8);
  CHECK(parse_figure_id("FIG1") == std::nullopt);
}

TEST_CASE("default parameters validate") {
  for (const FigureId id : kAllFigures) CHECK_NOTHROW(validate(default_params(id)));
  CHECK(default_params(FigureId::Fig3).delta == 0.01);
  CHECK(default_params(FigureId::Fig5).n == 2000);
  CHECK(default_params(FigureId::Fig6).taus.size() == 5);
}

TEST_CASE("columns") {
  CHECK(run_figure(small(FigureId::Fig2)).columns ==
        std::vector<std::string>{"n", "theta_necessary", "theta_sufficient", "theta_exact"});
  CHECK(run_figure(small(FigureId::Fig4)).columns ==
        std::vector<std::string>{"n", "upper_bits", "lower_bits", "approx_bits", "sqrt_n"});
  CHECK(run_figure(small(FigureId::Fig5)).columns ==
        std::vector<std::string>{"delta", "theta_necessary", "theta_sufficient", "theta_exact"});
  const Table f6 = run_figure(small(FigureId::Fig6));
  CHECK(f6.columns == std::vector<std::string>{"n", "tvd@0.3", "tvd@0.4", "tvd@0.5", "tvd@0.6", "tvd@0.7"});
  const Table f7 = run_figure(small(FigureId::Fig7));
  CHECK(f7.columns.size() == 1 + 4 * 3);
  CHECK(f7.columns[2] == "h_sq@0.1");
  const Table f8 = run_figure(small(FigureId::Fig8));
  CHECK(f8.columns[2] == "kl_bound@0.6");
  for (const Table& t : {f6, f7, f8}) {
    for (const auto& row : t.rows) CHECK(row.size() == t.columns.size());
  }
}

TEST_CASE("power curves are ordered on every row") {
  for (const FigureId id : {FigureId::Fig2, FigureId::Fig3, FigureId::Fig5}) {
    const Table t = run_figure(small(id, 25));
    CHECK(t.rows.size() >= 20);
    for (const auto& row : t.rows) {
      CHECK(row[2] <= row[3]);
      CHECK(row[3] <= row[1]);
    }
  }
}

TEST_CASE("throughput approximation sits between the bounds") {
  const Table t = run_figure(small(FigureId::Fig4, 20));
  for (const auto& row : t.rows) {
    CHECK(row[2] <= row[3]);
    CHECK(row[3] <= row[1]);
    CHECK(row[4] == rel(std::sqrt(row[0])).epsilon(1e-15));
  }
}

TEST_CASE("tau trichotomy on the last row") {
  const Table t = run_figure(default_params(FigureId::Fig6));
  const auto& first = t.rows.front();
  const auto& last = t.rows.back();
  CHECK(last[0] == 1e6);
  CHECK(last[1] > first[1]);
  CHECK(last[2] > first[2]);
  CHECK(std::fabs(last[3] - first[3]) <= 0.05);
  CHECK(last[4] < first[4]);
  CHECK(last[5] < first[5]);
  CHECK(last[1] > last[2]);
  CHECK(last[2] > last[3]);
  CHECK(last[3] > last[4]);
  CHECK(last[4] > last[5]);
}

TEST_CASE("tvd columns are bounded by the improved Hellinger column") {
  for (const FigureId id : {FigureId::Fig7, FigureId::Fig8}) {
    const Table t = run_figure(small(id, 12));
    for (const auto& row : t.rows) {
      for (std::size_t k = 1; k < row.size(); k += 4) CHECK(row[k] <= row[k + 2]);
    }
  }
}

TEST_CASE("overrides") {
  FigureParams p = default_params(FigureId::Fig2);
  apply_overrides(p, {{"delta", "0.2"}, {"grid", "10:1000:5:lin"}});
  CHECK(p.delta == 0.2);
  CHECK(p.grid.min == 10.0);
  CHECK(p.grid.max == 1000.0);
  CHECK(p.grid.points == 5);
  CHECK_FALSE(p.grid.log);

  FigureParams q = default_params(FigureId::Fig6);
  apply_overrides(q, {{"tau", "0.45,0.55"}, {"c", "2"}});
  CHECK(q.taus == std::vector<double>{0.45, 0.55});
  CHECK(q.c == 2.0);

  FigureParams r = default_params(FigureId::Fig2);
  apply_overrides(r, {{"n_min", "50"}, {"n_max", "500"}, {"points", "7"}, {"spacing", "lin"}});
  CHECK(r.grid.min == 50.0);
  CHECK(r.grid.max == 500.0);
  CHECK(r.grid.points == 7);
  CHECK_FALSE(r.grid.log);
}

TEST_CASE("bad overrides are rejected and leave the parameters untouched") {
  const FigureParams before = default_params(FigureId::Fig2);
  FigureParams p = before;
  CHECK_THROWS_AS(apply_overrides(p, {{"eps", "0.1"}}), DomainError);
  CHECK_THROWS_AS(apply_overrides(p, {{"delta", "1.5"}}), DomainError);
  CHECK_THROWS_AS(apply_overrides(p, {{"delta", "abc"}}), DomainError);
  CHECK_THROWS_AS(apply_overrides(p, {{"delta", "0.2"}, {"grid", "0:10:5"}}), DomainError);
  CHECK(p.delta == before.delta);
  CHECK(p.grid.min == before.grid.min);

  FigureParams f7 = default_params(FigureId::Fig7);
  CHECK_THROWS_AS(apply_overrides(f7, {{"tau", "0.6"}}), DomainError);
  FigureParams f8 = default_params(FigureId::Fig8);
  CHECK_THROWS_AS(apply_overrides(f8, {{"tau", "0.4"}}), DomainError);
  FigureParams f5 = default_params(FigureId::Fig5);
  CHECK_THROWS_AS(apply_overrides(f5, {{"n_min", "10"}}), DomainError);
  CHECK_THROWS_AS(apply_overrides(f5, {{"grid", "0.1:2:5"}}), DomainError);
}

TEST_CASE("parse_grid") {
  const GridSpec g = parse_grid("100:1e4:50");
  CHECK(g.min == 100.0);
  CHECK(g.max == 1e4);
  CHECK(g.points == 50);
  CHECK(g.log);
  CHECK_FALSE(parse_grid("1:2:3:lin").log);
  CHECK_THROWS_AS(parse_grid("1:2"), DomainError);
  CHECK_THROWS_AS(parse_grid("1:2:1"), DomainError);
  CHECK_THROWS_AS(parse_grid("2:1:5"), DomainError);
  CHECK_THROWS_AS(parse_grid("1:2:5:cubic"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:2:5:log"), DomainError);
}

TEST_CASE("integer and real grids") {
  const auto ns = integer_grid({1, 1e6, 100, true});
  CHECK(ns.front() == 1);
  CHECK(ns.back() == 1000000);
  for (std::size_t i = 1; i < ns.size(); ++i) CHECK(ns[i] > ns[i - 1]);
  const auto xs = real_grid({1e-6, 10, 110, true});
  CHECK(xs.size() == 110);
  CHECK(xs.front() == rel(1e-6).epsilon(1e-15));
  CHECK(xs.back() == rel(10.0).epsilon(1e-15));
  const auto lin = real_grid({0, 1, 5, false});
  CHECK(lin[2] == 0.5);
}

TEST_CASE("CSV output is stable across runs and worker counts") {
  for (const FigureId id : kAllFigures) {
    CAPTURE(to_string(id));
    const FigureParams p = small(id, 10);
    const std::string a = to_csv(run_figure(p, 1));
    CHECK(a == to_csv(run_figure(p, 1)));
    CHECK(a == to_csv(run_figure(p, 4)));
    CHECK(a.rfind("# ", 0) == 0);
  }
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2000.0) == "2000");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  const Table t{"p", {"a", "b"}, {{1.0, 0.25}}};
  CHECK(to_csv(t) == "# p\na,b\n1,0.25\n");
}

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "wsc/errors.hpp"
#include "wsc/instance.hpp"

namespace wsc {

SiteId ChimeraGraph::site(const ChimeraCoord& c) const {
  return static_cast<SiteId>(((c.cell_row * cols + c.cell_col) * 2 + static_cast<int>(c.side)) * 4 +
                             c.slot);
}

ChimeraCoord ChimeraGraph::coord(SiteId id) const {
  ChimeraCoord c;
  c.slot = static_cast<int>(id % 4);
  id /= 4;
  c.side = (id % 2) ? Side::right : Side::left;
  id /= 2;
  c.cell_col = static_cast<int>(id % cols);
  c.cell_row = static_cast<int>(id / cols);
  return c;
}

ChimeraGraph build_chimera(int rows, int cols) {
  if (rows < 1 || cols < 1) throw ValidationError("build_chimera: rows and cols must be >= 1");
  ChimeraGraph g;
  g.rows = rows;
  g.cols = cols;
  g.edges.reserve(chimera_edge_count(rows, cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          g.edges.emplace_back(g.site({r, c, Side::left, a}), g.site({r, c, Side::right, b}));
      for (int k = 0; k < 4; ++k) {
        if (c + 1 < cols)
          g.edges.emplace_back(g.site({r, c, Side::left, k}), g.site({r, c + 1, Side::left, k}));
        if (r + 1 < rows)
          g.edges.emplace_back(g.site({r, c, Side::right, k}), g.site({r + 1, c, Side::right, k}));
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

// ---------------------------------------------------------------------------
// Layouts
// ---------------------------------------------------------------------------

namespace {

bool grid_adjacent(const CellCoord& a, const CellCoord& b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

std::string cell_str(const CellCoord& c) {
  std::ostringstream os;
  os << "(" << c.row << "," << c.col << ")";
  return os.str();
}

// 4x4 periodic tile of weak-strong dominoes. Mixed horizontal and vertical
// pairs are needed: with vertical pairs only, every vertical run of strong
// cells touches at most one run in each neighbouring column and the backbone
// degenerates into disjoint chains.
//
//   w S S w
//   w S w w
//   S S S S
//   w w S w
constexpr int kTile = 4;
constexpr std::array<std::array<int, 4>, 8> kTilePairs{{
    // strong row, strong col, weak row, weak col
    {0, 1, 0, 0},
    {0, 2, 0, 3},
    {1, 1, 1, 0},
    {2, 2, 1, 2},
    {2, 3, 1, 3},
    {2, 0, 3, 0},
    {2, 1, 3, 1},
    {3, 2, 3, 3},
}};
constexpr std::size_t kSeedTilePair = 3;

int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }

CellPair tile_pair(int tile_row, int tile_col, std::size_t k) {
  const auto& p = kTilePairs[k];
  return {{tile_row * kTile + p[0], tile_col * kTile + p[1]},
          {tile_row * kTile + p[2], tile_col * kTile + p[3]}};
}

// Pair of the infinite tiling whose strong cell sits at `cell`, if any.
std::optional<CellPair> strong_pair_at(const CellCoord& cell) {
  const int tr = floor_div(cell.row, kTile);
  const int tc = floor_div(cell.col, kTile);
  const int lr = cell.row - tr * kTile;
  const int lc = cell.col - tc * kTile;
  for (std::size_t k = 0; k < kTilePairs.size(); ++k)
    if (kTilePairs[k][0] == lr && kTilePairs[k][1] == lc) return tile_pair(tr, tc, k);
  return std::nullopt;
}

constexpr std::array<std::array<int, 2>, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// Sorts the pairs and adds every grid-adjacent strong-strong backbone edge with
// an unset sign. Without a fixed grid the pairs are shifted to the origin and
// the grid shrinks to their bounding box.
WeakStrongLayout finish_layout(std::vector<CellPair> pairs,
                               std::optional<std::pair<int, int>> fixed_grid = std::nullopt) {
  WeakStrongLayout layout;
  if (pairs.empty()) return layout;
  int rmin = pairs[0].strong.row, cmin = pairs[0].strong.col, rmax = rmin, cmax = cmin;
  for (const auto& p : pairs) {
    for (const auto& c : {p.strong, p.weak}) {
      rmin = std::min(rmin, c.row);
      rmax = std::max(rmax, c.row);
      cmin = std::min(cmin, c.col);
      cmax = std::max(cmax, c.col);
    }
  }
  if (fixed_grid) {
    rmin = cmin = 0;
    rmax = fixed_grid->first - 1;
    cmax = fixed_grid->second - 1;
  }
  for (auto& p : pairs) {
    p.strong.row -= rmin;
    p.strong.col -= cmin;
    p.weak.row -= rmin;
    p.weak.col -= cmin;
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const CellPair& a, const CellPair& b) { return a.strong < b.strong; });
  layout.grid_rows = rmax - rmin + 1;
  layout.grid_cols = cmax - cmin + 1;
  std::set<CellCoord> strong;
  for (const auto& p : pairs) strong.insert(p.strong);
  for (const auto& s : strong) {
    for (const CellCoord& t : {CellCoord{s.row, s.col + 1}, CellCoord{s.row + 1, s.col}})
      if (strong.count(t)) layout.backbone_edges.push_back({s, t, 0});
  }
  layout.pairs = std::move(pairs);
  return layout;
}

}  // namespace

void WeakStrongLayout::validate(bool allow_unset_signs) const {
  if (grid_rows < 1 || grid_cols < 1) throw ValidationError("layout: grid dimensions must be >= 1");
  if (lambda_num <= 0 || lambda_den <= 0 || 2 * lambda_num >= lambda_den)
    throw ValidationError("layout: lambda must satisfy 0 < lambda_num/lambda_den < 1/2");
  if (pairs.empty()) throw ValidationError("layout: at least one pair is required");
  auto inside = [&](const CellCoord& c) {
    return c.row >= 0 && c.col >= 0 && c.row < grid_rows && c.col < grid_cols;
  };
  std::map<CellCoord, std::size_t> strong_owner;
  std::set<CellCoord> used;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const std::string where = "layout.pairs[" + std::to_string(k) + "]";
    if (!inside(p.strong) || !inside(p.weak))
      throw ValidationError(where + ": cell outside the " + std::to_string(grid_rows) + "x" +
                            std::to_string(grid_cols) + " grid");
    if (!grid_adjacent(p.strong, p.weak))
      throw ValidationError(where + ": strong " + cell_str(p.strong) + " and weak " +
                            cell_str(p.weak) + " cells are not grid-adjacent");
    for (const auto& c : {p.strong, p.weak})
      if (!used.insert(c).second)
        throw ValidationError(where + ": cell " + cell_str(c) + " belongs to more than one pair");
    strong_owner[p.strong] = k;
  }
  std::set<std::pair<CellCoord, CellCoord>> seen;
  for (std::size_t k = 0; k < backbone_edges.size(); ++k) {
    const auto& e = backbone_edges[k];
    const std::string where = "layout.backbone_edges[" + std::to_string(k) + "]";
    if (!strong_owner.count(e.a) || !strong_owner.count(e.b))
      throw ValidationError(where + ": endpoints must be strong cells of pairs");
    if (e.a == e.b) throw ValidationError(where + ": endpoints coincide");
    if (!grid_adjacent(e.a, e.b))
      throw ValidationError(where + ": strong cells " + cell_str(e.a) + " and " + cell_str(e.b) +
                            " are not grid-adjacent");
    if (!(e.sign == 1 || e.sign == -1 || (allow_unset_signs && e.sign == 0)))
      throw ValidationError(where + ": sign must be +1 or -1");
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert({key.first, key.second}).second)
      throw ValidationError(where + ": duplicate backbone edge");
  }
}

WeakStrongLayout single_pair_layout() {
  WeakStrongLayout layout;
  layout.grid_rows = 2;
  layout.grid_cols = 1;
  layout.pairs.push_back({{1, 0}, {0, 0}});
  return layout;
}

WeakStrongLayout tiled_pair_layout(int pairs) {
  if (pairs < 1) throw ValidationError("tiled_pair_layout: pair count must be >= 1");
  const CellPair seed = tile_pair(0, 0, kSeedTilePair);
  const double cr = seed.strong.row, cc = seed.strong.col;
  using Entry = std::tuple<double, CellCoord>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  std::set<CellCoord> queued;
  auto push = [&](const CellCoord& s) {
    if (!queued.insert(s).second) return;
    const double d = (s.row - cr) * (s.row - cr) + (s.col - cc) * (s.col - cc);
    frontier.emplace(d, s);
  };
  push(seed.strong);
  std::vector<CellPair> chosen;
  while (static_cast<int>(chosen.size()) < pairs) {
    const CellCoord s = std::get<1>(frontier.top());
    frontier.pop();
    chosen.push_back(*strong_pair_at(s));
    for (const auto& st : kSteps) {
      const CellCoord t{s.row + st[0], s.col + st[1]};
      if (strong_pair_at(t)) push(t);
    }
  }
  return finish_layout(std::move(chosen));
}

WeakStrongLayout tiled_grid_layout(int rows, int cols) {
  if (rows < 1 || cols < 1) throw ValidationError("tiled_grid_layout: rows and cols must be >= 1");
  std::vector<CellPair> chosen;
  for (int tr = 0; tr * kTile < rows; ++tr) {
    for (int tc = 0; tc * kTile < cols; ++tc) {
      for (std::size_t k = 0; k < kTilePairs.size(); ++k) {
        const CellPair p = tile_pair(tr, tc, k);
        if (p.strong.row < rows && p.strong.col < cols && p.weak.row < rows && p.weak.col < cols)
          chosen.push_back(p);
      }
    }
  }
  if (chosen.empty()) throw ValidationError("tiled_grid_layout: window holds no complete pair");
  return finish_layout(std::move(chosen), std::pair{rows, cols});
}

}  // namespace wsc

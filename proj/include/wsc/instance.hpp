#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsc {

using Spin = std::int8_t;
using SiteId = std::uint32_t;
using Energy = std::int64_t;

inline constexpr int kDefaultScale = 25;
inline constexpr std::size_t kBruteForceLimit = 24;

// ---------------------------------------------------------------------------
// Chimera topology
// ---------------------------------------------------------------------------

enum class Side : std::uint8_t { left = 0, right = 1 };

struct CellCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const CellCoord&) const = default;
};

struct ChimeraCoord {
  int cell_row = 0;
  int cell_col = 0;
  Side side = Side::left;
  int slot = 0;  // 0..3
  auto operator<=>(const ChimeraCoord&) const = default;
};

// Grid of K4,4 cells. Horizontally adjacent cells are joined through their
// equal-slot left sites, vertically adjacent cells through equal-slot right
// sites.
struct ChimeraGraph {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<SiteId, SiteId>> edges;  // i < j, sorted

  std::size_t num_sites() const { return static_cast<std::size_t>(rows) * cols * 8; }
  SiteId site(const ChimeraCoord& c) const;
  ChimeraCoord coord(SiteId id) const;
};

ChimeraGraph build_chimera(int rows, int cols);

// Number of edges of a rows x cols chimera graph.
constexpr std::size_t chimera_edge_count(std::size_t rows, std::size_t cols) {
  return 16 * rows * cols + 4 * rows * (cols - 1) + 4 * (rows - 1) * cols;
}

// ---------------------------------------------------------------------------
// Weak-strong layout
// ---------------------------------------------------------------------------

struct CellPair {
  CellCoord strong;
  CellCoord weak;
  bool operator==(const CellPair&) const = default;
};

// Backbone coupling between the strong cells of two pairs. sign is +1 or -1;
// 0 means "not yet drawn" and is only accepted as generator input.
struct BackboneEdge {
  CellCoord a;
  CellCoord b;
  int sign = 0;
  bool operator==(const BackboneEdge&) const = default;
};

struct WeakStrongLayout {
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<CellPair> pairs;
  std::vector<BackboneEdge> backbone_edges;
  int lambda_num = 11;
  int lambda_den = 25;

  // Throws ValidationError describing the first violated invariant.
  // allow_unset_signs permits sign == 0 on backbone edges.
  void validate(bool allow_unset_signs = false) const;

  bool operator==(const WeakStrongLayout&) const = default;
};

// One vertically stacked pair: weak cell (0,0) above strong cell (1,0).
WeakStrongLayout single_pair_layout();

// Connected network of `pairs` weak-strong pairs cut from a fixed periodic
// tiling of the chimera grid. Pairs are added nearest-first from a seed pair,
// always through a backbone neighbour, so the strong cells form one connected
// component. Backbone edges join every grid-adjacent pair of strong cells;
// their signs are left unset.
WeakStrongLayout tiled_pair_layout(int pairs);

// All pairs of the same periodic tiling that fit inside a rows x cols window.
WeakStrongLayout tiled_grid_layout(int rows, int cols);

// ---------------------------------------------------------------------------
// Problem instance
// ---------------------------------------------------------------------------

struct Coupling {
  SiteId i = 0;
  SiteId j = 0;
  std::int32_t value = 0;
  bool operator==(const Coupling&) const = default;
};

struct FieldTerm {
  SiteId site = 0;
  std::int32_t value = 0;
  bool operator==(const FieldTerm&) const = default;
};

struct Neighbor {
  SiteId site;
  std::int32_t coupling;
};

enum class ReferenceMethod { none, exhaustive, construction, consensus };

std::string_view to_string(ReferenceMethod m);
ReferenceMethod parse_reference_method(std::string_view s);

// Ising problem E(s) = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i with all J and h
// stored as integers multiplied by `scale`; physical energy = E / scale.
class ProblemInstance {
 public:
  ProblemInstance() = default;

  // Validates (i < j, no duplicates, ids < n, scale > 0) and sorts the terms.
  static ProblemInstance create(std::size_t n, std::vector<Coupling> couplings,
                                std::vector<FieldTerm> fields, int scale = kDefaultScale);

  std::size_t n() const { return n_; }
  int scale() const { return scale_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const std::vector<FieldTerm>& fields() const { return fields_; }

  std::int32_t field(SiteId i) const { return dense_field_[i]; }
  std::span<const Neighbor> neighbors(SiteId i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  // Largest |h_i| + sum_j |J_ij| over all sites.
  std::int64_t max_local_field() const { return max_local_field_; }

  const std::optional<WeakStrongLayout>& layout() const { return layout_; }
  void set_layout(WeakStrongLayout layout);

  std::optional<Energy> reference_energy() const { return reference_energy_; }
  ReferenceMethod reference_method() const { return reference_method_; }
  void set_reference(Energy e, ReferenceMethod method);
  void clear_reference();

  // True when the instance file did not carry a scale and the default was used.
  bool scale_defaulted() const { return scale_defaulted_; }
  void mark_scale_defaulted(bool v) { scale_defaulted_ = v; }

  // Structural equality (terms, scale, layout, reference); ignores metadata.
  bool operator==(const ProblemInstance& other) const;

 private:
  std::size_t n_ = 0;
  int scale_ = kDefaultScale;
  std::vector<Coupling> couplings_;
  std::vector<FieldTerm> fields_;
  std::vector<std::int32_t> dense_field_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::int64_t max_local_field_ = 0;
  std::optional<WeakStrongLayout> layout_;
  std::optional<Energy> reference_energy_;
  ReferenceMethod reference_method_ = ReferenceMethod::none;
  bool scale_defaulted_ = false;
};

// Site numbering of generated weak-strong instances: pair k owns sites
// [16k, 16k+8) for its strong cell and [16k+8, 16k+16) for its weak cell;
// inside a cell the offset is side*4 + slot.
constexpr SiteId pair_site(std::size_t pair, bool weak, Side side, int slot) {
  return static_cast<SiteId>(pair * 16 + (weak ? 8 : 0) + static_cast<int>(side) * 4 + slot);
}

// Builds the weak-strong Hamiltonian for `layout`. Backbone edges with unset
// sign draw +1/-1 uniformly from backbone_seed; the returned instance records
// the realized signs in its layout. The reference energy is the all-down
// energy (construction), verified exhaustively when n <= 24.
ProblemInstance generate_network(const WeakStrongLayout& layout, std::uint64_t backbone_seed,
                                 int scale = kDefaultScale);

// Exact scaled energy. Throws ValidationError on length mismatch.
Energy energy(const ProblemInstance& inst, std::span<const Spin> spins);

// energy(flip(spins, site)) - energy(spins) in O(degree).
inline Energy delta_energy(const ProblemInstance& inst, std::span<const Spin> spins, SiteId site) {
  std::int64_t local = inst.field(site);
  for (const Neighbor& nb : inst.neighbors(site)) local += std::int64_t{nb.coupling} * spins[nb.site];
  return 2 * spins[site] * local;
}

struct GroundState {
  Energy energy = 0;
  std::vector<Spin> spins;
};

// Exhaustive minimum over all 2^n states (n <= 24). Among equal minima the
// lexicographically smallest state wins, ordering -1 before +1.
GroundState brute_force_ground_state(const ProblemInstance& inst);

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

inline constexpr int kInstanceFormatVersion = 1;

std::string serialize_instance(const ProblemInstance& inst);
ProblemInstance parse_instance(std::string_view text);

ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

}  // namespace wsc

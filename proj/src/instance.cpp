#include "wsc/instance.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <string>
#include <tuple>

#include "wsc/errors.hpp"
#include "wsc/rng.hpp"

namespace wsc {

std::string_view to_string(ReferenceMethod m) {
  switch (m) {
    case ReferenceMethod::none: return "none";
    case ReferenceMethod::exhaustive: return "exhaustive";
    case ReferenceMethod::construction: return "construction";
    case ReferenceMethod::consensus: return "consensus";
  }
  return "none";
}

ReferenceMethod parse_reference_method(std::string_view s) {
  if (s == "none") return ReferenceMethod::none;
  if (s == "exhaustive") return ReferenceMethod::exhaustive;
  if (s == "construction") return ReferenceMethod::construction;
  if (s == "consensus") return ReferenceMethod::consensus;
  throw ValidationError("unknown reference_method '" + std::string(s) + "'");
}

ProblemInstance ProblemInstance::create(std::size_t n, std::vector<Coupling> couplings,
                                        std::vector<FieldTerm> fields, int scale) {
  if (scale <= 0) throw ValidationError("instance: scale must be positive");
  for (std::size_t k = 0; k < couplings.size(); ++k) {
    const Coupling& c = couplings[k];
    const std::string where = "couplings[" + std::to_string(k) + "]";
    if (c.i == c.j) throw ValidationError(where + ": self-loop on site " + std::to_string(c.i));
    if (c.i >= n || c.j >= n)
      throw ValidationError(where + ": site id out of range (n = " + std::to_string(n) + ")");
    if (c.i > c.j) throw ValidationError(where + ": expected i < j");
  }
  for (std::size_t k = 0; k < fields.size(); ++k)
    if (fields[k].site >= n)
      throw ValidationError("fields[" + std::to_string(k) + "]: site id out of range (n = " +
                            std::to_string(n) + ")");

  std::sort(couplings.begin(), couplings.end(), [](const Coupling& a, const Coupling& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  for (std::size_t k = 1; k < couplings.size(); ++k)
    if (couplings[k].i == couplings[k - 1].i && couplings[k].j == couplings[k - 1].j)
      throw ValidationError("couplings: duplicate edge (" + std::to_string(couplings[k].i) + ", " +
                            std::to_string(couplings[k].j) + ")");
  std::sort(fields.begin(), fields.end(),
            [](const FieldTerm& a, const FieldTerm& b) { return a.site < b.site; });
  for (std::size_t k = 1; k < fields.size(); ++k)
    if (fields[k].site == fields[k - 1].site)
      throw ValidationError("fields: duplicate entry for site " + std::to_string(fields[k].site));

  ProblemInstance inst;
  inst.n_ = n;
  inst.scale_ = scale;
  inst.dense_field_.assign(n, 0);
  for (const auto& f : fields) inst.dense_field_[f.site] = f.value;

  std::vector<std::size_t> degree(n, 0);
  for (const auto& c : couplings) {
    ++degree[c.i];
    ++degree[c.j];
  }
  inst.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) inst.offsets_[i + 1] = inst.offsets_[i] + degree[i];
  inst.adjacency_.resize(inst.offsets_[n]);
  std::vector<std::size_t> fill(inst.offsets_.begin(), inst.offsets_.end() - 1);
  for (const auto& c : couplings) {
    inst.adjacency_[fill[c.i]++] = {c.j, c.value};
    inst.adjacency_[fill[c.j]++] = {c.i, c.value};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t local = std::abs(std::int64_t{inst.dense_field_[i]});
    for (const auto& nb : inst.neighbors(static_cast<SiteId>(i))) local += std::abs(nb.coupling);
    inst.max_local_field_ = std::max(inst.max_local_field_, local);
  }
  inst.couplings_ = std::move(couplings);
  inst.fields_ = std::move(fields);
  return inst;
}

void ProblemInstance::set_layout(WeakStrongLayout layout) {
  layout.validate();
  if (layout.pairs.size() * 16 != n_)
    throw ValidationError("layout: " + std::to_string(layout.pairs.size()) + " pairs need n = " +
                          std::to_string(layout.pairs.size() * 16) + ", instance has n = " +
                          std::to_string(n_));
  layout_ = std::move(layout);
}

void ProblemInstance::set_reference(Energy e, ReferenceMethod method) {
  if (method == ReferenceMethod::none)
    throw ValidationError("set_reference: method 'none' carries no energy");
  reference_energy_ = e;
  reference_method_ = method;
}

void ProblemInstance::clear_reference() {
  reference_energy_.reset();
  reference_method_ = ReferenceMethod::none;
}

bool ProblemInstance::operator==(const ProblemInstance& o) const {
  return n_ == o.n_ && scale_ == o.scale_ && couplings_ == o.couplings_ && fields_ == o.fields_ &&
         layout_ == o.layout_ && reference_energy_ == o.reference_energy_ &&
         reference_method_ == o.reference_method_;
}

Energy energy(const ProblemInstance& inst, std::span<const Spin> spins) {
  if (spins.size() != inst.n())
    throw ValidationError("energy: state has " + std::to_string(spins.size()) +
                          " spins, instance has n = " + std::to_string(inst.n()));
  Energy e = 0;
  for (const auto& c : inst.couplings()) e -= Energy{c.value} * spins[c.i] * spins[c.j];
  for (const auto& f : inst.fields()) e -= Energy{f.value} * spins[f.site];
  return e;
}

ProblemInstance generate_network(const WeakStrongLayout& input, std::uint64_t backbone_seed,
                                 int scale) {
  input.validate(/*allow_unset_signs=*/true);
  if (scale <= 0 || scale % input.lambda_den != 0)
    throw ValidationError("generate_network: scale must be a positive multiple of lambda_den (" +
                          std::to_string(input.lambda_den) + ")");
  WeakStrongLayout layout = input;
  Rng rng(backbone_seed, {0xbac});
  for (auto& e : layout.backbone_edges)
    if (e.sign == 0) e.sign = rng.spin();

  const std::size_t pairs = layout.pairs.size();
  const std::size_t n = pairs * 16;
  const std::int32_t weak_field = layout.lambda_num * (scale / layout.lambda_den);

  // cell -> (pair index, is weak)
  auto locate = [&](const CellCoord& c) -> std::pair<std::size_t, bool> {
    for (std::size_t k = 0; k < pairs; ++k) {
      if (layout.pairs[k].strong == c) return {k, false};
      if (layout.pairs[k].weak == c) return {k, true};
    }
    throw ValidationError("generate_network: cell is not part of any pair");
  };
  // Inter-cell couplers: vertical neighbours share right-side slots,
  // horizontal neighbours left-side slots.
  auto inter_side = [](const CellCoord& a, const CellCoord& b) {
    return a.col == b.col ? Side::right : Side::left;
  };

  std::vector<Coupling> couplings;
  std::vector<FieldTerm> fields;
  couplings.reserve(pairs * 36 + layout.backbone_edges.size() * 4);
  fields.reserve(n);
  for (std::size_t k = 0; k < pairs; ++k) {
    for (bool weak : {false, true}) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          couplings.push_back(
              {pair_site(k, weak, Side::left, a), pair_site(k, weak, Side::right, b), scale});
      for (int s = 0; s < 8; ++s)
        fields.push_back({pair_site(k, weak, static_cast<Side>(s / 4), s % 4),
                          weak ? weak_field : -scale});
    }
    const Side side = inter_side(layout.pairs[k].strong, layout.pairs[k].weak);
    for (int s = 0; s < 4; ++s)
      couplings.push_back({pair_site(k, false, side, s), pair_site(k, true, side, s), scale});
  }
  for (const auto& e : layout.backbone_edges) {
    auto [ka, wa] = locate(e.a);
    auto [kb, wb] = locate(e.b);
    const Side side = inter_side(e.a, e.b);
    for (int s = 0; s < 4; ++s) {
      SiteId i = pair_site(ka, wa, side, s);
      SiteId j = pair_site(kb, wb, side, s);
      if (i > j) std::swap(i, j);
      couplings.push_back({i, j, e.sign * scale});
    }
  }

  ProblemInstance inst = ProblemInstance::create(n, std::move(couplings), std::move(fields), scale);
  inst.set_layout(std::move(layout));
  const std::vector<Spin> all_down(n, Spin{-1});
  inst.set_reference(energy(inst, all_down), ReferenceMethod::construction);
  if (n <= kBruteForceLimit)
    inst.set_reference(brute_force_ground_state(inst).energy, ReferenceMethod::exhaustive);
  return inst;
}

GroundState brute_force_ground_state(const ProblemInstance& inst) {
  const std::size_t n = inst.n();
  if (n > kBruteForceLimit)
    throw ValidationError("brute_force_ground_state: n = " + std::to_string(n) +
                          " exceeds the exhaustive limit of " + std::to_string(kBruteForceLimit) +
                          " sites");
  // Gray-code walk. Site i maps to bit (n-1-i) of the index with +1 as the set
  // bit, so smaller indices are lexicographically smaller states.
  std::vector<Spin> spins(n, Spin{-1});
  Energy e = energy(inst, spins);
  Energy best = e;
  std::uint64_t best_index = 0;
  std::uint64_t index = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const int bit = std::countr_zero(step);
    const auto site = static_cast<SiteId>(n - 1 - bit);
    e += delta_energy(inst, spins, site);
    spins[site] = static_cast<Spin>(-spins[site]);
    index ^= std::uint64_t{1} << bit;
    if (e < best || (e == best && index < best_index)) {
      best = e;
      best_index = index;
    }
  }
  GroundState gs;
  gs.energy = best;
  gs.spins.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    gs.spins[i] = ((best_index >> (n - 1 - i)) & 1) ? Spin{1} : Spin{-1};
  return gs;
}

}  // namespace wsc

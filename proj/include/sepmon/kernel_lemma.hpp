// Group-level check that the kernel of G(M(H_i)) -> G(M(F_i)) is the cyclic
// subgroup generated by the summed ranges of the i-th group's connectors.

#pragma once

#include <stdexcept>
#include <string>

#include "sepmon/blocks.hpp"
#include "sepmon/ktheory.hpp"
#include "sepmon/monoid.hpp"

namespace sepmon {

struct InvalidIndex : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct KernelLemmaVerdict {
  bool verified = false;
  ktheory::IntMatrix kernel_basis{0, 0};  // canonical coordinates of G(M(H_i))
  ktheory::IntMatrix cyclic_basis{0, 0};
};

inline KernelLemmaVerdict check_kernel_cyclic_lemma(const PullbackData& d, int i) {
  const int r = static_cast<int>(d.factors.size());
  if (i < 1 || i > r) throw InvalidIndex("factor index " + std::to_string(i) + " out of 1.." +
                                         std::to_string(r));
  const SeparatedGraph& fi = d.factors[static_cast<size_t>(i - 1)];
  const std::set<Token>& hi = d.H[static_cast<size_t>(i - 1)];

  KernelLemmaVerdict out;
  if (hi.empty()) {
    out.verified = true;  // both subgroups trivial
    return out;
  }

  SeparatedGraph rg = restrict_to(fi, hi);
  ktheory::FgAbelianGroup gh = grothendieck_group(rg);
  ktheory::FgAbelianGroup gf = grothendieck_group(fi);

  GeneratorMapping inc;
  for (const Token& w : rg.vertices()) inc[w] = MonoidElement::generator(fi, w);
  ktheory::GroupHom h = induced_group_hom(gh, gf, generator_matrix(rg, fi, inc));
  out.kernel_basis = kernel(h);

  // sum of the generators at the ranges of the connectors of X_i
  std::vector<ktheory::Int> raw(static_cast<size_t>(rg.num_vertices()), 0);
  for (const Token& eid : d.F.groups_at(d.v)[static_cast<size_t>(i - 1)]) {
    const Edge& e = d.F.edge(eid);
    if (e.dst == d.v) continue;  // the loop
    raw[static_cast<size_t>(rg.vertex_index(e.dst))] += 1;
  }
  std::vector<ktheory::Int> img = gh.image(raw);
  ktheory::IntMatrix cyc(static_cast<long>(img.size()), 1);
  for (size_t k = 0; k < img.size(); ++k) cyc.at(static_cast<long>(k), 0) = img[k];
  out.cyclic_basis = ktheory::canonical_subgroup_basis(gh, cyc);

  out.verified = ktheory::same_subgroup(gh, out.kernel_basis, cyc);
  return out;
}

}  // namespace sepmon

// Library tour: Ext of two complexes, an extension and its class, Tors on the
// pseudo-circle, and the partial resolution of Z/2.
#include "picard/document.hpp"
#include "picard/resolution.hpp"

#include <iostream>

using namespace picard;

static std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

int main() {
  const CochainComplex z2 = CochainComplex::concentrated(FgAbGroup::cyclic(2), 0);
  const CochainComplex z4 = CochainComplex::concentrated(FgAbGroup::cyclic(4), -1);

  std::cout << "Ext^i(Z/2, Z/2):";
  for (int i = 1; i >= -2; --i) std::cout << " i=" << i << ": " << str(ext_group(z2, z2, i));
  std::cout << "\nExt^i(Z/2, Z/4[1]):";
  for (int i = 1; i >= -2; --i) std::cout << " i=" << i << ": " << str(ext_group(z2, z4, i));
  std::cout << "\n";

  // The nonzero class of Ext^1(Z/2, Z/2) is realized by 0 -> Z/2 -> E -> Z/2 -> 0.
  const ExtGroup ext(z2, z2);
  const IntVector xi = class_cocycle(ext, {1});
  const Extension e = realize_extension(ext, xi);
  std::cout << "E has H^0 = " << str(cohomology_at(e.e, 0))
            << ", splits: " << (splits_in_cohomology(e) ? "yes" : "no")
            << ", classifies back to " << class_coordinates(ext, classify_extension(ext, e))[0] << "\n";

  const PosetSite circle({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}});
  const auto tors = tors_groups(SheafComplex::concentrated(PosetSheaf::constant(circle, FgAbGroup::free(1)), 0));
  std::cout << "Tors on the pseudo-circle with Z: i=1: " << str(tors[0]) << ", i=0: " << str(tors[1]) << "\n";

  const ResolutionChain r = build_resolution(z2);
  for (const auto& l : resolution_homology_check(r).lines)
    std::cout << "H^" << l.degree << "(Tot L(Z/2)) = " << str(l.total) << (l.asserted ? (l.ok ? " (matches)" : " (differs)") : "") << "\n";

  std::cout << emit_document(z2);
}

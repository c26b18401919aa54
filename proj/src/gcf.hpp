#ifndef QHO_GCF_HPP
#define QHO_GCF_HPP

#include "constructible.hpp"
#include "formula.hpp"
#include "fragment.hpp"

namespace qho {

// The working representation of a general core formula
//   exists f g alpha gamma delta epsilon b p q m o lambda mu
//     (A^Sigma ^ D_1 ^ D_2 ^ B ^ R)
// with H-sort parameters h (canonical basis elements of a fragment) and a
// constructible predicate R over the canonical variable list:
//   alpha_i | gamma_ij (Sigma) | delta_ij (Delta_1) | epsilon_ij (Delta_2) |
//   b_ij (Sigma) | m_ij (Delta_1) | o_ij (Delta_2) | lambda_ij | mu_ij | a_k
// followed by any existentially bound block R carries (from projection).
struct GeneralCoreFormula {
  PartitionEnumeration part;
  ChainMap sigma;   // (i,j) in 1..s x 1..s
  ChainMap delta1;  // (i,j) in 1..s x 1..t
  ChainMap delta2;  // (i,j) in 1..t x 1..s
  std::vector<BundleVector> params;  // length t
  unsigned num_a = 0;
  Pred r;
};

// Canonical free variable list of the predicate ring.
std::vector<std::string> gcf_free_vars(const GeneralCoreFormula& gcf);
// Free variables followed by R's bound block.
PolyRingPtr gcf_ring(const GeneralCoreFormula& gcf, TowerPtr tower);
// Checks the predicate ring matches the index data (the q = s + 2(|Sigma| +
// |Delta_1| + |Delta_2|) + n + m + r accounting) and that parameters are
// canonical basis elements.
void gcf_validate(const GeneralCoreFormula& gcf, const Fragment& frag);

// Fresh GCF with trivial predicate over the given index data.
GeneralCoreFormula gcf_make(PartitionEnumeration part, ChainMap sigma, ChainMap delta1,
                            ChainMap delta2, std::vector<BundleVector> params,
                            unsigned num_a, TowerPtr tower);

// Display form (the quantified A ^ D ^ B ^ R block).
FormulaPtr gcf_to_formula(const GeneralCoreFormula& gcf, const TowerPtr& tower);

std::string gcf_to_json(const GeneralCoreFormula& gcf, const Fragment& frag);
GeneralCoreFormula gcf_from_json(const std::string& json, const Fragment& frag);

}  // namespace qho

#endif

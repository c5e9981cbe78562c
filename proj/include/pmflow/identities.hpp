#pragma once

#include <string>
#include <vector>

#include "pmflow/grid.hpp"
#include "pmflow/ops.hpp"

namespace pmflow {

// Trigonometric manufactured fields with a known band limit, so derivative
// and quadrature exactness at a given resolution can be decided up front.
struct TrigTerm {
  double a = 0.0;
  int kx = 0, ky = 0;
  bool sin_x = false, sin_y = false;
};

struct ManufacturedField {
  double offset = 0.0;
  std::vector<TrigTerm> terms;

  int band_limit() const;
  ScalarField sample(const Grid& g) const;  // rejects under-resolved grids
};

struct ManufacturedPair {
  ManufacturedField g, h;
};

// deterministic corpus of nonnegative g with general h
std::vector<ManufacturedPair> manufactured_corpus(int count = 24, int dim = 2);

struct IdentityResult {
  double lhs = 0.0, rhs = 0.0;
  double abs_err = 0.0;
};

struct InequalityResult {
  double lhs = 0.0, rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
};

// int |grad g|^2 lap g  ==  (2/3) int g |D2 g|^2 - (2/3) int g |lap g|^2
IdentityResult check_identity_31(const ScalarField& g, Scheme scheme);

// int |grad g|^4  <=  8 int g^2 |lap g|^2 + 4 int g^2 |D2 g|^2, for g >= 0
InequalityResult check_inequality_32(const ScalarField& g, Scheme scheme);

// int lap h |grad g|^2 ==
//   int h |D2 g|^2 - int h |lap g|^2 + int grad g . D2 h grad g
IdentityResult check_identity_33(const ScalarField& g, const ScalarField& h,
                                 Scheme scheme);

struct CorpusRow {
  int pair_id = 0;
  std::string which;
  double lhs = 0.0, rhs = 0.0, err = 0.0, tol = 0.0;
  bool pass = false;
};

// runs 31/32/33 over the corpus at one resolution; tol applies to the two
// identities, the inequality passes when slack >= -tol. Pairs are
// distributed over threads and written back by index, so the result does
// not depend on the thread count.
std::vector<CorpusRow> run_identity_corpus(const std::vector<ManufacturedPair>& corpus,
                                           int resolution, Scheme scheme,
                                           double tol_scale = 1e-9,
                                           int dim = 2, int threads = 1);

void write_corpus_csv(const std::string& path, const std::vector<CorpusRow>& rows);

}  // namespace pmflow

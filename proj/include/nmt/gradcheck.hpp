#pragma once

#include <string>
#include <vector>

#include "nmt/model.hpp"

namespace nmt {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckResult {
  std::vector<GradCheckEntry> groups;  // one entry per parameter tensor
  double worst = 0.0;
  std::string worst_name;
  bool pass = false;
  double tolerance = 1e-4;
};

// Builds a tiny model (vocab <= 12, word/char dims 6, hidden 4/8) for the
// given mode and compares analytic sentence-loss gradients of every
// parameter element against central finite differences.
GradCheckResult run_model_gradcheck(ReprMode mode, std::uint64_t seed,
                                    double eps = 1e-5, double tol = 1e-4);

// The tiny configuration/model the check uses (also handy in tests).
ModelConfig tiny_model_config(ReprMode mode);
Model tiny_model(ReprMode mode, std::uint64_t seed);

}  // namespace nmt

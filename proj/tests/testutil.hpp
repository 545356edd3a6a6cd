#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nmt/tensor.hpp"

namespace testutil {

// Max relative error between analytic gradients and central finite
// differences. loss_fn(tape) must build the loss from the given parameter
// tensors, watching them when a tape is passed; with nullptr it evaluates
// the same function without recording.
template <class F>
double fd_max_rel_err(std::vector<nmt::Tensor*> params, F loss_fn, double eps = 1e-5) {
  nmt::Tape tape;
  nmt::Tensor loss = loss_fn(&tape);
  tape.backward(loss);
  double worst = 0.0;
  for (nmt::Tensor* p : params) {
    const std::vector<double>* g = tape.grad_of(*p);
    for (int i = 0; i < p->size(); ++i) {
      double orig = p->at(i);
      p->at(i) = orig + eps;
      double lp = loss_fn(nullptr).value();
      p->at(i) = orig - eps;
      double lm = loss_fn(nullptr).value();
      p->at(i) = orig;
      double fd = (lp - lm) / (2.0 * eps);
      double an = g ? (*g)[i] : 0.0;
      worst = std::max(worst, std::abs(an - fd) / std::max(1.0, std::abs(an)));
    }
  }
  return worst;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("nmt_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace testutil

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nmt/model.hpp"

namespace nmt {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Gradient buffers aligned with a NamedParams list.
using GradBuffers = std::vector<std::vector<double>>;

GradBuffers zero_grads(const NamedParams& params);
// Adds this tape's parameter gradients into acc.
void accumulate_grads(const Tape& tape, const NamedParams& params, GradBuffers& acc);
void scale_grads(GradBuffers& grads, double c);
double global_grad_norm(const GradBuffers& grads);
// Rescales so the global norm is at most max_norm.
void clip_grads(GradBuffers& grads, double max_norm);

// Adam with bias correction over a fixed parameter list. step() zeroes the
// gradient buffers afterwards and rejects non-finite gradients.
class Adam {
 public:
  Adam(NamedParams params, AdamConfig cfg);

  void step(GradBuffers& grads);
  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  NamedParams params_;
  AdamConfig cfg_;
  GradBuffers m_, v_;
  long t_ = 0;
};

struct TrainConfig {
  int max_epochs = 100;
  int batch_size = 1;
  int eval_every = 5;  // dev decode + BLEU every this many epochs
  std::uint64_t seed = 0;
  double clip_norm = 5.0;
  AdamConfig adam;
  bool smooth_dev_bleu = false;
  int dev_max_len = 50;
  std::ostream* log = nullptr;  // line-JSON epoch records
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> dev_bleu;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  std::optional<double> best_dev_bleu;
};

struct Checkpoint {
  Model model;
  int epoch = 0;
  std::optional<double> dev_bleu;
};

// Epoch loop: epoch-seeded shuffle, per-sentence backprop accumulated over
// the batch, global-norm clipping, Adam. Dev is decoded greedily every
// eval_every epochs and the highest-BLEU snapshot is retained (ties keep
// the earliest). With no dev evaluation the final model is returned.
std::pair<Checkpoint, TrainReport> train(const Model& start, const ParallelCorpus& corpus,
                                         const ParallelCorpus& dev, const TrainConfig& cfg);

std::string epoch_record_json(const EpochRecord& r);

// Binary container: magic, little-endian u64 header length, JSON header
// (config, vocabularies, tensor names/shapes, epoch, dev BLEU), then the
// tensors as little-endian 64-bit floats in header order.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace nmt

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cgcn/batch.hpp"
#include "cgcn/labels.hpp"
#include "cgcn/matrix.hpp"
#include "cgcn/sparse.hpp"

namespace cgcn {

// Layer propagation rules.
//   plain:         X' = relu(A' X W)
//   residual:      X' = relu(A' X W) + X   (hidden layers of equal width)
//   identity_aug:  X' = relu(Ã X W),           Ã = (D+I)^-1 (A+I)
//   diag_enhanced: X' = relu((Ã + λ diag(Ã)) X W)
enum class Variant { kPlain, kResidual, kIdentityAug, kDiagEnhanced };

Variant parse_variant(std::string_view s);
std::string_view to_string(Variant v);

struct GcnModel {
  std::vector<std::size_t> dims;  // F_0 .. F_L
  std::vector<DenseMatrix> weights;
  Variant variant = Variant::kPlain;
  double lambda = 1.0;
  Task task = Task::kMulticlass;

  std::size_t n_layers() const { return weights.size(); }
  // True when layer l adds its input back after the activation.
  bool residual_at(std::size_t l) const;
  void validate() const;

  // Glorot-uniform weights, one derived stream per layer.
  static GcnModel init(std::vector<std::size_t> dims, Variant variant, double lambda, Task task,
                       std::uint64_t seed);
};

// The matrix a variant multiplies by, plus its transpose for the backward pass.
struct Propagation {
  SparseMatrix forward;
  SparseMatrix backward;
};

// plain/residual use `adj_norm`; identity_aug and diag_enhanced always use the
// row-normalized augmented matrix of `adj_raw`.
Propagation make_propagation(Variant variant, const SparseMatrix& adj_raw,
                             const SparseMatrix& adj_norm, double lambda);
Propagation make_propagation(Variant variant, const SparseMatrix& adj_raw, NormMode norm_mode,
                             double lambda);

// One layer's pre-activation for an already-normalized matrix `adj`.
DenseMatrix propagate(Variant variant, const SparseMatrix& adj, const DenseMatrix& x,
                      const DenseMatrix& w, double lambda);

struct LayerCache {
  DenseMatrix input;       // X^(l) before dropout
  DenseMatrix mask;        // empty when dropout is off
  DenseMatrix aggregated;  // A' (X^(l) * mask)
  DenseMatrix pre_activation;
};

struct ForwardTrace {
  std::vector<LayerCache> layers;
  DenseMatrix logits;
  bool precomputed_input = false;
};

struct ForwardOptions {
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;
  bool training = false;
  // The input already equals A'X; layer 0 skips its propagation.
  bool precomputed_input = false;
};

ForwardTrace forward(const GcnModel& model, const Propagation& prop, const DenseMatrix& input,
                     const ForwardOptions& opts);
ForwardTrace forward(const GcnModel& model, const Batch& batch, NormMode norm_mode,
                     double dropout_rate, std::uint64_t seed, bool training);

struct LossGrad {
  double loss = 0.0;
  std::vector<DenseMatrix> grads;
  bool no_train_nodes = false;
};

// Mean softmax cross-entropy (multiclass) or mean per-class sigmoid
// cross-entropy (multilabel) over rows with train_mask set, and its gradient.
LossGrad loss_and_grad(const GcnModel& model, const ForwardTrace& trace, const Propagation& prop,
                       const LabelTable& labels, const std::vector<char>& train_mask);

// Loss and logit gradient only.
double output_loss(Task task, const DenseMatrix& logits, const LabelTable& labels,
                   const std::vector<char>& train_mask, DenseMatrix* dlogits);

DenseMatrix precompute_ax(const SparseMatrix& adj_norm, const DenseMatrix& x);

struct Metrics {
  double micro_f1 = 0.0;
  double accuracy = 0.0;
};

// Pooled micro-F1 over `rows`; multiclass predicts argmax, multilabel z > 0.
Metrics score_logits(Task task, const DenseMatrix& logits, const LabelTable& labels,
                     std::span<const Index> rows);

Metrics predict_metrics(const GcnModel& model, const SparseMatrix& graph,
                        const DenseMatrix& features, const LabelTable& labels,
                        std::span<const Index> split, NormMode norm_mode);

}  // namespace cgcn

#include "cgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cgcn/error.hpp"
#include "cgcn/kernels.hpp"
#include "cgcn/rng.hpp"

namespace cgcn {

Variant parse_variant(std::string_view s) {
  if (s == "plain") return Variant::kPlain;
  if (s == "residual") return Variant::kResidual;
  if (s == "identity_aug") return Variant::kIdentityAug;
  if (s == "diag_enhanced") return Variant::kDiagEnhanced;
  throw InputError("unknown layer variant '" + std::string(s) +
                   "' (expected plain|residual|identity_aug|diag_enhanced)");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kPlain: return "plain";
    case Variant::kResidual: return "residual";
    case Variant::kIdentityAug: return "identity_aug";
    case Variant::kDiagEnhanced: return "diag_enhanced";
  }
  return "plain";
}

bool GcnModel::residual_at(std::size_t l) const {
  return variant == Variant::kResidual && l >= 1 && l + 1 < n_layers() && dims[l] == dims[l + 1];
}

void GcnModel::validate() const {
  if (weights.empty() || dims.size() != weights.size() + 1) {
    throw InputError("model: need L >= 1 weight matrices and L+1 dims");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != dims[l] || weights[l].cols() != dims[l + 1]) {
      throw InputError("model: weight " + std::to_string(l) + " has wrong shape");
    }
    if (!weights[l].all_finite()) throw NumericError("model: weight " + std::to_string(l) + " not finite");
  }
  if (variant == Variant::kResidual) {
    for (std::size_t l = 1; l + 1 < weights.size(); ++l) {
      if (dims[l] != dims[l + 1]) {
        throw InputError("model: residual variant needs equal hidden widths (F_" + std::to_string(l) +
                         " != F_" + std::to_string(l + 1) + ")");
      }
    }
  }
}

GcnModel GcnModel::init(std::vector<std::size_t> dims, Variant variant, double lambda, Task task,
                        std::uint64_t seed) {
  if (dims.size() < 2) throw InputError("model: need at least input and output widths");
  GcnModel m;
  m.variant = variant;
  m.lambda = lambda;
  m.task = task;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double s = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    Rng rng(derive_seed(seed, l));
    DenseMatrix w(dims[l], dims[l + 1]);
    for (double& v : w.values()) v = (2.0 * uniform01(rng) - 1.0) * s;
    m.weights.push_back(std::move(w));
  }
  m.dims = std::move(dims);
  m.validate();
  return m;
}

Propagation make_propagation(Variant variant, const SparseMatrix& adj_raw,
                             const SparseMatrix& adj_norm, double lambda) {
  Propagation p;
  switch (variant) {
    case Variant::kPlain:
    case Variant::kResidual:
      p.forward = adj_norm;
      break;
    case Variant::kIdentityAug:
      p.forward = row_normalize_aug(adj_raw);
      break;
    case Variant::kDiagEnhanced:
      p.forward = add_scaled_diagonal(row_normalize_aug(adj_raw), lambda);
      break;
  }
  p.backward = transpose(p.forward);
  return p;
}

Propagation make_propagation(Variant variant, const SparseMatrix& adj_raw, NormMode norm_mode,
                             double lambda) {
  if (variant == Variant::kIdentityAug || variant == Variant::kDiagEnhanced) {
    return make_propagation(variant, adj_raw, SparseMatrix{}, lambda);
  }
  return make_propagation(variant, adj_raw, normalize(adj_raw, norm_mode), lambda);
}

DenseMatrix propagate(Variant variant, const SparseMatrix& adj, const DenseMatrix& x,
                      const DenseMatrix& w, double lambda) {
  if (adj.n_rows != adj.n_cols) throw InputError("propagate: adjacency must be square");
  if (x.cols() != w.rows()) throw InputError("propagate: feature width does not match weight rows");
  if (variant == Variant::kDiagEnhanced) {
    return kernels::gemm(kernels::spmm(add_scaled_diagonal(adj, lambda), x), w);
  }
  return kernels::gemm(kernels::spmm(adj, x), w);
}

namespace {

DenseMatrix dropout_mask(std::size_t rows, std::size_t cols, double rate, std::uint64_t seed) {
  DenseMatrix m(rows, cols);
  Rng rng(seed);
  const double keep = 1.0 / (1.0 - rate);
  for (double& v : m.values()) v = uniform01(rng) < rate ? 0.0 : keep;
  return m;
}

void hadamard_inplace(DenseMatrix& a, const DenseMatrix& b) {
  auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] *= bv[i];
}

}  // namespace

ForwardTrace forward(const GcnModel& model, const Propagation& prop, const DenseMatrix& input,
                     const ForwardOptions& opts) {
  if (input.cols() != model.dims.front()) {
    throw InputError("forward: input width " + std::to_string(input.cols()) +
                     " does not match model input width " + std::to_string(model.dims.front()));
  }
  if (opts.dropout_rate < 0.0 || opts.dropout_rate >= 1.0) {
    throw InputError("forward: dropout rate must lie in [0, 1)");
  }
  const std::size_t n_layers = model.n_layers();
  ForwardTrace trace;
  trace.precomputed_input = opts.precomputed_input;
  trace.layers.resize(n_layers);
  DenseMatrix h = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    LayerCache& c = trace.layers[l];
    DenseMatrix dropped = h;
    if (opts.training && opts.dropout_rate > 0.0) {
      c.mask = dropout_mask(h.rows(), h.cols(), opts.dropout_rate, derive_seed(opts.seed, l));
      hadamard_inplace(dropped, c.mask);
    }
    c.aggregated = (l == 0 && opts.precomputed_input) ? std::move(dropped)
                                                      : kernels::spmm(prop.forward, dropped);
    c.pre_activation = kernels::gemm(c.aggregated, model.weights[l]);
    if (!c.pre_activation.all_finite()) {
      throw NumericError("forward: non-finite activation at layer " + std::to_string(l));
    }
    if (l + 1 == n_layers) {
      trace.logits = c.pre_activation;
      c.input = std::move(h);
      break;
    }
    DenseMatrix next = c.pre_activation;
    for (double& v : next.values()) v = std::max(v, 0.0);
    if (model.residual_at(l)) {
      auto& nv = next.values();
      const auto& hv = h.values();
      for (std::size_t i = 0; i < nv.size(); ++i) nv[i] += hv[i];
    }
    c.input = std::move(h);
    h = std::move(next);
  }
  return trace;
}

ForwardTrace forward(const GcnModel& model, const Batch& batch, NormMode norm_mode,
                     double dropout_rate, std::uint64_t seed, bool training) {
  (void)norm_mode;  // batch.adj_norm already carries the configured normalization
  const Propagation prop = make_propagation(model.variant, batch.adj_raw, batch.adj_norm, model.lambda);
  return forward(model, prop, batch.features, {dropout_rate, seed, training, false});
}

double output_loss(Task task, const DenseMatrix& logits, const LabelTable& labels,
                   const std::vector<char>& train_mask, DenseMatrix* dlogits) {
  const std::size_t n = logits.rows();
  const std::size_t k = logits.cols();
  if (labels.size() != n || train_mask.size() != n) {
    throw InputError("loss: logits, labels and mask disagree in row count");
  }
  if (labels.n_classes != k) throw InputError("loss: logit width does not match class count");
  if (dlogits != nullptr) *dlogits = DenseMatrix(n, k);
  const auto n_train = static_cast<std::size_t>(std::count(train_mask.begin(), train_mask.end(), 1));
  if (n_train == 0) return 0.0;

  double loss = 0.0;
  if (task == Task::kMulticlass) {
    const double scale = 1.0 / static_cast<double>(n_train);
    std::vector<double> p(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (!train_mask[i]) continue;
      const auto z = logits.row(i);
      const double zmax = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        p[j] = std::exp(z[j] - zmax);
        sum += p[j];
      }
      const auto y = static_cast<std::size_t>(labels.ids[i].at(0));
      loss -= (z[y] - zmax) - std::log(sum);
      if (dlogits != nullptr) {
        auto d = dlogits->row(i);
        for (std::size_t j = 0; j < k; ++j) d[j] = p[j] / sum * scale;
        d[y] -= scale;
      }
    }
    return loss * scale;
  }

  const double scale = 1.0 / static_cast<double>(n_train * k);
  for (std::size_t i = 0; i < n; ++i) {
    if (!train_mask[i]) continue;
    const auto z = logits.row(i);
    std::vector<double> y(k, 0.0);
    for (auto c : labels.ids[i]) y[static_cast<std::size_t>(c)] = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double zj = z[j];
      loss += std::max(zj, 0.0) - zj * y[j] + std::log1p(std::exp(-std::abs(zj)));
      if (dlogits != nullptr) {
        const double sig = zj >= 0 ? 1.0 / (1.0 + std::exp(-zj)) : std::exp(zj) / (1.0 + std::exp(zj));
        (*dlogits)(i, j) = (sig - y[j]) * scale;
      }
    }
  }
  return loss * scale;
}

LossGrad loss_and_grad(const GcnModel& model, const ForwardTrace& trace, const Propagation& prop,
                       const LabelTable& labels, const std::vector<char>& train_mask) {
  LossGrad out;
  const std::size_t n_layers = model.n_layers();
  out.grads.reserve(n_layers);
  for (const auto& w : model.weights) out.grads.emplace_back(w.rows(), w.cols());
  DenseMatrix g;
  out.loss = output_loss(model.task, trace.logits, labels, train_mask, &g);
  if (std::count(train_mask.begin(), train_mask.end(), 1) == 0) {
    out.no_train_nodes = true;
    return out;
  }

  DenseMatrix carry;
  for (std::size_t l = n_layers; l-- > 0;) {
    const LayerCache& c = trace.layers[l];
    out.grads[l] = kernels::gemm_tn(c.aggregated, g);
    if (l == 0) break;
    DenseMatrix dh = kernels::spmm(prop.backward, kernels::gemm_nt(g, model.weights[l]));
    if (c.mask.size() != 0) hadamard_inplace(dh, c.mask);
    if (carry.size() != 0) {
      auto& dv = dh.values();
      const auto& cv = carry.values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += cv[i];
    }
    // X^(l) = relu(Z^(l)) [+ X^(l-1)]
    const DenseMatrix& z = trace.layers[l - 1].pre_activation;
    g = dh;
    auto& gv = g.values();
    const auto& zv = z.values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      if (!(zv[i] > 0.0)) gv[i] = 0.0;
    }
    carry = model.residual_at(l - 1) ? std::move(dh) : DenseMatrix{};
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (!out.grads[l].all_finite()) {
      throw NumericError("backward: non-finite gradient for weight " + std::to_string(l));
    }
  }
  return out;
}

DenseMatrix precompute_ax(const SparseMatrix& adj_norm, const DenseMatrix& x) {
  return kernels::spmm(adj_norm, x);
}

Metrics score_logits(Task task, const DenseMatrix& logits, const LabelTable& labels,
                     std::span<const Index> rows) {
  if (rows.empty()) throw InputError("metrics: evaluation split is empty");
  std::size_t tp = 0, fp = 0, fn = 0, exact = 0;
  const std::size_t k = logits.cols();
  for (Index r : rows) {
    const auto z = logits.row(r);
    std::vector<char> pred(k, 0), truth(k, 0);
    if (task == Task::kMulticlass) {
      pred[std::max_element(z.begin(), z.end()) - z.begin()] = 1;
    } else {
      for (std::size_t j = 0; j < k; ++j) pred[j] = z[j] > 0.0;
    }
    for (auto c : labels.ids.at(r)) truth[static_cast<std::size_t>(c)] = 1;
    bool all = true;
    for (std::size_t j = 0; j < k; ++j) {
      tp += pred[j] && truth[j];
      fp += pred[j] && !truth[j];
      fn += !pred[j] && truth[j];
      all = all && pred[j] == truth[j];
    }
    exact += all;
  }
  Metrics m;
  const std::size_t denom = 2 * tp + fp + fn;
  m.micro_f1 = denom == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  m.accuracy = static_cast<double>(exact) / static_cast<double>(rows.size());
  return m;
}

Metrics predict_metrics(const GcnModel& model, const SparseMatrix& graph,
                        const DenseMatrix& features, const LabelTable& labels,
                        std::span<const Index> split, NormMode norm_mode) {
  if (split.empty()) throw InputError("predict_metrics: split is empty");
  const Propagation prop = make_propagation(model.variant, graph, norm_mode, model.lambda);
  const ForwardTrace trace = forward(model, prop, features, {});
  return score_logits(model.task, trace.logits, labels, split);
}

}  // namespace cgcn

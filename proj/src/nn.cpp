#include "mmroute/nn.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mmroute/error.hpp"

namespace mmroute {

double masked_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                  Eigen::MatrixXd* grad_pred) {
  const Eigen::ArrayXXd observed = (target.array() == target.array()).cast<double>();
  const double count = observed.sum();
  const Eigen::ArrayXXd diff = (pred.array() - target.array().isNaN().select(0.0, target.array())) *
                               observed;
  if (grad_pred) {
    *grad_pred = count > 0.0 ? Eigen::MatrixXd((2.0 / count) * diff)
                             : Eigen::MatrixXd::Zero(pred.rows(), pred.cols());
  }
  return count > 0.0 ? diff.square().sum() / count : 0.0;
}

// ---- Mlp ----------------------------------------------------------------------

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ConfigError("an MLP needs input and output sizes");
  for (auto s : sizes_)
    if (s == 0) throw ConfigError("MLP layer sizes must be positive");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
}

void Mlp::init(Rng& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t begin = weight_offset(l);
    const std::size_t end = bias_offset(l) + sizes_[l + 1];
    for (std::size_t k = begin; k < end; ++k)
      params_(static_cast<Eigen::Index>(k)) = rng.uniform(-bound, bound);
  }
}

Eigen::MatrixXd Mlp::forward_with(const Eigen::Ref<const Eigen::VectorXd>& p,
                                  const Eigen::MatrixXd& x, Trace* trace) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim())
    throw ValidationError("MLP input has " + std::to_string(x.cols()) + " features, expected " +
                          std::to_string(input_dim()));
  if (trace) {
    trace->inputs.clear();
    trace->pre.clear();
  }
  Eigen::MatrixXd a = x;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    const auto in = static_cast<Eigen::Index>(sizes_[l]);
    Eigen::Map<const Eigen::MatrixXd> w(p.data() + weight_offset(l), out, in);
    Eigen::Map<const Eigen::RowVectorXd> b(p.data() + bias_offset(l), out);
    Eigen::MatrixXd pre = a * w.transpose();
    pre.rowwise() += b;
    if (trace) trace->inputs.push_back(a);
    if (l + 1 < layers) {
      a = pre.cwiseMax(0.0);
      if (trace) trace->pre.push_back(std::move(pre));
    } else {
      if (trace) trace->pre.push_back(pre);
      a = std::move(pre);
    }
  }
  return a;
}

void Mlp::backward_with(const Eigen::Ref<const Eigen::VectorXd>& p, const Trace& trace,
                        const Eigen::MatrixXd& grad_out, Eigen::Ref<Eigen::VectorXd> grad) const {
  Eigen::MatrixXd g = grad_out;
  for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
    const auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    const auto in = static_cast<Eigen::Index>(sizes_[l]);
    Eigen::Map<Eigen::MatrixXd> dw(grad.data() + weight_offset(l), out, in);
    Eigen::Map<Eigen::RowVectorXd> db(grad.data() + bias_offset(l), out);
    dw.noalias() += g.transpose() * trace.inputs[l];
    db += g.colwise().sum();
    if (l > 0) {
      Eigen::Map<const Eigen::MatrixXd> w(p.data() + weight_offset(l), out, in);
      Eigen::MatrixXd prev = g * w;
      g = (trace.pre[l - 1].array() > 0.0).select(prev, 0.0);
    }
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  return forward_with(params_, x, nullptr);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Trace& trace) const {
  return forward_with(params_, x, &trace);
}

void Mlp::backward(const Trace& trace, const Eigen::MatrixXd& grad_out,
                   Eigen::Ref<Eigen::VectorXd> grad) const {
  backward_with(params_, trace, grad_out, grad);
}

double Mlp::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              Eigen::VectorXd& grad) const {
  Trace trace;
  const Eigen::MatrixXd pred = forward(x, trace);
  Eigen::MatrixXd grad_pred;
  const double loss = masked_mse(pred, y, &grad_pred);
  grad = Eigen::VectorXd::Zero(params_.size());
  backward(trace, grad_pred, grad);
  return loss;
}

// ---- LatentFactorNet -----------------------------------------------------------------

LatentFactorNet::LatentFactorNet(std::size_t input_dim, std::size_t hidden, std::size_t rank,
                                 std::size_t outputs)
    : features_({input_dim, hidden, rank}), rank_(rank), outputs_(outputs) {
  if (outputs == 0) throw ConfigError("latent factor network needs at least one output");
  params_ = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(features_.num_params() + outputs_ * rank_ + outputs_));
}

void LatentFactorNet::init(Rng& rng) {
  features_.init(rng);
  params_.head(static_cast<Eigen::Index>(features_.num_params())) = features_.params();
  const double bound = 1.0 / std::sqrt(static_cast<double>(rank_));
  for (std::size_t k = model_vector_offset(); k < model_bias_offset(); ++k)
    params_(static_cast<Eigen::Index>(k)) = rng.uniform(-bound, bound);
  params_.tail(static_cast<Eigen::Index>(outputs_)).setZero();
}

Eigen::MatrixXd LatentFactorNet::latent(const Eigen::MatrixXd& x) const {
  return features_.forward_with(params_.head(static_cast<Eigen::Index>(features_.num_params())),
                                x, nullptr);
}

Eigen::MatrixXd LatentFactorNet::forward(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd z = latent(x);
  Eigen::Map<const Eigen::MatrixXd> w(params_.data() + model_vector_offset(),
                                      static_cast<Eigen::Index>(outputs_),
                                      static_cast<Eigen::Index>(rank_));
  Eigen::Map<const Eigen::RowVectorXd> b(params_.data() + model_bias_offset(),
                                         static_cast<Eigen::Index>(outputs_));
  Eigen::MatrixXd pred = z * w.transpose();
  pred.rowwise() += b;
  return pred;
}

double LatentFactorNet::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                          Eigen::VectorXd& grad) const {
  const auto nf = static_cast<Eigen::Index>(features_.num_params());
  Mlp::Trace trace;
  const Eigen::MatrixXd z = features_.forward_with(params_.head(nf), x, &trace);
  Eigen::Map<const Eigen::MatrixXd> w(params_.data() + model_vector_offset(),
                                      static_cast<Eigen::Index>(outputs_),
                                      static_cast<Eigen::Index>(rank_));
  Eigen::Map<const Eigen::RowVectorXd> b(params_.data() + model_bias_offset(),
                                         static_cast<Eigen::Index>(outputs_));
  Eigen::MatrixXd pred = z * w.transpose();
  pred.rowwise() += b;

  Eigen::MatrixXd grad_pred;
  const double loss = masked_mse(pred, y, &grad_pred);

  grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::Map<Eigen::MatrixXd> dw(grad.data() + model_vector_offset(),
                                 static_cast<Eigen::Index>(outputs_),
                                 static_cast<Eigen::Index>(rank_));
  Eigen::Map<Eigen::RowVectorXd> db(grad.data() + model_bias_offset(),
                                    static_cast<Eigen::Index>(outputs_));
  dw = grad_pred.transpose() * z;
  db = grad_pred.colwise().sum();
  const Eigen::MatrixXd grad_latent = grad_pred * w;
  features_.backward_with(params_.head(nf), trace, grad_latent, grad.head(nf));
  return loss;
}

// ---- optimizer -------------------------------------------------------------------------

void Adam::reset(std::size_t n) {
  m_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  v_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  t_ = 0;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                const std::vector<bool>& frozen) {
  if (m_.size() != params.size()) reset(static_cast<std::size_t>(params.size()));
  ++t_;
  m_ = beta1 * m_ + (1.0 - beta1) * grad;
  v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    if (!frozen.empty() && frozen[static_cast<std::size_t>(k)]) continue;
    const double m_hat = m_(k) / c1;
    const double v_hat = v_(k) / c2;
    params(k) -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

TrainReport train_adam(Eigen::VectorXd& params, const LossFn& loss, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& y, const TrainOptions& options, Rng& rng,
                       const std::vector<bool>& frozen) {
  if (options.epochs == 0) throw ConfigError("training needs at least one epoch");
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");
  if (x.rows() != y.rows()) throw ValidationError("features and targets differ in rows");
  Adam adam;
  adam.learning_rate = options.learning_rate;
  adam.reset(static_cast<std::size_t>(params.size()));

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  TrainReport report;
  Eigen::VectorXd grad;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t end = std::min(n, start + options.batch_size);
      const auto rows = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(rows, x.cols());
      Eigen::MatrixXd yb(rows, y.cols());
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]);
        xb.row(r) = x.row(src);
        yb.row(r) = y.row(src);
      }
      if ((yb.array() == yb.array()).count() == 0) continue;
      const double value = loss(xb, yb, grad);
      if (!std::isfinite(value) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch " << batches
            << " (loss " << value << ", learning rate " << options.learning_rate << ")";
        throw RuntimeError(msg.str());
      }
      adam.step(params, grad, frozen);
      total += value;
      ++batches;
    }
    report.epoch_loss.push_back(batches ? total / static_cast<double>(batches) : 0.0);
  }
  return report;
}

}  // namespace mmroute

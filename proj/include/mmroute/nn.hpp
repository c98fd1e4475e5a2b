#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "mmroute/rng.hpp"

namespace mmroute {

// Small dense networks trained on an observed-entry MSE. Parameters live in
// one flat vector so the optimizer, the finite-difference checks, and the
// router blobs all see the same layout.

// Mean of squared errors over the non-NaN entries of `target`, and its
// gradient with respect to `pred` (zero on unobserved entries). Returns 0
// with a zero gradient when nothing is observed.
double masked_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target,
                  Eigen::MatrixXd* grad_pred);

/// Fully connected ReLU network: Linear (ReLU Linear)*. Rows of the input
/// are samples. Layer l stores its out x in weight matrix (column-major)
/// followed by its bias in the flat parameter vector.
class Mlp {
public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init(Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  // Forward pass keeping activations, then backpropagation of `grad_out`
  // (dL/d output). Parameter gradients are accumulated into `grad`.
  struct Trace {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer (post-ReLU)
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of each layer
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Trace& trace) const;
  void backward(const Trace& trace, const Eigen::MatrixXd& grad_out,
                Eigen::Ref<Eigen::VectorXd> grad) const;

  // Same passes with an external parameter vector of this architecture.
  Eigen::MatrixXd forward_with(const Eigen::Ref<const Eigen::VectorXd>& p,
                               const Eigen::MatrixXd& x, Trace* trace) const;
  void backward_with(const Eigen::Ref<const Eigen::VectorXd>& p, const Trace& trace,
                     const Eigen::MatrixXd& grad_out, Eigen::Ref<Eigen::VectorXd> grad) const;

  // Observed-entry MSE of forward(x) against y; fills the gradient.
  double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           Eigen::VectorXd& grad) const;

private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer + 1] * sizes_[layer];
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd params_;
};

/// Matrix-factorization network: a one-hidden-layer ReLU feature network
/// maps an instance to a latent r-vector; each output (model) j has a
/// latent vector w_j and bias b_j, and predicts latent . w_j + b_j.
/// Flat layout: feature-network parameters, then W (K x r, column-major),
/// then b (K).
class LatentFactorNet {
public:
  LatentFactorNet() = default;
  LatentFactorNet(std::size_t input_dim, std::size_t hidden, std::size_t rank,
                  std::size_t outputs);

  void init(Rng& rng);

  std::size_t input_dim() const { return features_.input_dim(); }
  std::size_t hidden_dim() const { return features_.layer_sizes()[1]; }
  std::size_t rank() const { return rank_; }
  std::size_t outputs() const { return outputs_; }
  std::size_t num_params() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  Eigen::MatrixXd latent(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           Eigen::VectorXd& grad) const;

  // Offsets of model j's latent vector entries and bias in the flat vector.
  std::size_t model_vector_offset() const { return features_.num_params(); }
  std::size_t model_bias_offset() const { return features_.num_params() + outputs_ * rank_; }

private:
  Mlp features_;  // architecture only; its weights live in params_
  std::size_t rank_ = 0;
  std::size_t outputs_ = 0;
  Eigen::VectorXd params_;
};

/// Adaptive-moment optimizer on a flat parameter vector.
struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void reset(std::size_t n);
  // `frozen`, when non-empty, marks parameters that never move.
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
            const std::vector<bool>& frozen = {});

private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long long t_ = 0;
};

struct TrainOptions {
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// Loss and gradient of the model whose parameters `train_adam` updates.
using LossFn = std::function<double(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                    Eigen::VectorXd& grad)>;

// Mini-batch Adam over rows shuffled each epoch by `rng`. Throws
// RuntimeError with the epoch and batch when the loss turns non-finite.
TrainReport train_adam(Eigen::VectorXd& params, const LossFn& loss, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& y, const TrainOptions& options, Rng& rng,
                       const std::vector<bool>& frozen = {});

}  // namespace mmroute

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace adascope {

// Two-hidden-layer tanh MLP predicting forward noise from
// (x_t, sinusoidal time embedding, learned prompt embedding).
//
// Every parameter lives in one flat arena so the optimizer, checkpoints and
// finite-difference audits address scalars uniformly. Layout:
// W1 | b1 | W2 | b2 | W3 | b3 | prompt embedding table (row per prompt).
class DenoiserModel {
 public:
  struct Dims {
    int x_dim = 2;
    int num_prompts = 4;
    int hidden = 64;
    int time_dim = 16;  // even
    int prompt_dim = 8;

    int input_dim() const { return x_dim + time_dim + prompt_dim; }
  };

  DenoiserModel(const Dims& dims, std::uint64_t seed);

  const Dims& dims() const { return dims_; }
  int param_count() const { return static_cast<int>(params_.size()); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  Eigen::VectorXd predict(const Eigen::VectorXd& x, int t, int z) const;

  struct Cache {
    int z = 0;
    Eigen::VectorXd input;
    Eigen::VectorXd h1, h2;  // post-tanh activations
    Eigen::VectorXd out;
  };
  Cache forward(const Eigen::VectorXd& x, int t, int z) const;

  // Accumulates dL/dparams into grad (arena layout) given dL/dout.
  void backward(const Cache& cache, const Eigen::VectorXd& d_out,
                std::vector<double>& grad) const;

  Eigen::VectorXd time_embedding(int t) const;

 private:
  Dims dims_;
  std::vector<double> params_;
  // arena offsets
  int w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, w3_ = 0, b3_ = 0, emb_ = 0;
};

// Adam with bias correction.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long step_count_ = 0;
};

}  // namespace adascope

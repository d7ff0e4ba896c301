#include "adascope/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "adascope/errors.hpp"
#include "adascope/rng.hpp"

namespace adascope {

namespace {

using MatMap = Eigen::Map<Eigen::MatrixXd>;
using CMatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

}  // namespace

DenoiserModel::DenoiserModel(const Dims& dims, std::uint64_t seed) : dims_(dims) {
  if (dims.x_dim < 1 || dims.num_prompts < 1 || dims.hidden < 1 || dims.prompt_dim < 1)
    throw ConfigError("DenoiserModel: all dimensions must be positive");
  if (dims.time_dim < 2 || dims.time_dim % 2 != 0)
    throw ConfigError("DenoiserModel: time_dim must be even and >= 2");
  const int in = dims.input_dim(), h = dims.hidden, out = dims.x_dim;
  w1_ = 0;
  b1_ = w1_ + h * in;
  w2_ = b1_ + h;
  b2_ = w2_ + h * h;
  w3_ = b2_ + h;
  b3_ = w3_ + out * h;
  emb_ = b3_ + out;
  params_.assign(emb_ + dims.num_prompts * dims.prompt_dim, 0.0);

  Rng rng(derive_seed(seed, "model-init"));
  auto fill = [&](int off, int n, double scale) {
    for (int i = 0; i < n; ++i) params_[off + i] = scale * rng.normal();
  };
  fill(w1_, h * in, 1.0 / std::sqrt(static_cast<double>(in)));
  fill(w2_, h * h, 1.0 / std::sqrt(static_cast<double>(h)));
  fill(w3_, out * h, 1.0 / std::sqrt(static_cast<double>(h)));
  fill(emb_, dims.num_prompts * dims.prompt_dim, 1.0);
}

Eigen::VectorXd DenoiserModel::time_embedding(int t) const {
  const int d = dims_.time_dim;
  Eigen::VectorXd e(d);
  for (int p = 0; p < d / 2; ++p) {
    const double freq = std::pow(10000.0, -2.0 * p / d);
    e[2 * p] = std::sin(t * freq);
    e[2 * p + 1] = std::cos(t * freq);
  }
  return e;
}

DenoiserModel::Cache DenoiserModel::forward(const Eigen::VectorXd& x, int t, int z) const {
  if (x.size() != dims_.x_dim) throw std::invalid_argument("DenoiserModel: x dimension mismatch");
  if (z < 0 || z >= dims_.num_prompts)
    throw std::out_of_range("DenoiserModel: prompt " + std::to_string(z) + " outside [0, " +
                            std::to_string(dims_.num_prompts) + ")");
  const int in = dims_.input_dim(), h = dims_.hidden, out = dims_.x_dim;
  Cache c;
  c.z = z;
  c.input.resize(in);
  c.input.head(dims_.x_dim) = x;
  c.input.segment(dims_.x_dim, dims_.time_dim) = time_embedding(t);
  c.input.tail(dims_.prompt_dim) =
      CVecMap(params_.data() + emb_ + z * dims_.prompt_dim, dims_.prompt_dim);

  CMatMap W1(params_.data() + w1_, h, in);
  CVecMap B1(params_.data() + b1_, h);
  CMatMap W2(params_.data() + w2_, h, h);
  CVecMap B2(params_.data() + b2_, h);
  CMatMap W3(params_.data() + w3_, out, h);
  CVecMap B3(params_.data() + b3_, out);

  c.h1 = (W1 * c.input + B1).array().tanh();
  c.h2 = (W2 * c.h1 + B2).array().tanh();
  c.out = W3 * c.h2 + B3;
  return c;
}

Eigen::VectorXd DenoiserModel::predict(const Eigen::VectorXd& x, int t, int z) const {
  return forward(x, t, z).out;
}

void DenoiserModel::backward(const Cache& c, const Eigen::VectorXd& d_out,
                             std::vector<double>& grad) const {
  if (static_cast<int>(grad.size()) != param_count())
    throw std::invalid_argument("DenoiserModel: gradient arena size mismatch");
  const int in = dims_.input_dim(), h = dims_.hidden, out = dims_.x_dim;

  CMatMap W2(params_.data() + w2_, h, h);
  CMatMap W3(params_.data() + w3_, out, h);

  MatMap dW1(grad.data() + w1_, h, in);
  VecMap dB1(grad.data() + b1_, h);
  MatMap dW2(grad.data() + w2_, h, h);
  VecMap dB2(grad.data() + b2_, h);
  MatMap dW3(grad.data() + w3_, out, h);
  VecMap dB3(grad.data() + b3_, out);
  VecMap dEmb(grad.data() + emb_ + c.z * dims_.prompt_dim, dims_.prompt_dim);

  dW3.noalias() += d_out * c.h2.transpose();
  dB3 += d_out;
  const Eigen::VectorXd da2 =
      (W3.transpose() * d_out).cwiseProduct((1.0 - c.h2.array().square()).matrix());
  dW2.noalias() += da2 * c.h1.transpose();
  dB2 += da2;
  const Eigen::VectorXd da1 =
      (W2.transpose() * da2).cwiseProduct((1.0 - c.h1.array().square()).matrix());
  dW1.noalias() += da1 * c.input.transpose();
  dB1 += da1;
  CMatMap W1(params_.data() + w1_, h, in);
  dEmb += (W1.transpose() * da1).tail(dims_.prompt_dim);
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != grad.size()) throw std::invalid_argument("Adam: size mismatch");
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++step_count_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace adascope

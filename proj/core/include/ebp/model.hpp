#pragma once
#include <string>
#include <unordered_map>
#include <vector>

#include "ebp/rng.hpp"
#include "ebp/tensor.hpp"

namespace ebp {

// Ordered named parameter store. Values are immutable tensors replaced on
// update; `m`/`v` are Adam moment slots. Non-trainable entries carry auxiliary
// state (spectral-norm power vectors) that is checkpointed but never stepped.
class ParamBag {
 public:
  struct Entry {
    std::string name;
    nd::Tensor value;
    bool trainable = true;
    nd::Tensor m, v;  // empty until the optimizer touches them
  };

  nd::Tensor& declare(const std::string& name, nd::Tensor init, bool trainable = true);
  nd::Tensor& at(const std::string& name);
  const nd::Tensor& at(const std::string& name) const;
  bool has(const std::string& name) const;
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Name -> tensor views of one or more bags, either leafed onto a tape
// (differentiable) or raw constants (evaluation only).
class Bound {
 public:
  const nd::Tensor& operator[](const std::string& name) const;
  void put(const std::string& name, nd::Tensor t);

 private:
  std::unordered_map<std::string, nd::Tensor> map_;
};

Bound bind(nd::Tape& tape, const ParamBag& bag);
Bound bind_const(const ParamBag& bag);
void bind_into(Bound& b, nd::Tape* tape, const ParamBag& bag);

// q(theta | x_{1:n}) = N(mean, sigma^2 I); sigma is rank-0 or a diagonal vector.
struct PosteriorGaussian {
  nd::Tensor mean;
  nd::Tensor sigma;

  // reparameterized draw mean + sigma * xi, xi ~ N(0, I)
  nd::Tensor sample(Rng& rng) const;
};

// Closed-form KL(N(mu, sigma^2 I) || N(0, I)); throws on nonpositive sigma.
nd::Tensor kl_to_standard_normal(const PosteriorGaussian& q);

// One power-iteration step for the top singular value of W (rows x cols):
// v <- normalize(W^T u), u <- normalize(W v); returns the estimate u^T W v.
double spectral_power_step(const nd::Tensor& w, std::vector<double>& u, std::vector<double>& v);

// Scalar-output MLP energy f(x [, t]; theta) with hidden widths {128, 64, 1},
// ReLU activations, input = concat(x, [t,] theta) per element. With spectral
// normalization enabled each weight matrix is divided by its current
// power-iteration singular-value estimate.
class EnergyNet {
 public:
  EnergyNet(std::string prefix, int x_dim, int t_dim, int theta_dim,
            bool spectral_norm, Rng init_rng);

  // X: (n, x_dim); theta: (theta_dim); T: (n, t_dim) when t_dim > 0.
  // Returns per-element energies as (n, 1).
  nd::Tensor element_energies(const Bound& p, const nd::Tensor& x,
                              const nd::Tensor& theta,
                              const nd::Tensor* t = nullptr) const;

  void spectral_power_iteration();  // one step per weight matrix, in place

  ParamBag& params() { return bag_; }
  const ParamBag& params() const { return bag_; }
  int x_dim() const { return x_dim_; }
  int t_dim() const { return t_dim_; }
  int theta_dim() const { return theta_dim_; }
  bool spectral_norm() const { return spectral_norm_; }

 private:
  nd::Tensor effective_weight(const Bound& p, int layer) const;

  std::string prefix_;
  int x_dim_, t_dim_, theta_dim_;
  bool spectral_norm_;
  ParamBag bag_;
};

// (1/n) sum_i f(x_i [, t_i]; theta), accumulated in canonical order so the
// value is bitwise invariant under element permutations.
nd::Tensor set_energy(const EnergyNet& net, const Bound& p, const nd::Tensor& x,
                      const nd::Tensor& theta, const nd::Tensor* t = nullptr);

// DeepSets posterior encoder: per-element map widths {128, 256} with ReLU,
// max pooling over elements, linear head for the mean, one learnable scalar
// log-stddev (sigma initialized to 0.1).
class SetEncoder {
 public:
  SetEncoder(std::string prefix, int in_dim, int theta_dim, Rng init_rng);

  PosteriorGaussian encode(const Bound& p, const nd::Tensor& x) const;

  ParamBag& params() { return bag_; }
  const ParamBag& params() const { return bag_; }
  int in_dim() const { return in_dim_; }
  int theta_dim() const { return theta_dim_; }

 private:
  std::string prefix_;
  int in_dim_, theta_dim_;
  ParamBag bag_;
};

// Fully collapsed, latent-free set energy sum_i f(x_i; sum_j phi(x_j)) with
// phi widths {128, 256} and f widths {128, 64, 1}; sum pooling in canonical
// accumulation order.
class CollapsedSetEnergy {
 public:
  CollapsedSetEnergy(std::string prefix, int x_dim, bool spectral_norm, Rng init_rng);

  nd::Tensor set_energy(const Bound& p, const nd::Tensor& x) const;

  void spectral_power_iteration();

  ParamBag& params() { return bag_; }
  const ParamBag& params() const { return bag_; }

 private:
  std::string prefix_;
  int x_dim_;
  bool spectral_norm_;
  ParamBag bag_;
};

// affine layer helper: X (n,p) * W (p,q) + b (q)
nd::Tensor affine(const nd::Tensor& x, const nd::Tensor& w, const nd::Tensor& b);

}  // namespace ebp

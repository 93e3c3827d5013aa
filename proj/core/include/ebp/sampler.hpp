#pragma once
#include <functional>
#include <string>
#include <vector>

#include "ebp/model.hpp"
#include "ebp/rng.hpp"
#include "ebp/tensor.hpp"

namespace ebp {

enum class DynamicsMode { kLangevin, kHamiltonian };

struct DynamicsConfig {
  int steps = 20;
  DynamicsMode mode = DynamicsMode::kLangevin;
  double noise_std = 0.05;   // Langevin xi standard deviation; <= 0 draws no noise
  double grad_clip = 0.1;    // elementwise bound on grad_x f; <= 0 disables
  bool detach_inner_grad = false;  // first-order fallback: stop gradients through grad_x f
};

// Per-element energies for the current x: (n, d) -> (n, 1). Model weights and
// theta live in the closure.
using EnergyFn = std::function<nd::Tensor(const nd::Tensor&)>;

struct SamplerState {
  nd::Tensor x, v;               // (n, d)
  nd::Tensor log_q0;             // rank-0 log density of the initial (x0, v0) draw
  nd::Tensor noise_log_density;  // rank-0 accumulated log density of Langevin noises
  nd::Tensor init_mean, init_log_std;  // (n, d) parameters behind the x0 draw
};

// grad_x of the summed element energies, optionally clipped; throws
// NumericalError if the result is non-finite after clipping.
nd::Tensor energy_grad(const EnergyFn& f, const nd::Tensor& x, const DynamicsConfig& cfg);

// v' = xi + (eta/2) grad f(x), x' = x + v'
SamplerState langevin_layer(const SamplerState& s, const EnergyFn& f,
                            const nd::Tensor& eta, const DynamicsConfig& cfg, Rng& rng);

// v½ = v + (eta/2) grad f(x); x' = x + eta v½; v' = v½ + (eta/2) grad f(x');
// volume preserving, so densities are carried unchanged
SamplerState leapfrog_layer(const SamplerState& s, const EnergyFn& f,
                            const nd::Tensor& eta, const DynamicsConfig& cfg);

// -mean(log_q0 + noise_log_density) over a batch of states
nd::Tensor entropy_term(const std::vector<SamplerState>& batch);

// Dual sampler q(x_{1:n}, v | theta): a block-autoregressive Gaussian initial
// distribution (recurrent cell emits mean and diagonal log-std of the next
// block_size elements, conditioned on theta) refined by unrolled dynamics
// layers with a learnable step size eta = exp(log_eta).
class DynamicsSampler {
 public:
  DynamicsSampler(std::string prefix, int dim, int theta_dim, int block_size,
                  int hidden, double eta_init, Rng init_rng);

  // Draws x0 block-autoregressively and v0 ~ N(0, I); log_q0 holds the exact
  // diagonal-Gaussian log density of the draw (x0 and v0 together).
  SamplerState init_sample(const Bound& p, const nd::Tensor& theta, int n, Rng& rng) const;

  nd::Tensor eta(const Bound& p) const;

  // init_sample composed with cfg.steps dynamics layers. Differentiable
  // w.r.t. the generator weights, log_eta and the energy weights, including
  // through grad_x f unless cfg.detach_inner_grad is set.
  SamplerState run_dynamics(nd::Tape& tape, const Bound& p, const EnergyFn& f,
                            const nd::Tensor& theta, int n, const DynamicsConfig& cfg,
                            Rng& rng) const;

  ParamBag& params() { return bag_; }
  const ParamBag& params() const { return bag_; }
  int block_size() const { return block_; }
  int dim() const { return dim_; }
  int theta_dim() const { return theta_dim_; }

 private:
  std::string prefix_;
  int dim_, theta_dim_, block_, hidden_;
  ParamBag bag_;
};

}  // namespace ebp

#include "ebp/sampler.hpp"

#include <cmath>

#include "ebp/errors.hpp"

namespace ebp {

using nd::Tensor;

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Tensor gauss_noise(Rng& rng, std::int64_t n, std::int64_t d, double std) {
  std::vector<double> v(static_cast<std::size_t>(n * d));
  for (auto& x : v) x = std * rng.normal();
  return nd::constant({n, d}, std::move(v));
}

// log N(xi; 0, std^2 I) summed over all entries, as a constant scalar
Tensor iso_gauss_logpdf(const Tensor& xi, double std) {
  const double n = static_cast<double>(xi.size());
  double quad = 0.0;
  for (double x : xi.values()) quad += x * x;
  const double lp = -0.5 * n * kLog2Pi - n * std::log(std) - 0.5 * quad / (std * std);
  return nd::scalar_tensor(lp);
}

}  // namespace

Tensor energy_grad(const EnergyFn& f, const Tensor& x, const DynamicsConfig& cfg) {
  if (!x.on_tape()) throw UsageError("energy_grad: state must live on a tape");
  Tensor e = f(x);
  Tensor g = x.tape->grad(nd::sum(e), {x}, /*create_graph=*/!cfg.detach_inner_grad)[0];
  if (cfg.grad_clip > 0.0) g = nd::clamp(g, -cfg.grad_clip, cfg.grad_clip);
  g.check_finite("dynamics: grad_x f");
  return g;
}

SamplerState langevin_layer(const SamplerState& s, const EnergyFn& f,
                            const Tensor& eta, const DynamicsConfig& cfg, Rng& rng) {
  Tensor g = energy_grad(f, s.x, cfg);
  Tensor half_eta = nd::scale(nd::reshape(eta, {}), 0.5);
  SamplerState out = s;
  Tensor drift = nd::smul(half_eta, g);
  if (cfg.noise_std > 0.0) {
    Tensor xi = gauss_noise(rng, s.x.shape[0], s.x.shape[1], cfg.noise_std);
    out.v = nd::add(xi, drift);
    out.noise_log_density = nd::add(s.noise_log_density, iso_gauss_logpdf(xi, cfg.noise_std));
  } else {
    out.v = drift;  // degenerate noise: density not tracked
  }
  out.x = nd::add(s.x, out.v);
  return out;
}

SamplerState leapfrog_layer(const SamplerState& s, const EnergyFn& f,
                            const Tensor& eta, const DynamicsConfig& cfg) {
  Tensor eta0 = nd::reshape(eta, {});
  Tensor half_eta = nd::scale(eta0, 0.5);
  Tensor v_half = nd::add(s.v, nd::smul(half_eta, energy_grad(f, s.x, cfg)));
  SamplerState out = s;
  out.x = nd::add(s.x, nd::smul(eta0, v_half));
  out.v = nd::add(v_half, nd::smul(half_eta, energy_grad(f, out.x, cfg)));
  return out;
}

Tensor entropy_term(const std::vector<SamplerState>& batch) {
  if (batch.empty()) throw UsageError("entropy_term: empty batch");
  Tensor acc;
  bool first = true;
  for (const auto& s : batch) {
    Tensor term = nd::add(s.log_q0, s.noise_log_density);
    acc = first ? term : nd::add(acc, term);
    first = false;
  }
  return nd::scale(acc, -1.0 / static_cast<double>(batch.size()));
}

DynamicsSampler::DynamicsSampler(std::string prefix, int dim, int theta_dim,
                                 int block_size, int hidden, double eta_init, Rng init_rng)
    : prefix_(std::move(prefix)), dim_(dim), theta_dim_(theta_dim),
      block_(block_size), hidden_(hidden) {
  if (dim_ <= 0 || block_ <= 0 || hidden_ <= 0)
    throw UsageError("DynamicsSampler: dimensions must be positive");
  const std::int64_t kd = static_cast<std::int64_t>(block_) * dim_;
  const std::int64_t in = kd + theta_dim_;
  const double s_in = std::sqrt(1.0 / static_cast<double>(in));
  const double s_h = std::sqrt(1.0 / static_cast<double>(hidden_));

  auto randn = [&](std::int64_t r, std::int64_t c, double scale) {
    std::vector<double> w(static_cast<std::size_t>(r * c));
    for (auto& x : w) x = scale * init_rng.normal();
    return nd::constant({r, c}, std::move(w));
  };

  bag_.declare(prefix_ + ".w_in", randn(in, hidden_, s_in));
  bag_.declare(prefix_ + ".w_h", randn(hidden_, hidden_, s_h));
  bag_.declare(prefix_ + ".b_h", nd::zeros({hidden_}));
  // zero heads: the initial distribution starts at exactly N(0, I)
  bag_.declare(prefix_ + ".w_mu", nd::zeros({hidden_, kd}));
  bag_.declare(prefix_ + ".b_mu", nd::zeros({kd}));
  bag_.declare(prefix_ + ".w_ls", nd::zeros({hidden_, kd}));
  bag_.declare(prefix_ + ".b_ls", nd::zeros({kd}));
  bag_.declare(prefix_ + ".log_eta", nd::scalar_tensor(std::log(eta_init)));
}

Tensor DynamicsSampler::eta(const Bound& p) const {
  return nd::exp_(p[prefix_ + ".log_eta"]);
}

SamplerState DynamicsSampler::init_sample(const Bound& p, const Tensor& theta,
                                          int n, Rng& rng) const {
  if (n <= 0) throw UsageError("init_sample: n must be positive");
  if (theta_dim_ > 0 && theta.size() != theta_dim_)
    throw UsageError("init_sample: theta dimension mismatch");

  const std::int64_t kd = static_cast<std::int64_t>(block_) * dim_;
  const int blocks = (n + block_ - 1) / block_;

  Tensor theta_row;
  if (theta_dim_ > 0)
    theta_row = nd::reshape(theta, {1, static_cast<std::int64_t>(theta_dim_)});

  Tensor h;  // (1, hidden)
  Tensor prev = nd::zeros({1, kd});
  Tensor x, mu_all, ls_all;
  Tensor log_x = nd::scalar_tensor(0.0);

  for (int bidx = 0; bidx < blocks; ++bidx) {
    Tensor inp = theta_dim_ > 0 ? nd::concat_cols(prev, theta_row) : prev;
    Tensor pre = affine(inp, p[prefix_ + ".w_in"], p[prefix_ + ".b_h"]);
    if (bidx > 0) pre = nd::add(pre, nd::matmul(h, p[prefix_ + ".w_h"]));
    h = nd::tanh_(pre);

    Tensor mu = affine(h, p[prefix_ + ".w_mu"], p[prefix_ + ".b_mu"]);
    Tensor ls = affine(h, p[prefix_ + ".w_ls"], p[prefix_ + ".b_ls"]);

    const int remain = n - bidx * block_;
    const std::int64_t take = static_cast<std::int64_t>(std::min(remain, block_)) * dim_;
    Tensor mu_t = take == kd ? mu : nd::slice_cols(mu, 0, take);
    Tensor ls_t = take == kd ? ls : nd::slice_cols(ls, 0, take);

    Tensor eps = nd::constant({1, take}, rng.normals(static_cast<std::size_t>(take)));
    Tensor xb = nd::add(mu_t, nd::mul(nd::exp_(ls_t), eps));

    // exact diagonal-Gaussian log density evaluated at the sample
    Tensor diff = nd::sub(xb, mu_t);
    Tensor quad = nd::sum(nd::mul(nd::square(diff), nd::exp_(nd::scale(ls_t, -2.0))));
    Tensor contrib = nd::shift(nd::sub(nd::scale(nd::sum(ls_t), -1.0), nd::scale(quad, 0.5)),
                               -0.5 * kLog2Pi * static_cast<double>(take));
    log_x = nd::add(log_x, contrib);

    x = bidx == 0 ? xb : nd::concat_cols(x, xb);
    mu_all = bidx == 0 ? mu_t : nd::concat_cols(mu_all, mu_t);
    ls_all = bidx == 0 ? ls_t : nd::concat_cols(ls_all, ls_t);

    if (bidx + 1 < blocks) prev = xb;  // full blocks feed the recurrence
  }

  SamplerState s;
  s.x = nd::reshape(x, {n, dim_});
  s.init_mean = nd::reshape(mu_all, {n, dim_});
  s.init_log_std = nd::reshape(ls_all, {n, dim_});
  s.v = gauss_noise(rng, n, dim_, 1.0);
  s.log_q0 = nd::add(log_x, iso_gauss_logpdf(s.v, 1.0));
  s.noise_log_density = nd::scalar_tensor(0.0);
  return s;
}

SamplerState DynamicsSampler::run_dynamics(nd::Tape& tape, const Bound& p, const EnergyFn& f,
                                           const Tensor& theta, int n,
                                           const DynamicsConfig& cfg, Rng& rng) const {
  SamplerState s = init_sample(p, theta, n, rng);
  if (!s.x.on_tape()) s.x = tape.leaf(s.x);
  if (cfg.steps == 0) return s;
  Tensor step = eta(p);
  for (int t = 0; t < cfg.steps; ++t) {
    s = cfg.mode == DynamicsMode::kLangevin
            ? langevin_layer(s, f, step, cfg, rng)
            : leapfrog_layer(s, f, step, cfg);
  }
  return s;
}

}  // namespace ebp

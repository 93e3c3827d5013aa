#include "ebp/model.hpp"

#include <cmath>

#include "ebp/errors.hpp"

namespace ebp {

using nd::Tensor;

// ---- ParamBag / Bound ---------------------------------------------------------

Tensor& ParamBag::declare(const std::string& name, Tensor init, bool trainable) {
  if (index_.count(name)) throw UsageError("ParamBag: duplicate parameter " + name);
  index_[name] = entries_.size();
  entries_.push_back(Entry{name, std::move(init), trainable, Tensor{}, Tensor{}});
  return entries_.back().value;
}

Tensor& ParamBag::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw UsageError("ParamBag: unknown parameter " + name);
  return entries_[it->second].value;
}

const Tensor& ParamBag::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UsageError("ParamBag: unknown parameter " + name);
  return entries_[it->second].value;
}

bool ParamBag::has(const std::string& name) const { return index_.count(name) > 0; }

const Tensor& Bound::operator[](const std::string& name) const {
  auto it = map_.find(name);
  if (it == map_.end()) throw UsageError("Bound: unknown parameter " + name);
  return it->second;
}

void Bound::put(const std::string& name, Tensor t) { map_[name] = std::move(t); }

void bind_into(Bound& b, nd::Tape* tape, const ParamBag& bag) {
  for (const auto& e : bag.entries()) {
    // aux state stays constant; trainable values become differentiable leaves
    if (tape != nullptr && e.trainable) b.put(e.name, tape->leaf(e.value));
    else b.put(e.name, e.value);
  }
}

Bound bind(nd::Tape& tape, const ParamBag& bag) {
  Bound b;
  bind_into(b, &tape, bag);
  return b;
}

Bound bind_const(const ParamBag& bag) {
  Bound b;
  bind_into(b, nullptr, bag);
  return b;
}

// ---- posterior ----------------------------------------------------------------

Tensor PosteriorGaussian::sample(Rng& rng) const {
  const auto d = mean.size();
  Tensor xi = nd::constant(mean.shape, rng.normals(static_cast<std::size_t>(d)));
  if (sigma.size() == 1) return nd::add(mean, nd::smul(nd::reshape(sigma, {}), xi));
  return nd::add(mean, nd::mul(sigma, xi));
}

Tensor kl_to_standard_normal(const PosteriorGaussian& q) {
  for (double s : q.sigma.values())
    if (!(s > 0.0)) throw NumericalError("kl_to_standard_normal: nonpositive sigma");
  const double d = static_cast<double>(q.mean.size());
  Tensor mu2 = nd::sum(nd::square(q.mean));
  if (q.sigma.size() == 1) {
    Tensor s2 = nd::reshape(nd::square(q.sigma), {});
    // d * (sigma^2 - 1 - ln sigma^2)
    Tensor per = nd::sub(nd::shift(s2, -1.0), nd::log_(s2));
    return nd::scale(nd::add(mu2, nd::scale(per, d)), 0.5);
  }
  Tensor s2 = nd::square(q.sigma);
  Tensor per = nd::sum(nd::sub(nd::shift(s2, -1.0), nd::log_(s2)));
  return nd::scale(nd::add(mu2, per), 0.5);
}

// ---- spectral normalization -----------------------------------------------------

double spectral_power_step(const Tensor& w, std::vector<double>& u, std::vector<double>& v) {
  if (w.rank() != 2) throw UsageError("spectral_power_step: rank-2 weight required");
  const std::int64_t rows = w.shape[0], cols = w.shape[1];
  if (static_cast<std::int64_t>(u.size()) != rows || static_cast<std::int64_t>(v.size()) != cols)
    throw UsageError("spectral_power_step: u/v dimensions disagree with W");
  const auto& wd = w.values();

  // v <- normalize(W^T u)
  for (std::int64_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < rows; ++i) acc += wd[static_cast<std::size_t>(i * cols + j)] * u[static_cast<std::size_t>(i)];
    v[static_cast<std::size_t>(j)] = acc;
  }
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  if (nv > 0.0)
    for (double& x : v) x /= nv;

  // u <- normalize(W v)
  for (std::int64_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) acc += wd[static_cast<std::size_t>(i * cols + j)] * v[static_cast<std::size_t>(j)];
    u[static_cast<std::size_t>(i)] = acc;
  }
  double nu = 0.0;
  for (double x : u) nu += x * x;
  nu = std::sqrt(nu);
  if (nu > 0.0)
    for (double& x : u) x /= nu;

  // sigma = u^T W v
  double sigma = 0.0;
  for (std::int64_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < cols; ++j) acc += wd[static_cast<std::size_t>(i * cols + j)] * v[static_cast<std::size_t>(j)];
    sigma += u[static_cast<std::size_t>(i)] * acc;
  }
  return sigma;
}

namespace {

Tensor he_init(Rng& rng, std::int64_t fan_in, std::int64_t fan_out) {
  const double s = std::sqrt(2.0 / static_cast<double>(fan_in));
  std::vector<double> w(static_cast<std::size_t>(fan_in * fan_out));
  for (auto& x : w) x = s * rng.normal();
  return nd::constant({fan_in, fan_out}, std::move(w));
}

std::vector<double> unit_vec(Rng& rng, std::int64_t n) {
  std::vector<double> u(static_cast<std::size_t>(n));
  double norm = 0.0;
  for (auto& x : u) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : u) x /= norm;
  return u;
}

void declare_mlp(ParamBag& bag, const std::string& prefix, Rng& rng,
                 const std::vector<std::int64_t>& dims, bool spectral_norm) {
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::string id = std::to_string(l + 1);
    bag.declare(prefix + ".w" + id, he_init(rng, dims[l], dims[l + 1]));
    bag.declare(prefix + ".b" + id, nd::zeros({dims[l + 1]}));
    if (spectral_norm) {
      bag.declare(prefix + ".u" + id, nd::constant({dims[l]}, unit_vec(rng, dims[l])), false);
      bag.declare(prefix + ".v" + id, nd::constant({dims[l + 1]}, unit_vec(rng, dims[l + 1])), false);
    }
  }
}

// W / (u^T W v) with u, v held constant; gradients flow through both W terms
Tensor sn_weight(const Bound& p, const std::string& prefix, int layer) {
  const std::string id = std::to_string(layer);
  const Tensor& w = p[prefix + ".w" + id];
  const Tensor& u = p[prefix + ".u" + id];
  const Tensor& v = p[prefix + ".v" + id];
  Tensor u_row = nd::reshape(u.detach(), {1, u.shape[0]});
  Tensor v_col = nd::reshape(v.detach(), {v.shape[0], 1});
  Tensor sigma = nd::reshape(nd::matmul(nd::matmul(u_row, w), v_col), {});
  return nd::smul(nd::div(nd::scalar_tensor(1.0), sigma), w);
}

void power_iterate_mlp(ParamBag& bag, const std::string& prefix, int layers) {
  for (int l = 1; l <= layers; ++l) {
    const std::string id = std::to_string(l);
    const Tensor& w = bag.at(prefix + ".w" + id);
    std::vector<double> u = bag.at(prefix + ".u" + id).values();
    std::vector<double> v = bag.at(prefix + ".v" + id).values();
    spectral_power_step(w, u, v);
    bag.at(prefix + ".u" + id) = nd::constant({w.shape[0]}, std::move(u));
    bag.at(prefix + ".v" + id) = nd::constant({w.shape[1]}, std::move(v));
  }
}

Tensor mlp_weight(const Bound& p, const std::string& prefix, int layer, bool spectral_norm) {
  if (spectral_norm) return sn_weight(p, prefix, layer);
  return p[prefix + ".w" + std::to_string(layer)];
}

}  // namespace

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  return nd::add(nd::matmul(x, w), nd::broadcast_rows(b, x.shape[0]));
}

// ---- EnergyNet ------------------------------------------------------------------

EnergyNet::EnergyNet(std::string prefix, int x_dim, int t_dim, int theta_dim,
                     bool spectral_norm, Rng init_rng)
    : prefix_(std::move(prefix)), x_dim_(x_dim), t_dim_(t_dim),
      theta_dim_(theta_dim), spectral_norm_(spectral_norm) {
  const std::int64_t in = x_dim_ + t_dim_ + theta_dim_;
  declare_mlp(bag_, prefix_, init_rng, {in, 128, 64, 1}, spectral_norm_);
  if (spectral_norm_) spectral_power_iteration();  // warm-up so sigma estimates start sane
}

Tensor EnergyNet::element_energies(const Bound& p, const Tensor& x,
                                   const Tensor& theta, const Tensor* t) const {
  if (x.rank() != 2 || x.shape[0] == 0) throw DataError("element_energies: empty set");
  if (x.shape[1] != x_dim_) throw UsageError("element_energies: x dimension mismatch");
  if (theta.size() != theta_dim_) throw UsageError("element_energies: theta dimension mismatch");
  if ((t == nullptr) != (t_dim_ == 0)) throw UsageError("element_energies: index input mismatch");

  const std::int64_t n = x.shape[0];
  Tensor h = x;
  if (t != nullptr) {
    if (t->rank() != 2 || t->shape[0] != n || t->shape[1] != t_dim_)
      throw UsageError("element_energies: t dimension mismatch");
    h = nd::concat_cols(h, *t);
  }
  Tensor theta_v = theta.rank() == 1 ? theta : nd::reshape(theta, {theta.size()});
  h = nd::concat_cols(h, nd::broadcast_rows(theta_v, n));

  h = nd::relu(affine(h, mlp_weight(p, prefix_, 1, spectral_norm_), p[prefix_ + ".b1"]));
  h = nd::relu(affine(h, mlp_weight(p, prefix_, 2, spectral_norm_), p[prefix_ + ".b2"]));
  return affine(h, mlp_weight(p, prefix_, 3, spectral_norm_), p[prefix_ + ".b3"]);
}

void EnergyNet::spectral_power_iteration() {
  if (!spectral_norm_) return;
  power_iterate_mlp(bag_, prefix_, 3);
}

Tensor set_energy(const EnergyNet& net, const Bound& p, const Tensor& x,
                  const Tensor& theta, const Tensor* t) {
  Tensor e = net.element_energies(p, x, theta, t);
  return nd::scale(nd::sum(e, /*canonical=*/true), 1.0 / static_cast<double>(x.shape[0]));
}

// ---- SetEncoder -------------------------------------------------------------------

SetEncoder::SetEncoder(std::string prefix, int in_dim, int theta_dim, Rng init_rng)
    : prefix_(std::move(prefix)), in_dim_(in_dim), theta_dim_(theta_dim) {
  declare_mlp(bag_, prefix_ + ".phi", init_rng, {in_dim_, 128, 256}, false);
  bag_.declare(prefix_ + ".head.w", he_init(init_rng, 256, theta_dim_));
  bag_.declare(prefix_ + ".head.b", nd::zeros({theta_dim_}));
  bag_.declare(prefix_ + ".log_sigma", nd::scalar_tensor(std::log(0.1)));
}

PosteriorGaussian SetEncoder::encode(const Bound& p, const Tensor& x) const {
  if (x.rank() != 2 || x.shape[0] == 0) throw DataError("encode: empty set");
  if (x.shape[1] != in_dim_) throw UsageError("encode: input dimension mismatch");

  Tensor h = nd::relu(affine(x, p[prefix_ + ".phi.w1"], p[prefix_ + ".phi.b1"]));
  h = nd::relu(affine(h, p[prefix_ + ".phi.w2"], p[prefix_ + ".phi.b2"]));
  Tensor pooled = nd::max_rows(h);  // exact permutation invariance
  Tensor mu = nd::reshape(
      affine(nd::reshape(pooled, {1, 256}), p[prefix_ + ".head.w"], p[prefix_ + ".head.b"]),
      {theta_dim_});
  Tensor sigma = nd::exp_(p[prefix_ + ".log_sigma"]);
  return PosteriorGaussian{mu, sigma};
}

// ---- CollapsedSetEnergy --------------------------------------------------------------

CollapsedSetEnergy::CollapsedSetEnergy(std::string prefix, int x_dim,
                                       bool spectral_norm, Rng init_rng)
    : prefix_(std::move(prefix)), x_dim_(x_dim), spectral_norm_(spectral_norm) {
  declare_mlp(bag_, prefix_ + ".phi", init_rng, {x_dim_, 128, 256}, false);
  declare_mlp(bag_, prefix_ + ".f", init_rng, {x_dim_ + 256, 128, 64, 1}, spectral_norm_);
  if (spectral_norm_) spectral_power_iteration();
}

Tensor CollapsedSetEnergy::set_energy(const Bound& p, const Tensor& x) const {
  if (x.rank() != 2 || x.shape[0] == 0) throw DataError("collapsed set energy: empty set");
  if (x.shape[1] != x_dim_) throw UsageError("collapsed set energy: dimension mismatch");
  const std::int64_t n = x.shape[0];

  Tensor h = nd::relu(affine(x, p[prefix_ + ".phi.w1"], p[prefix_ + ".phi.b1"]));
  h = nd::relu(affine(h, p[prefix_ + ".phi.w2"], p[prefix_ + ".phi.b2"]));
  Tensor pooled = nd::sum_rows(h, /*canonical=*/true);

  Tensor fin = nd::concat_cols(x, nd::broadcast_rows(pooled, n));
  Tensor g = nd::relu(affine(fin, mlp_weight(p, prefix_ + ".f", 1, spectral_norm_), p[prefix_ + ".f.b1"]));
  g = nd::relu(affine(g, mlp_weight(p, prefix_ + ".f", 2, spectral_norm_), p[prefix_ + ".f.b2"]));
  g = affine(g, mlp_weight(p, prefix_ + ".f", 3, spectral_norm_), p[prefix_ + ".f.b3"]);
  return nd::sum(g, /*canonical=*/true);
}

void CollapsedSetEnergy::spectral_power_iteration() {
  if (!spectral_norm_) return;
  power_iterate_mlp(bag_, prefix_ + ".f", 3);
}

}  // namespace ebp

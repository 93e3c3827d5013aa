#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "ebp/errors.hpp"
#include "ebp/model.hpp"
#include "support/finite_diff.hpp"

using namespace ebp;
using nd::Tensor;

namespace {

Tensor random_set(Rng& rng, int n, int d) {
  return nd::constant({n, d}, rng.normals(static_cast<std::size_t>(n * d)));
}

Tensor permute_rows(const Tensor& x, const std::vector<int>& perm) {
  const auto n = x.shape[0], m = x.shape[1];
  std::vector<double> v(static_cast<std::size_t>(n * m));
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j)
      v[static_cast<std::size_t>(i * m + j)] = x(perm[static_cast<std::size_t>(i)], j);
  return nd::constant({n, m}, std::move(v));
}

std::vector<int> random_perm(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  return p;
}

}  // namespace

TEST_CASE("set energy of a singleton equals the element energy") {
  EnergyNet net("f", 3, 0, 4, false, Rng(1));
  Bound p = bind_const(net.params());
  Rng rng(2);
  Tensor x = random_set(rng, 1, 3);
  Tensor theta = nd::constant({4}, rng.normals(4));
  Tensor e = net.element_energies(p, x, theta);
  Tensor se = set_energy(net, p, x, theta);
  CHECK(se.scalar() == doctest::Approx(e(0, 0)).epsilon(1e-15));
}

TEST_CASE("set energy is bitwise permutation invariant") {
  EnergyNet net("f", 3, 0, 8, false, Rng(5));
  Bound p = bind_const(net.params());
  Rng rng(6);
  for (int n : {2, 7, 33, 64}) {
    Tensor x = random_set(rng, n, 3);
    Tensor theta = nd::constant({8}, rng.normals(8));
    const double a = set_energy(net, p, x, theta).scalar();
    for (int rep = 0; rep < 3; ++rep) {
      Tensor xp = permute_rows(x, random_perm(rng, n));
      CHECK(set_energy(net, p, xp, theta).scalar() == a);
    }
  }
}

TEST_CASE("zero-weight energy net returns 0 regardless of input") {
  EnergyNet net("f", 2, 0, 4, false, Rng(1));
  for (auto& e : net.params().entries()) e.value = nd::zeros(e.value.shape);
  Bound p = bind_const(net.params());
  Rng rng(9);
  Tensor x = random_set(rng, 5, 2);
  Tensor theta = nd::constant({4}, rng.normals(4));
  CHECK(set_energy(net, p, x, theta).scalar() == 0.0);
}

TEST_CASE("set energy rejects empty sets and bad dimensions") {
  EnergyNet net("f", 2, 0, 4, false, Rng(1));
  Bound p = bind_const(net.params());
  Tensor theta = nd::zeros({4});
  CHECK_THROWS_AS((void)net.element_energies(p, nd::zeros({0, 2}), theta), DataError);
  CHECK_THROWS_AS((void)net.element_energies(p, nd::zeros({3, 5}), theta), UsageError);
  CHECK_THROWS_AS((void)net.element_energies(p, nd::zeros({3, 2}), nd::zeros({7})), UsageError);
}

TEST_CASE("encoder: duplicated element leaves the mean unchanged under max pooling") {
  SetEncoder enc("q", 3, 16, Rng(4));
  Bound p = bind_const(enc.params());
  Rng rng(11);
  Tensor x = random_set(rng, 6, 3);
  Tensor x_dup = nd::concat_rows(x, nd::slice_rows(x, 2, 3));
  auto a = enc.encode(p, x);
  auto b = enc.encode(p, x_dup);
  for (int k = 0; k < 16; ++k) CHECK(a.mean(k) == b.mean(k));
}

TEST_CASE("encoder mean is bitwise permutation invariant") {
  SetEncoder enc("q", 2, 16, Rng(8));
  Bound p = bind_const(enc.params());
  Rng rng(12);
  Tensor x = random_set(rng, 31, 2);
  auto a = enc.encode(p, x);
  for (int rep = 0; rep < 4; ++rep) {
    auto b = enc.encode(p, permute_rows(x, random_perm(rng, 31)));
    for (int k = 0; k < 16; ++k) CHECK(a.mean(k) == b.mean(k));
  }
}

TEST_CASE("sigma fixed at zero gives deterministic theta = mu") {
  SetEncoder enc("q", 2, 8, Rng(3));
  Bound p = bind_const(enc.params());
  Rng rng(5);
  Tensor x = random_set(rng, 4, 2);
  auto q = enc.encode(p, x);
  q.sigma = nd::scalar_tensor(0.0);
  Rng noise(77);
  Tensor theta = q.sample(noise);
  for (int k = 0; k < 8; ++k) CHECK(theta(k) == q.mean(k));
}

TEST_CASE("encoder rejects empty sets") {
  SetEncoder enc("q", 2, 8, Rng(3));
  Bound p = bind_const(enc.params());
  CHECK_THROWS_AS((void)enc.encode(p, nd::zeros({0, 2})), DataError);
}

TEST_CASE("collapsed set energy: permutation invariance, constant map, singleton") {
  CollapsedSetEnergy ce("c", 3, false, Rng(21));
  Bound p = bind_const(ce.params());
  Rng rng(22);

  Tensor x = random_set(rng, 17, 3);
  const double a = ce.set_energy(p, x).scalar();
  for (int rep = 0; rep < 3; ++rep)
    CHECK(ce.set_energy(p, permute_rows(x, random_perm(rng, 17))).scalar() == a);

  // phi == 0 and f(x; 0) == c  =>  n * c
  CollapsedSetEnergy cz("c", 3, false, Rng(23));
  for (auto& e : cz.params().entries()) e.value = nd::zeros(e.value.shape);
  cz.params().at("c.f.b3") = nd::constant({1}, {2.5});
  Bound pz = bind_const(cz.params());
  CHECK(cz.set_energy(pz, random_set(rng, 7, 3)).scalar() == doctest::Approx(7 * 2.5).epsilon(1e-15));

  // single element: f(x1; phi(x1))
  Tensor x1 = random_set(rng, 1, 3);
  const double single = ce.set_energy(p, x1).scalar();
  CHECK(std::isfinite(single));
  // recompute by hand through the public pieces: energy of a singleton is the
  // sum over exactly one element, so doubling the element duplicates pooling
  Tensor x11 = nd::concat_rows(x1, x1);
  CHECK(ce.set_energy(p, x11).scalar() != doctest::Approx(single).epsilon(1e-12));
}

TEST_CASE("kl to standard normal: closed-form values") {
  PosteriorGaussian q0{nd::zeros({1}), nd::scalar_tensor(1.0)};
  CHECK(kl_to_standard_normal(q0).scalar() == 0.0);

  PosteriorGaussian q1{nd::constant({1}, {1.0}), nd::scalar_tensor(1.0)};
  CHECK(kl_to_standard_normal(q1).scalar() == doctest::Approx(0.5).epsilon(1e-14));

  PosteriorGaussian q2{nd::zeros({1}), nd::scalar_tensor(2.0)};
  CHECK(kl_to_standard_normal(q2).scalar() ==
        doctest::Approx(0.5 * (4.0 - 1.0 - std::log(4.0))).epsilon(1e-14));

  PosteriorGaussian bad{nd::zeros({1}), nd::scalar_tensor(0.0)};
  CHECK_THROWS_AS((void)kl_to_standard_normal(bad), NumericalError);
}

TEST_CASE("gradient of set energy w.r.t. an element matches finite differences") {
  EnergyNet net("f", 2, 0, 4, false, Rng(31));
  Rng rng(32);
  std::vector<double> xs = rng.normals(8);  // 4 x 2
  std::vector<double> th = rng.normals(4);

  auto eval = [&](const std::vector<double>& v) {
    Bound p = bind_const(net.params());
    return set_energy(net, p, nd::constant({4, 2}, v), nd::constant({4}, th)).scalar();
  };

  nd::Tape tape;
  Bound p = bind_const(net.params());
  Tensor x = tape.leaf(nd::constant({4, 2}, xs));
  Tensor se = set_energy(net, p, x, nd::constant({4}, th));
  auto g = tape.grad(se, {x});
  auto fd = testsupport::fd_gradient(eval, xs);
  CHECK(testsupport::max_rel_err(g[0].values(), fd) <= 1e-4);
}

TEST_CASE("spectral normalization estimate tracks a dense SVD oracle within 1%") {
  Rng rng(41);
  for (int dim : {8, 32, 128, 256}) {
    const int rows = dim, cols = dim == 128 ? 64 : dim;
    Tensor w = nd::constant({rows, cols}, rng.normals(static_cast<std::size_t>(rows * cols)));

    std::vector<double> u(static_cast<std::size_t>(rows)), v(static_cast<std::size_t>(cols));
    Rng r2(42);
    for (auto& x : u) x = r2.normal();
    for (auto& x : v) x = r2.normal();

    double est = 0.0;
    for (int it = 0; it < 500; ++it) est = spectral_power_step(w, u, v);  // persisted u/v across steps

    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = w(i, j);
    const double want = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    CHECK(std::abs(est - want) / want <= 0.01);
  }
}

TEST_CASE("normalized weights report unit spectral estimate") {
  EnergyNet net("f", 3, 0, 8, true, Rng(51));
  for (int step = 0; step < 20; ++step) net.spectral_power_iteration();
  nd::Tape tape;
  Bound p = bind(tape, net.params());
  Rng rng(52);
  Tensor x = nd::constant({5, 3}, rng.normals(15));
  Tensor theta = nd::constant({8}, rng.normals(8));
  Tensor e = net.element_energies(p, x, theta);
  CHECK(e.all_finite());

  // estimated top singular value of each normalized matrix is <= 1 + 1e-3
  for (int l = 1; l <= 3; ++l) {
    const std::string id = std::to_string(l);
    const Tensor& w = net.params().at("f.w" + id);
    std::vector<double> u = net.params().at("f.u" + id).values();
    std::vector<double> v = net.params().at("f.v" + id).values();
    const double sigma = spectral_power_step(w, u, v);
    // the effective weight divides by exactly this estimate
    std::vector<double> wn(w.values());
    for (auto& x2 : wn) x2 /= sigma;
    std::vector<double> u2 = u, v2 = v;
    const double est = spectral_power_step(nd::constant(w.shape, wn), u2, v2);
    CHECK(est <= 1.0 + 1e-3);
  }
}

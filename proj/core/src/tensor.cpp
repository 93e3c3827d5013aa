#include "ebp/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ebp/errors.hpp"

namespace ebp::nd {
namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

std::int64_t shape_size(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

std::shared_ptr<const std::vector<double>> buf(std::vector<double> v) {
  return std::make_shared<const std::vector<double>>(std::move(v));
}

Tensor make(Shape shape, std::vector<double> v) {
  if (shape_size(shape) != static_cast<std::int64_t>(v.size()))
    throw UsageError("tensor: shape does not match data length");
  return Tensor{std::move(shape), buf(std::move(v)), nullptr, -1};
}

Tape* resolve_tape(const Tensor& a, const Tensor& b) {
  if (a.tape && b.tape && a.tape != b.tape)
    throw UsageError("tensor op: operands live on different tapes");
  return a.tape ? a.tape : b.tape;
}

Tensor finish(Tape* tape, Tape::Node node, Tensor out) {
  if (tape == nullptr) return out;
  out.tape = tape;
  out.node = tape->next_index();
  node.out = out;          // stored with its node id so backward rules that
  tape->record(std::move(node));  // reuse the output stay differentiable
  return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape)
    throw UsageError(std::string(op) + ": shape mismatch");
}

// order of row indices under lexicographic comparison of row contents
std::vector<std::int64_t> lex_row_order(const std::vector<double>& v,
                                        std::int64_t n, std::int64_t m) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
    const double* ra = v.data() + a * m;
    const double* rb = v.data() + b * m;
    for (std::int64_t j = 0; j < m; ++j) {
      if (ra[j] < rb[j]) return true;
      if (ra[j] > rb[j]) return false;
    }
    return a < b;
  });
  return idx;
}

}  // namespace

// ---- Tensor -----------------------------------------------------------------

std::int64_t Tensor::size() const { return shape_size(shape); }

std::int64_t Tensor::rows() const {
  if (rank() == 2) return shape[0];
  if (rank() == 1) return shape[0];
  return 1;
}

std::int64_t Tensor::cols() const {
  if (rank() == 2) return shape[1];
  return 1;
}

double Tensor::scalar() const {
  if (size() != 1) throw UsageError("Tensor::scalar: tensor is not a scalar");
  return (*data)[0];
}

bool Tensor::all_finite() const {
  for (double v : *data)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::check_finite(const std::string& what) const {
  if (!all_finite()) throw NumericalError(what + ": non-finite values");
}

Tensor constant(Shape shape, std::vector<double> values) {
  return make(std::move(shape), std::move(values));
}

Tensor scalar_tensor(double v) { return make({}, {v}); }

Tensor zeros(Shape shape) {
  auto n = shape_size(shape);
  return make(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

Tensor ones(Shape shape) { return full(std::move(shape), 1.0); }

Tensor full(Shape shape, double v) {
  auto n = shape_size(shape);
  return make(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), v));
}

// ---- ops --------------------------------------------------------------------

namespace {

template <typename F>
Tensor elementwise2(Op op, const Tensor& a, const Tensor& b, const char* name, F f) {
  require_same_shape(a, b, name);
  std::vector<double> v(a.values().size());
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(av[i], bv[i]);
  Tensor out = make(a.shape, std::move(v));
  return finish(resolve_tape(a, b), Tape::Node{op, a, b}, std::move(out));
}

template <typename F>
Tensor elementwise1(Op op, const Tensor& a, F f, double c0 = 0.0, double c1 = 0.0) {
  std::vector<double> v(a.values().size());
  const auto& av = a.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(av[i]);
  Tensor out = make(a.shape, std::move(v));
  Tape::Node node{op, a, Tensor{}};
  node.c0 = c0;
  node.c1 = c1;
  return finish(a.tape, std::move(node), std::move(out));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise2(Op::kAdd, a, b, "add", [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise2(Op::kSub, a, b, "sub", [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise2(Op::kMul, a, b, "mul", [](double x, double y) { return x * y; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return elementwise2(Op::kDiv, a, b, "div", [](double x, double y) { return x / y; });
}

Tensor neg(const Tensor& a) {
  return elementwise1(Op::kNeg, a, [](double x) { return -x; });
}

Tensor smul(const Tensor& s, const Tensor& x) {
  if (s.size() != 1) throw UsageError("smul: scale operand must be rank-0");
  const double sv = s.values()[0];
  std::vector<double> v(x.values().size());
  const auto& xv = x.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sv * xv[i];
  Tensor out = make(x.shape, std::move(v));
  return finish(resolve_tape(s, x), Tape::Node{Op::kSMul, s, x}, std::move(out));
}

Tensor scale(const Tensor& x, double c) {
  return elementwise1(Op::kScale, x, [c](double v) { return c * v; }, c);
}

Tensor shift(const Tensor& x, double c) {
  return elementwise1(Op::kShift, x, [c](double v) { return v + c; }, c);
}

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  if (a.rank() != 2 || b.rank() != 2) throw UsageError("matmul: rank-2 operands required");
  const std::int64_t ar = trans_a ? a.shape[1] : a.shape[0];
  const std::int64_t ac = trans_a ? a.shape[0] : a.shape[1];
  const std::int64_t br = trans_b ? b.shape[1] : b.shape[0];
  const std::int64_t bc = trans_b ? b.shape[0] : b.shape[1];
  if (ac != br) throw UsageError("matmul: inner dimensions disagree");

  std::vector<double> v(static_cast<std::size_t>(ar * bc));
  {
    CMap am(a.values().data(), a.shape[0], a.shape[1]);
    CMap bm(b.values().data(), b.shape[0], b.shape[1]);
    MMap cm(v.data(), ar, bc);
    if (!trans_a && !trans_b) cm.noalias() = am * bm;
    else if (trans_a && !trans_b) cm.noalias() = am.transpose() * bm;
    else if (!trans_a && trans_b) cm.noalias() = am * bm.transpose();
    else cm.noalias() = am.transpose() * bm.transpose();
  }
  Tensor out = make({ar, bc}, std::move(v));
  Tape::Node node{Op::kMatmul, a, b};
  node.ta = trans_a;
  node.tb = trans_b;
  return finish(resolve_tape(a, b), std::move(node), std::move(out));
}

Tensor sum(const Tensor& x, bool canonical) {
  double s = 0.0;
  if (canonical) {
    std::vector<double> v(x.values());
    std::sort(v.begin(), v.end());
    for (double d : v) s += d;
  } else {
    for (double d : x.values()) s += d;
  }
  Tensor out = make({}, {s});
  Tape::Node node{Op::kSum, x, Tensor{}};
  return finish(x.tape, std::move(node), std::move(out));
}

Tensor mean(const Tensor& x, bool canonical) {
  if (x.size() == 0) throw UsageError("mean: empty tensor");
  return scale(sum(x, canonical), 1.0 / static_cast<double>(x.size()));
}

Tensor sum_rows(const Tensor& x, bool canonical) {
  if (x.rank() != 2) throw UsageError("sum_rows: rank-2 operand required");
  const std::int64_t n = x.shape[0], m = x.shape[1];
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  const auto& xv = x.values();
  if (canonical) {
    for (std::int64_t i : lex_row_order(xv, n, m))
      for (std::int64_t j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] += xv[static_cast<std::size_t>(i * m + j)];
  } else {
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] += xv[static_cast<std::size_t>(i * m + j)];
  }
  Tensor out = make({m}, std::move(v));
  return finish(x.tape, Tape::Node{Op::kSumRows, x, Tensor{}}, std::move(out));
}

Tensor max_all(const Tensor& x) {
  if (x.size() == 0) throw UsageError("max_all: empty tensor");
  const auto& xv = x.values();
  std::size_t best = 0;
  for (std::size_t i = 1; i < xv.size(); ++i)
    if (xv[i] > xv[best]) best = i;  // strict: first maximum wins
  Tensor out = make({}, {xv[best]});
  Tape::Node node{Op::kMaxAll, x, Tensor{}};
  node.i0 = static_cast<std::int64_t>(best);
  return finish(x.tape, std::move(node), std::move(out));
}

Tensor max_rows(const Tensor& x) {
  if (x.rank() != 2 || x.shape[0] == 0) throw UsageError("max_rows: nonempty rank-2 operand required");
  const std::int64_t n = x.shape[0], m = x.shape[1];
  const auto& xv = x.values();
  std::vector<double> v(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) {
    std::int64_t best = 0;
    for (std::int64_t i = 1; i < n; ++i)
      if (xv[static_cast<std::size_t>(i * m + j)] > xv[static_cast<std::size_t>(best * m + j)]) best = i;
    v[static_cast<std::size_t>(j)] = xv[static_cast<std::size_t>(best * m + j)];
  }
  Tensor out = make({m}, std::move(v));
  return finish(x.tape, Tape::Node{Op::kMaxRows, x, Tensor{}}, std::move(out));
}

Tensor exp_(const Tensor& x) {
  return elementwise1(Op::kExp, x, [](double v) { return std::exp(v); });
}

Tensor log_(const Tensor& x) {
  return elementwise1(Op::kLog, x, [](double v) { return std::log(v); });
}

Tensor tanh_(const Tensor& x) {
  return elementwise1(Op::kTanh, x, [](double v) { return std::tanh(v); });
}

Tensor relu(const Tensor& x) {
  return elementwise1(Op::kRelu, x, [](double v) { return v > 0.0 ? v : 0.0; });
}

Tensor square(const Tensor& x) {
  return elementwise1(Op::kSquare, x, [](double v) { return v * v; });
}

Tensor sqrt_(const Tensor& x) {
  return elementwise1(Op::kSqrt, x, [](double v) { return std::sqrt(v); });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  if (!(lo <= hi)) throw UsageError("clamp: lo must not exceed hi");
  return elementwise1(Op::kClamp, x,
                      [lo, hi](double v) { return std::min(std::max(v, lo), hi); }, lo, hi);
}

Tensor norm2(const Tensor& x) { return sqrt_(sum(square(x))); }

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank() || a.rank() < 1 || a.rank() > 2)
    throw UsageError("concat_rows: rank mismatch");
  if (a.rank() == 2 && a.shape[1] != b.shape[1])
    throw UsageError("concat_rows: column counts disagree");
  std::vector<double> v;
  v.reserve(a.values().size() + b.values().size());
  v.insert(v.end(), a.values().begin(), a.values().end());
  v.insert(v.end(), b.values().begin(), b.values().end());
  Shape s = a.shape;
  s[0] += b.shape[0];
  Tensor out = make(std::move(s), std::move(v));
  return finish(resolve_tape(a, b), Tape::Node{Op::kConcatRows, a, b}, std::move(out));
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape[0] != b.shape[0])
    throw UsageError("concat_cols: rank-2 operands with equal row counts required");
  const std::int64_t n = a.shape[0], ma = a.shape[1], mb = b.shape[1];
  std::vector<double> v(static_cast<std::size_t>(n * (ma + mb)));
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::int64_t i = 0; i < n; ++i) {
    std::copy_n(av.data() + i * ma, ma, v.data() + i * (ma + mb));
    std::copy_n(bv.data() + i * mb, mb, v.data() + i * (ma + mb) + ma);
  }
  Tensor out = make({n, ma + mb}, std::move(v));
  return finish(resolve_tape(a, b), Tape::Node{Op::kConcatCols, a, b}, std::move(out));
}

Tensor slice_rows(const Tensor& x, std::int64_t r0, std::int64_t r1) {
  if (x.rank() < 1 || x.rank() > 2) throw UsageError("slice_rows: rank-1/2 operand required");
  if (r0 < 0 || r1 < r0 || r1 > x.shape[0]) throw UsageError("slice_rows: bounds out of range");
  const std::int64_t m = x.rank() == 2 ? x.shape[1] : 1;
  std::vector<double> v(static_cast<std::size_t>((r1 - r0) * m));
  std::copy_n(x.values().data() + r0 * m, (r1 - r0) * m, v.data());
  Shape s = x.shape;
  s[0] = r1 - r0;
  Tensor out = make(std::move(s), std::move(v));
  Tape::Node node{Op::kSliceRows, x, Tensor{}};
  node.i0 = r0;
  node.i1 = r1;
  return finish(x.tape, std::move(node), std::move(out));
}

Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1) {
  if (x.rank() != 2) throw UsageError("slice_cols: rank-2 operand required");
  if (c0 < 0 || c1 < c0 || c1 > x.shape[1]) throw UsageError("slice_cols: bounds out of range");
  const std::int64_t n = x.shape[0], m = x.shape[1];
  std::vector<double> v(static_cast<std::size_t>(n * (c1 - c0)));
  for (std::int64_t i = 0; i < n; ++i)
    std::copy_n(x.values().data() + i * m + c0, c1 - c0, v.data() + i * (c1 - c0));
  Tensor out = make({n, c1 - c0}, std::move(v));
  Tape::Node node{Op::kSliceCols, x, Tensor{}};
  node.i0 = c0;
  node.i1 = c1;
  return finish(x.tape, std::move(node), std::move(out));
}

Tensor broadcast_rows(const Tensor& v, std::int64_t n) {
  if (v.rank() != 1) throw UsageError("broadcast_rows: rank-1 operand required");
  if (n < 0) throw UsageError("broadcast_rows: negative row count");
  const std::int64_t m = v.shape[0];
  std::vector<double> out(static_cast<std::size_t>(n * m));
  for (std::int64_t i = 0; i < n; ++i)
    std::copy_n(v.values().data(), m, out.data() + i * m);
  Tensor t = make({n, m}, std::move(out));
  Tape::Node node{Op::kBroadcastRows, v, Tensor{}};
  node.i0 = n;
  return finish(v.tape, std::move(node), std::move(t));
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) throw UsageError("reshape: element count mismatch");
  Tensor out{std::move(shape), x.data, nullptr, -1};
  return finish(x.tape, Tape::Node{Op::kReshape, x, Tensor{}}, std::move(out));
}

// ---- Tape -------------------------------------------------------------------

std::int32_t Tape::record(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

Tensor Tape::leaf(const Tensor& value) {
  Tensor out = value.detach();
  out.tape = this;
  Node node{Op::kLeaf, Tensor{}, Tensor{}};
  node.out = out;
  out.node = record(std::move(node));
  return out;
}

namespace {

Tensor one_minus_sq(const Tensor& y) { return shift(scale(square(y), -1.0), 1.0); }

}  // namespace

std::vector<Tensor> Tape::grad(const Tensor& output, const std::vector<Tensor>& inputs,
                               bool create_graph) {
  if (output.size() != 1)
    throw UsageError("grad: output must be scalar");
  if (!output.on_tape() || output.tape != this)
    throw UsageError("grad: output is not on this tape");
  for (const auto& in : inputs)
    if (!in.on_tape() || in.tape != this)
      throw UsageError("grad: input not on tape (disconnected graph)");

  // detach during the walk when the caller does not need grad-of-grad
  const auto use = [&](const Tensor& t) { return create_graph ? t : t.detach(); };

  std::vector<Tensor> adj(static_cast<std::size_t>(output.node) + 1);
  std::vector<bool> has(static_cast<std::size_t>(output.node) + 1, false);
  std::vector<bool> keep(static_cast<std::size_t>(output.node) + 1, false);
  for (const auto& in : inputs)
    if (in.node <= output.node) keep[static_cast<std::size_t>(in.node)] = true;
  adj[static_cast<std::size_t>(output.node)] = ones(output.shape);
  has[static_cast<std::size_t>(output.node)] = true;

  const auto accumulate = [&](const Tensor& operand, const Tensor& contrib) {
    if (!operand.on_tape() || operand.tape != this) return;   // constant operand
    const auto idx = static_cast<std::size_t>(operand.node);
    if (idx >= adj.size()) return;                            // recorded after output
    adj[idx] = has[idx] ? add(adj[idx], contrib) : contrib;
    has[idx] = true;
  };

  for (std::int32_t i = output.node; i >= 0; --i) {
    if (!has[static_cast<std::size_t>(i)]) continue;
    // copy: backward ops may reallocate nodes_
    const Node node = nodes_[static_cast<std::size_t>(i)];
    const Tensor g = use(adj[static_cast<std::size_t>(i)]);
    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        accumulate(node.a, g);
        accumulate(node.b, g);
        break;
      case Op::kSub:
        accumulate(node.a, g);
        accumulate(node.b, neg(g));
        break;
      case Op::kMul:
        accumulate(node.a, mul(g, use(node.b)));
        accumulate(node.b, mul(g, use(node.a)));
        break;
      case Op::kDiv:
        accumulate(node.a, div(g, use(node.b)));
        accumulate(node.b, neg(div(mul(g, use(node.out)), use(node.b))));
        break;
      case Op::kNeg:
        accumulate(node.a, neg(g));
        break;
      case Op::kSMul:
        accumulate(node.a, reshape(sum(mul(g, use(node.b))), node.a.shape));
        accumulate(node.b, smul(use(node.a), g));
        break;
      case Op::kScale:
        accumulate(node.a, scale(g, node.c0));
        break;
      case Op::kShift:
        accumulate(node.a, g);
        break;
      case Op::kMatmul: {
        const Tensor a = use(node.a), b = use(node.b);
        if (!node.ta) accumulate(node.a, matmul(g, b, false, !node.tb));
        else accumulate(node.a, matmul(b, g, node.tb, true));
        if (!node.tb) accumulate(node.b, matmul(a, g, !node.ta, false));
        else accumulate(node.b, matmul(g, a, true, node.ta));
        break;
      }
      case Op::kSum:
        accumulate(node.a, smul(g, ones(node.a.shape)));
        break;
      case Op::kSumRows:
        accumulate(node.a, broadcast_rows(g, node.a.shape[0]));
        break;
      case Op::kMaxAll: {
        auto mask = std::vector<double>(node.a.values().size(), 0.0);
        mask[static_cast<std::size_t>(node.i0)] = 1.0;
        accumulate(node.a, smul(g, constant(node.a.shape, std::move(mask))));
        break;
      }
      case Op::kMaxRows: {
        const std::int64_t n = node.a.shape[0], m = node.a.shape[1];
        const auto& xv = node.a.values();
        auto mask = std::vector<double>(static_cast<std::size_t>(n * m), 0.0);
        for (std::int64_t j = 0; j < m; ++j) {
          std::int64_t best = 0;
          for (std::int64_t r = 1; r < n; ++r)
            if (xv[static_cast<std::size_t>(r * m + j)] > xv[static_cast<std::size_t>(best * m + j)]) best = r;
          mask[static_cast<std::size_t>(best * m + j)] = 1.0;
        }
        accumulate(node.a, mul(broadcast_rows(g, n), constant({n, m}, std::move(mask))));
        break;
      }
      case Op::kExp:
        accumulate(node.a, mul(g, use(node.out)));
        break;
      case Op::kLog:
        accumulate(node.a, div(g, use(node.a)));
        break;
      case Op::kTanh:
        accumulate(node.a, mul(g, one_minus_sq(use(node.out))));
        break;
      case Op::kRelu: {
        auto mask = std::vector<double>(node.a.values().size());
        const auto& xv = node.a.values();
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = xv[k] > 0.0 ? 1.0 : 0.0;
        accumulate(node.a, mul(g, constant(node.a.shape, std::move(mask))));
        break;
      }
      case Op::kSquare:
        accumulate(node.a, mul(g, scale(use(node.a), 2.0)));
        break;
      case Op::kSqrt:
        accumulate(node.a, div(g, scale(use(node.out), 2.0)));
        break;
      case Op::kClamp: {
        auto mask = std::vector<double>(node.a.values().size());
        const auto& xv = node.a.values();
        for (std::size_t k = 0; k < mask.size(); ++k)
          mask[k] = (xv[k] >= node.c0 && xv[k] <= node.c1) ? 1.0 : 0.0;
        accumulate(node.a, mul(g, constant(node.a.shape, std::move(mask))));
        break;
      }
      case Op::kConcatRows: {
        const std::int64_t na = node.a.shape[0];
        accumulate(node.a, slice_rows(g, 0, na));
        accumulate(node.b, slice_rows(g, na, node.out.shape[0]));
        break;
      }
      case Op::kConcatCols: {
        const std::int64_t ma = node.a.shape[1];
        accumulate(node.a, slice_cols(g, 0, ma));
        accumulate(node.b, slice_cols(g, ma, node.out.shape[1]));
        break;
      }
      case Op::kSliceRows: {
        const std::int64_t m = node.a.rank() == 2 ? node.a.shape[1] : 1;
        Shape pre = node.a.shape, post = node.a.shape;
        pre[0] = node.i0;
        post[0] = node.a.shape[0] - node.i1;
        (void)m;
        Tensor padded = g;
        if (pre[0] > 0) padded = concat_rows(zeros(pre), padded);
        if (post[0] > 0) padded = concat_rows(padded, zeros(post));
        accumulate(node.a, padded);
        break;
      }
      case Op::kSliceCols: {
        Shape pre = node.a.shape, post = node.a.shape;
        pre[1] = node.i0;
        post[1] = node.a.shape[1] - node.i1;
        Tensor padded = g;
        if (pre[1] > 0) padded = concat_cols(zeros(pre), padded);
        if (post[1] > 0) padded = concat_cols(padded, zeros(post));
        accumulate(node.a, padded);
        break;
      }
      case Op::kBroadcastRows:
        accumulate(node.a, sum_rows(g));
        break;
      case Op::kReshape:
        accumulate(node.a, reshape(g, node.a.shape));
        break;
    }
    // free the adjoint once consumed to bound peak memory
    if (!keep[static_cast<std::size_t>(i)]) adj[static_cast<std::size_t>(i)] = Tensor{};
  }

  std::vector<Tensor> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    const auto idx = static_cast<std::size_t>(in.node);
    if (idx < adj.size() && has[idx]) out.push_back(adj[idx]);
    else out.push_back(zeros(in.shape));
  }
  return out;
}

std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs,
                         bool create_graph) {
  if (output.tape == nullptr) throw UsageError("grad: output is not on a tape");
  return output.tape->grad(output, inputs, create_graph);
}

}  // namespace ebp::nd

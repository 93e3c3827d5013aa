#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ebp::nd {

class Tape;

using Shape = std::vector<std::int64_t>;

// Dense row-major float64 tensor (rank 0..2). Data buffers are immutable and
// shared; a tensor optionally carries a handle onto the tape that produced it.
// Tensors without a handle are constants for differentiation purposes.
struct Tensor {
  Shape shape;
  std::shared_ptr<const std::vector<double>> data;
  Tape* tape = nullptr;
  std::int32_t node = -1;

  std::int64_t size() const;
  int rank() const { return static_cast<int>(shape.size()); }
  std::int64_t rows() const;
  std::int64_t cols() const;
  bool on_tape() const { return tape != nullptr && node >= 0; }

  const std::vector<double>& values() const { return *data; }
  double scalar() const;                 // requires size() == 1
  double operator()(std::int64_t i) const { return (*data)[static_cast<std::size_t>(i)]; }
  double operator()(std::int64_t i, std::int64_t j) const { return (*data)[static_cast<std::size_t>(i * cols() + j)]; }

  bool all_finite() const;
  void check_finite(const std::string& what) const;  // throws NumericalError

  Tensor detach() const { return Tensor{shape, data, nullptr, -1}; }
};

Tensor constant(Shape shape, std::vector<double> values);
Tensor scalar_tensor(double v);
Tensor zeros(Shape shape);
Tensor ones(Shape shape);
Tensor full(Shape shape, double v);

// ---- primitive operations ---------------------------------------------------
// Every op returns the forward value; when an operand is on a tape the result
// is recorded with exact local partials so reverse passes (and reverse passes
// of reverse passes) see it.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor smul(const Tensor& s, const Tensor& x);   // rank-0 s times x
Tensor scale(const Tensor& x, double c);
Tensor shift(const Tensor& x, double c);
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false, bool trans_b = false);

// Reductions. `canonical` accumulates addends in value order (flat) or
// lexicographic row order (sum_rows), which makes results bitwise invariant
// under permutations of the reduced axis.
Tensor sum(const Tensor& x, bool canonical = false);
Tensor mean(const Tensor& x, bool canonical = false);
Tensor sum_rows(const Tensor& x, bool canonical = false);  // (n,m) -> (m)
Tensor max_all(const Tensor& x);    // ties: lowest flat index
Tensor max_rows(const Tensor& x);   // (n,m) -> (m), ties: lowest row index

Tensor exp_(const Tensor& x);
Tensor log_(const Tensor& x);
Tensor tanh_(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor square(const Tensor& x);
Tensor sqrt_(const Tensor& x);
Tensor clamp(const Tensor& x, double lo, double hi);
Tensor norm2(const Tensor& x);      // sqrt(sum(square(x)))

Tensor concat_rows(const Tensor& a, const Tensor& b);  // axis 0; rank 1 or 2
Tensor concat_cols(const Tensor& a, const Tensor& b);  // axis 1; rank 2
Tensor slice_rows(const Tensor& x, std::int64_t r0, std::int64_t r1);
Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1);
Tensor broadcast_rows(const Tensor& v, std::int64_t n);  // (m) -> (n,m)
Tensor reshape(const Tensor& x, Shape shape);

enum class Op : std::uint8_t {
  kLeaf, kAdd, kSub, kMul, kDiv, kNeg, kSMul, kScale, kShift, kMatmul,
  kSum, kSumRows, kMaxAll, kMaxRows, kExp, kLog, kTanh, kRelu, kSquare,
  kSqrt, kClamp, kConcatRows, kConcatCols, kSliceRows, kSliceCols,
  kBroadcastRows, kReshape,
};

// Single-owner record of primitive applications, in topological order.
// Not shareable across threads; independent tapes may run concurrently.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers `value` as a leaf so gradients can be requested against it.
  Tensor leaf(const Tensor& value);

  // Reverse pass from a scalar output to each input. Returned tensors are
  // recorded on this tape when create_graph is true, so a second grad() call
  // differentiates through them. Inputs never touched by the output yield
  // zero tensors; inputs that were never recorded are an error.
  std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs,
                           bool create_graph = true);

  std::size_t size() const { return nodes_.size(); }

  struct Node {
    Op op;
    Tensor a, b;     // saved operand values (b unused for unary ops)
    Tensor out;      // saved output value
    double c0 = 0.0, c1 = 0.0;
    std::int64_t i0 = 0, i1 = 0;
    bool ta = false, tb = false;
  };

  // internal: used by the op implementations
  std::int32_t record(Node node);
  std::int32_t next_index() const { return static_cast<std::int32_t>(nodes_.size()); }
  const Node& node_at(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Node> nodes_;
};

// Convenience wrapper; uses output.tape.
std::vector<Tensor> grad(const Tensor& output, const std::vector<Tensor>& inputs,
                         bool create_graph = true);

}  // namespace ebp::nd

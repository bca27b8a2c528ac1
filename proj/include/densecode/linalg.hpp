#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace densecode {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Default tolerances for double-precision dense algebra at total dims <= 4096.
constexpr double kHermitianTol = 1e-10;
constexpr double kAlgebraTol = 1e-12;

// Subsystem index convention, used by every module:
//
//   A composite basis index I over dims (d_0, d_1, ..., d_{n-1}) decomposes
//   row-major, leftmost subsystem varying slowest:
//
//     I = ((i_0 * d_1 + i_1) * d_2 + i_2) * ... ,   stride_k = d_{k+1} * ... * d_{n-1}.
//
//   tensor_product concatenates dim lists in argument order, so
//   (A (x) B)[(i_a, i_b), (j_a, j_b)] = A[i_a, j_a] * B[i_b, j_b].
class HilbertSpace {
public:
    explicit HilbertSpace(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
    int subsystem_count() const { return static_cast<int>(dims_.size()); }
    std::int64_t total_dim() const { return total_dim_; }

    // stride of subsystem k under the row-major convention above
    std::int64_t stride(int k) const;

    bool operator==(const HilbertSpace& other) const { return dims_ == other.dims_; }
    bool operator!=(const HilbertSpace& other) const { return !(*this == other); }

private:
    std::vector<int> dims_;
    std::int64_t total_dim_;
};

struct ComplexOperator {
    HilbertSpace space;
    Matrix mat;

    ComplexOperator(HilbertSpace s, Matrix m);

    static ComplexOperator identity(const HilbertSpace& s);
    std::int64_t dim() const { return space.total_dim(); }
};

struct ComplexVector {
    HilbertSpace space;
    Vector vec;

    ComplexVector(HilbertSpace s, Vector v);

    std::int64_t dim() const { return space.total_dim(); }
};

ComplexOperator tensor_product(const ComplexOperator& a, const ComplexOperator& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

// Trace out every subsystem not in `keep`; kept dims stay in original order.
// keep = {} yields the 1x1 scalar trace.
ComplexOperator partial_trace(const ComplexOperator& op, const std::vector<int>& keep);

// Operator acting as `op` on the ordered subsystem list `targets` of `space`
// (op's k-th factor on subsystem targets[k]) and as identity elsewhere.
ComplexOperator embed_on_subsystems(const ComplexOperator& op, const HilbertSpace& space,
                                    const std::vector<int>& targets);

// Reorder subsystems: new subsystem k is old subsystem perm[k].
ComplexVector permute_subsystems(const ComplexVector& v, const std::vector<int>& perm);
ComplexOperator permute_subsystems(const ComplexOperator& op, const std::vector<int>& perm);

// (op on targets (x) identity on the rest) * v, without forming the embedded
// operator. Same result as embed_on_subsystems(op, v.space, targets).mat * v.vec.
ComplexVector apply_on_subsystems(const ComplexVector& v, const Matrix& op,
                                  const std::vector<int>& targets);

// Orthogonal projector onto the span of eigenvectors with eigenvalue > tol.
// Requires Hermitian input (asymmetry above tol is an error).
ComplexOperator support_projector(const ComplexOperator& op, double tol = kHermitianTol);

namespace detail {

// offsets[c] = full-space index of composite index c over the listed
// subsystems (digits in list order, strides from the full space)
std::vector<std::int64_t> subset_offsets(const HilbertSpace& space, const std::vector<int>& subsystems);

std::vector<int> complement(int n, const std::vector<int>& subset);

void check_subsystem_list(const HilbertSpace& space, const std::vector<int>& list, const char* what);

}  // namespace detail

}  // namespace densecode

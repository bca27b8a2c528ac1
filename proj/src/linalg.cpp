#include "densecode/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace densecode {

HilbertSpace::HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    total_dim_ = 1;
    for (int d : dims_) {
        if (d < 1) {
            throw std::invalid_argument("HilbertSpace: subsystem dimension must be >= 1");
        }
        total_dim_ *= d;
    }
}

std::int64_t HilbertSpace::stride(int k) const {
    if (k < 0 || k >= subsystem_count()) {
        throw std::invalid_argument("HilbertSpace::stride: subsystem index out of range");
    }
    std::int64_t s = 1;
    for (std::size_t j = static_cast<std::size_t>(k) + 1; j < dims_.size(); ++j) {
        s *= dims_[j];
    }
    return s;
}

ComplexOperator::ComplexOperator(HilbertSpace s, Matrix m) : space(std::move(s)), mat(std::move(m)) {
    if (mat.rows() != mat.cols() || mat.rows() != space.total_dim()) {
        throw std::invalid_argument("ComplexOperator: matrix must be square and match the space dimension");
    }
}

ComplexOperator ComplexOperator::identity(const HilbertSpace& s) {
    return ComplexOperator(s, Matrix::Identity(s.total_dim(), s.total_dim()));
}

ComplexVector::ComplexVector(HilbertSpace s, Vector v) : space(std::move(s)), vec(std::move(v)) {
    if (vec.size() != space.total_dim()) {
        throw std::invalid_argument("ComplexVector: entry count must match the space dimension");
    }
}

namespace detail {

std::vector<std::int64_t> subset_offsets(const HilbertSpace& space, const std::vector<int>& subsystems) {
    std::int64_t count = 1;
    for (int k : subsystems) count *= space.dim(k);

    std::vector<std::int64_t> offsets(static_cast<std::size_t>(count), 0);
    std::int64_t block = count;
    for (int k : subsystems) {
        const int d = space.dim(k);
        const std::int64_t stride = space.stride(k);
        block /= d;
        for (std::int64_t c = 0; c < count; ++c) {
            const std::int64_t digit = (c / block) % d;
            offsets[static_cast<std::size_t>(c)] += digit * stride;
        }
    }
    return offsets;
}

std::vector<int> complement(int n, const std::vector<int>& subset) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int k : subset) in[static_cast<std::size_t>(k)] = true;
    std::vector<int> rest;
    for (int k = 0; k < n; ++k) {
        if (!in[static_cast<std::size_t>(k)]) rest.push_back(k);
    }
    return rest;
}

void check_subsystem_list(const HilbertSpace& space, const std::vector<int>& list, const char* what) {
    std::vector<bool> seen(static_cast<std::size_t>(space.subsystem_count()), false);
    for (int k : list) {
        if (k < 0 || k >= space.subsystem_count()) {
            throw std::invalid_argument(std::string(what) + ": subsystem index out of range");
        }
        if (seen[static_cast<std::size_t>(k)]) {
            throw std::invalid_argument(std::string(what) + ": duplicate subsystem index");
        }
        seen[static_cast<std::size_t>(k)] = true;
    }
}

std::vector<int> concat_dims(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace detail

ComplexOperator tensor_product(const ComplexOperator& a, const ComplexOperator& b) {
    const std::int64_t da = a.dim();
    const std::int64_t db = b.dim();
    Matrix out(da * db, da * db);
    for (std::int64_t i = 0; i < da; ++i) {
        for (std::int64_t j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
        }
    }
    return ComplexOperator(HilbertSpace(detail::concat_dims(a.space.dims(), b.space.dims())), std::move(out));
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
    const std::int64_t da = a.dim();
    const std::int64_t db = b.dim();
    Vector out(da * db);
    for (std::int64_t i = 0; i < da; ++i) {
        out.segment(i * db, db) = a.vec(i) * b.vec;
    }
    return ComplexVector(HilbertSpace(detail::concat_dims(a.space.dims(), b.space.dims())), std::move(out));
}

ComplexOperator partial_trace(const ComplexOperator& op, const std::vector<int>& keep) {
    detail::check_subsystem_list(op.space, keep, "partial_trace");

    std::vector<int> keep_sorted = keep;
    std::sort(keep_sorted.begin(), keep_sorted.end());
    const std::vector<int> rest = detail::complement(op.space.subsystem_count(), keep_sorted);

    const auto keep_off = detail::subset_offsets(op.space, keep_sorted);
    const auto rest_off = detail::subset_offsets(op.space, rest);

    std::vector<int> out_dims;
    for (int k : keep_sorted) out_dims.push_back(op.space.dim(k));

    const std::int64_t dk = static_cast<std::int64_t>(keep_off.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (std::int64_t i = 0; i < dk; ++i) {
        for (std::int64_t j = 0; j < dk; ++j) {
            Complex sum = 0.0;
            for (std::int64_t r : rest_off) {
                sum += op.mat(keep_off[static_cast<std::size_t>(i)] + r,
                              keep_off[static_cast<std::size_t>(j)] + r);
            }
            out(i, j) = sum;
        }
    }
    return ComplexOperator(HilbertSpace(out_dims), std::move(out));
}

ComplexOperator embed_on_subsystems(const ComplexOperator& op, const HilbertSpace& space,
                                    const std::vector<int>& targets) {
    detail::check_subsystem_list(space, targets, "embed_on_subsystems");

    std::int64_t dt = 1;
    for (int k : targets) dt *= space.dim(k);
    if (dt != op.dim()) {
        throw std::invalid_argument("embed_on_subsystems: operator dimension must equal the product of target dims");
    }

    std::vector<int> targets_sorted = targets;
    std::sort(targets_sorted.begin(), targets_sorted.end());
    const std::vector<int> rest = detail::complement(space.subsystem_count(), targets_sorted);

    const auto target_off = detail::subset_offsets(space, targets);  // digits in target order
    const auto rest_off = detail::subset_offsets(space, rest);

    Matrix out = Matrix::Zero(space.total_dim(), space.total_dim());
    for (std::int64_t a = 0; a < dt; ++a) {
        for (std::int64_t b = 0; b < dt; ++b) {
            const Complex entry = op.mat(a, b);
            if (entry == Complex(0.0, 0.0)) continue;
            for (std::int64_t r : rest_off) {
                out(target_off[static_cast<std::size_t>(a)] + r,
                    target_off[static_cast<std::size_t>(b)] + r) = entry;
            }
        }
    }
    return ComplexOperator(space, std::move(out));
}

namespace {

// index_map[old_composite] = new_composite under the permutation
std::vector<std::int64_t> permutation_index_map(const HilbertSpace& space, const std::vector<int>& perm) {
    const int n = space.subsystem_count();
    if (static_cast<int>(perm.size()) != n) {
        throw std::invalid_argument("permute_subsystems: permutation length must match subsystem count");
    }
    detail::check_subsystem_list(space, perm, "permute_subsystems");

    std::vector<int> new_dims(perm.size());
    for (int k = 0; k < n; ++k) new_dims[static_cast<std::size_t>(k)] = space.dim(perm[static_cast<std::size_t>(k)]);
    HilbertSpace new_space(new_dims);

    // new_stride_of_old[j] = stride in the new space of old subsystem j
    std::vector<std::int64_t> new_stride_of_old(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) {
        new_stride_of_old[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = new_space.stride(k);
    }

    std::vector<std::int64_t> map(static_cast<std::size_t>(space.total_dim()), 0);
    for (std::int64_t old_idx = 0; old_idx < space.total_dim(); ++old_idx) {
        std::int64_t rem = old_idx;
        std::int64_t new_idx = 0;
        for (int j = 0; j < n; ++j) {
            const std::int64_t s = space.stride(j);
            const std::int64_t digit = rem / s;
            rem %= s;
            new_idx += digit * new_stride_of_old[static_cast<std::size_t>(j)];
        }
        map[static_cast<std::size_t>(old_idx)] = new_idx;
    }
    return map;
}

HilbertSpace permuted_space(const HilbertSpace& space, const std::vector<int>& perm) {
    std::vector<int> new_dims(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) new_dims[k] = space.dim(perm[k]);
    return HilbertSpace(new_dims);
}

}  // namespace

ComplexVector permute_subsystems(const ComplexVector& v, const std::vector<int>& perm) {
    const auto map = permutation_index_map(v.space, perm);
    Vector out(v.dim());
    for (std::int64_t i = 0; i < v.dim(); ++i) {
        out(map[static_cast<std::size_t>(i)]) = v.vec(i);
    }
    return ComplexVector(permuted_space(v.space, perm), std::move(out));
}

ComplexOperator permute_subsystems(const ComplexOperator& op, const std::vector<int>& perm) {
    const auto map = permutation_index_map(op.space, perm);
    Matrix out(op.dim(), op.dim());
    for (std::int64_t i = 0; i < op.dim(); ++i) {
        for (std::int64_t j = 0; j < op.dim(); ++j) {
            out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = op.mat(i, j);
        }
    }
    return ComplexOperator(permuted_space(op.space, perm), std::move(out));
}

ComplexVector apply_on_subsystems(const ComplexVector& v, const Matrix& op, const std::vector<int>& targets) {
    detail::check_subsystem_list(v.space, targets, "apply_on_subsystems");

    std::int64_t dt = 1;
    for (int k : targets) dt *= v.space.dim(k);
    if (op.rows() != dt || op.cols() != dt) {
        throw std::invalid_argument("apply_on_subsystems: operator dimension must equal the product of target dims");
    }
    const std::int64_t dr = v.dim() / dt;

    std::vector<int> targets_sorted = targets;
    std::sort(targets_sorted.begin(), targets_sorted.end());
    const std::vector<int> rest = detail::complement(v.space.subsystem_count(), targets_sorted);

    const auto target_off = detail::subset_offsets(v.space, targets);
    const auto rest_off = detail::subset_offsets(v.space, rest);

    // Gather into (rest x target) layout, multiply by op^T on the right,
    // scatter back. Equivalent to (op on targets (x) identity) * v.
    Matrix gathered(dr, dt);
    for (std::int64_t r = 0; r < dr; ++r) {
        for (std::int64_t t = 0; t < dt; ++t) {
            gathered(r, t) = v.vec(rest_off[static_cast<std::size_t>(r)] + target_off[static_cast<std::size_t>(t)]);
        }
    }
    Matrix result = gathered * op.transpose();
    Vector out(v.dim());
    for (std::int64_t r = 0; r < dr; ++r) {
        for (std::int64_t t = 0; t < dt; ++t) {
            out(rest_off[static_cast<std::size_t>(r)] + target_off[static_cast<std::size_t>(t)]) = result(r, t);
        }
    }
    return ComplexVector(v.space, std::move(out));
}

ComplexOperator support_projector(const ComplexOperator& op, double tol) {
    const double asymmetry = (op.mat - op.mat.adjoint()).cwiseAbs().maxCoeff();
    if (asymmetry > tol) {
        throw std::invalid_argument("support_projector: input is not Hermitian within tolerance");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(op.mat);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("support_projector: eigendecomposition failed");
    }

    std::vector<std::int64_t> kept;
    for (std::int64_t i = 0; i < op.dim(); ++i) {
        if (solver.eigenvalues()(i) > tol) kept.push_back(i);
    }
    Matrix basis(op.dim(), static_cast<std::int64_t>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        basis.col(static_cast<std::int64_t>(c)) = solver.eigenvectors().col(kept[c]);
    }
    return ComplexOperator(op.space, basis * basis.adjoint());
}

}  // namespace densecode

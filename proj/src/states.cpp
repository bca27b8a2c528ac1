#include "densecode/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace densecode {

namespace {

constexpr double kSpectrumFloor = 1e-12;
constexpr double kEigenNegativityTol = 1e-10;

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
    }
    return solver;
}

Matrix psd_sqrt(const Matrix& m, const char* what) {
    auto solver = eigensolve(m, what);
    Eigen::VectorXd vals = solver.eigenvalues();
    // sqrt amplifies eigenvalue noise near zero; floor it relative to the top
    const double floor = 1e-14 * std::max(1e-300, vals.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        vals(i) = (vals(i) > floor) ? std::sqrt(vals(i)) : 0.0;
    }
    return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

PureState::PureState(ComplexVector v) : vector_(std::move(v)) {
    const double norm = vector_.vec.norm();
    if (std::abs(norm - 1.0) > kStateNormTol) {
        throw std::invalid_argument("PureState: vector is not normalized within tolerance");
    }
}

DensityOperator::DensityOperator(ComplexOperator op) : operator_(std::move(op)) {
    const Matrix& m = operator_.mat;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
        throw std::invalid_argument("DensityOperator: not Hermitian within tolerance");
    }
    if (std::abs(m.trace().real() - 1.0) > kHermitianTol || std::abs(m.trace().imag()) > kHermitianTol) {
        throw std::invalid_argument("DensityOperator: trace is not 1 within tolerance");
    }
    auto solver = eigensolve(m, "DensityOperator");
    if (solver.eigenvalues().minCoeff() < -kEigenNegativityTol) {
        throw std::invalid_argument("DensityOperator: negative eigenvalue beyond tolerance");
    }
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
    Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
    return DensityOperator(ComplexOperator(psi.space(), std::move(m)));
}

Eigen::VectorXd DensityOperator::spectrum() const {
    auto solver = eigensolve(operator_.mat, "DensityOperator::spectrum");
    Eigen::VectorXd vals = detail::clean_spectrum(solver.eigenvalues());
    std::sort(vals.data(), vals.data() + vals.size(), std::greater<double>());
    return vals;
}

namespace detail {

Eigen::VectorXd clean_spectrum(const Eigen::VectorXd& raw) {
    if (raw.size() && raw.minCoeff() < -kEigenNegativityTol) {
        throw std::invalid_argument("spectrum: negative eigenvalue beyond tolerance");
    }
    Eigen::VectorXd vals = raw.cwiseMax(0.0);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < kSpectrumFloor) vals(i) = 0.0;
    }
    const double sum = vals.sum();
    if (sum > 0.0) vals /= sum;
    return vals;
}

double entropy_of_spectrum(const Eigen::VectorXd& spectrum) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        const double p = spectrum(i);
        if (p > 0.0) s -= p * std::log2(p);
    }
    return s;
}

}  // namespace detail

SchmidtDecomposition schmidt_decompose(const PureState& psi, const std::vector<int>& cut) {
    const HilbertSpace& space = psi.space();
    detail::check_subsystem_list(space, cut, "schmidt_decompose");
    if (cut.empty() || static_cast<int>(cut.size()) >= space.subsystem_count()) {
        throw std::invalid_argument("schmidt_decompose: cut must be a proper nonempty subsystem subset");
    }

    std::vector<int> left = cut;
    std::sort(left.begin(), left.end());
    std::vector<int> right = detail::complement(space.subsystem_count(), left);

    std::vector<int> perm = left;
    perm.insert(perm.end(), right.begin(), right.end());
    ComplexVector arranged = permute_subsystems(psi.vector(), perm);

    std::vector<int> left_dims, right_dims;
    for (int k : left) left_dims.push_back(space.dim(k));
    for (int k : right) right_dims.push_back(space.dim(k));
    HilbertSpace left_space(left_dims), right_space(right_dims);

    const std::int64_t dl = left_space.total_dim();
    const std::int64_t dr = right_space.total_dim();
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
        arranged.vec.data(), dl, dr);

    Eigen::JacobiSVD<Matrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);

    SchmidtDecomposition out{svd.singularValues(), {}, {}, left_space, right_space};
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        out.left_basis.push_back(svd.matrixU().col(i));
        out.right_basis.push_back(svd.matrixV().col(i).conjugate());
    }
    return out;
}

double von_neumann_entropy(const DensityOperator& rho) {
    return detail::entropy_of_spectrum(rho.spectrum());
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    if (rho.space() != sigma.space()) {
        throw std::invalid_argument("fidelity: states live on different spaces");
    }
    const Matrix root = psd_sqrt(rho.matrix(), "fidelity");
    const Matrix inner = root * sigma.matrix() * root;
    auto solver = eigensolve((inner + inner.adjoint()) / 2.0, "fidelity");
    const double floor = 1e-14 * std::max(1e-300, solver.eigenvalues().cwiseAbs().maxCoeff());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (solver.eigenvalues()(i) > floor) sum += std::sqrt(solver.eigenvalues()(i));
    }
    return std::min(1.0, sum * sum);
}

PureState maximally_entangled(int d) {
    if (d < 1) throw std::invalid_argument("maximally_entangled: d must be >= 1");
    Vector v = Vector::Zero(static_cast<std::int64_t>(d) * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i) {
        v(static_cast<std::int64_t>(i) * d + i) = amp;
    }
    return PureState(ComplexVector(HilbertSpace({d, d}), std::move(v)));
}

bool majorizes(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    constexpr double tol = 1e-9;
    auto prepare = [](const Eigen::VectorXd& v, Eigen::Index len) {
        std::vector<double> out(static_cast<std::size_t>(len), 0.0);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            double x = v(i);
            if (x < -1e-10) throw std::invalid_argument("majorizes: negative entry");
            out[static_cast<std::size_t>(i)] = std::max(0.0, x);
        }
        std::sort(out.begin(), out.end(), std::greater<double>());
        return out;
    };
    const Eigen::Index len = std::max(p.size(), q.size());
    const auto ps = prepare(p, len);
    const auto qs = prepare(q, len);

    double sp = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        sp += ps[k];
        sq += qs[k];
        if (sp < sq - tol) return false;
    }
    return true;
}

DensityOperator reduced_density(const PureState& psi, const std::vector<int>& keep) {
    const HilbertSpace& space = psi.space();
    detail::check_subsystem_list(space, keep, "reduced_density");

    std::vector<int> keep_sorted = keep;
    std::sort(keep_sorted.begin(), keep_sorted.end());
    const std::vector<int> rest = detail::complement(space.subsystem_count(), keep_sorted);

    std::vector<int> perm = rest;
    perm.insert(perm.end(), keep_sorted.begin(), keep_sorted.end());
    ComplexVector arranged = permute_subsystems(psi.vector(), perm);

    std::vector<int> keep_dims;
    std::int64_t dk = 1;
    for (int k : keep_sorted) {
        keep_dims.push_back(space.dim(k));
        dk *= space.dim(k);
    }
    const std::int64_t dr = space.total_dim() / dk;

    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
        arranged.vec.data(), dr, dk);
    // rho[k, k'] = sum_r amp[r, k] conj(amp[r, k'])
    Matrix rho = amp.transpose() * amp.conjugate();
    rho = (rho + Matrix(rho.adjoint())) / 2.0;
    return DensityOperator(ComplexOperator(HilbertSpace(keep_dims), std::move(rho)));
}

double trace_norm_distance(const Matrix& rho, const Matrix& sigma) {
    auto solver = eigensolve(rho - sigma, "trace_norm_distance");
    return solver.eigenvalues().cwiseAbs().sum();
}

UhlmannResult closest_maximally_entangled_purification(const PureState& psi_prime,
                                                       const std::vector<int>& b_cut) {
    const HilbertSpace& space = psi_prime.space();
    detail::check_subsystem_list(space, b_cut, "closest_maximally_entangled_purification");
    if (b_cut.empty() || static_cast<int>(b_cut.size()) >= space.subsystem_count()) {
        throw std::invalid_argument("closest_maximally_entangled_purification: cut must be proper and nonempty");
    }

    std::vector<int> b_sorted = b_cut;
    std::sort(b_sorted.begin(), b_sorted.end());
    const std::vector<int> rest = detail::complement(space.subsystem_count(), b_sorted);

    std::int64_t d_b = 1;
    for (int k : b_sorted) d_b *= space.dim(k);
    const std::int64_t d_rest = space.total_dim() / d_b;
    if (d_rest < d_b) {
        throw std::invalid_argument(
            "closest_maximally_entangled_purification: rest side is too small to purify I/d_B");
    }

    std::vector<int> perm = rest;
    perm.insert(perm.end(), b_sorted.begin(), b_sorted.end());
    ComplexVector arranged = permute_subsystems(psi_prime.vector(), perm);

    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
        arranged.vec.data(), d_rest, d_b);

    Eigen::JacobiSVD<Matrix> svd(amp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix polar = svd.matrixU() * svd.matrixV().adjoint();  // d_rest x d_b isometry
    const double overlap = svd.singularValues().sum() / std::sqrt(static_cast<double>(d_b));

    Vector phi(space.total_dim());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_b));
    for (std::int64_t r = 0; r < d_rest; ++r) {
        for (std::int64_t b = 0; b < d_b; ++b) {
            phi(r * d_b + b) = polar(r, b) * scale;
        }
    }
    ComplexVector arranged_phi(arranged.space, std::move(phi));

    // undo the (rest..., b...) arrangement
    std::vector<int> inverse(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inverse[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
    ComplexVector restored = permute_subsystems(arranged_phi, inverse);
    Vector v = restored.vec;
    v /= v.norm();
    return UhlmannResult{PureState(ComplexVector(space, std::move(v))), overlap};
}

}  // namespace densecode

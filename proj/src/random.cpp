#include "densecode/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace densecode {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

Prng::Prng(Seed s) {
    // mix seed and stream into one key; streams must not collide for
    // adjacent seeds, hence the double finalize
    key_ = splitmix_finalize(splitmix_finalize(s.seed + kGolden) ^ (s.stream + kGolden));
}

std::uint64_t Prng::next_u64() {
    counter_ += 1;
    return splitmix_finalize(key_ + counter_ * kGolden);
}

double Prng::next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Prng::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Complex Prng::next_complex_normal() {
    const double invsqrt2 = std::numbers::sqrt2 / 2.0;
    const double re = next_normal() * invsqrt2;
    const double im = next_normal() * invsqrt2;
    return Complex(re, im);
}

Matrix haar_isometry(int d, int r, Seed seed) {
    if (d < 1 || r < 1 || r > d) {
        throw std::invalid_argument("haar_isometry: need 1 <= r <= d");
    }
    Prng rng(seed);
    Matrix ginibre(d, r);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < r; ++j) {
            ginibre(i, j) = rng.next_complex_normal();
        }
    }
    Eigen::HouseholderQR<Matrix> qr(ginibre);
    Matrix q = qr.householderQ() * Matrix::Identity(d, r);
    Matrix rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int j = 0; j < r; ++j) {
        const Complex diag = rmat(j, j);
        const double mag = std::abs(diag);
        q.col(j) *= (mag > 0.0) ? diag / mag : Complex(1.0, 0.0);
    }
    return q;
}

ComplexOperator haar_unitary(int d, Seed seed) {
    if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
    return ComplexOperator(HilbertSpace({d}), haar_isometry(d, d, seed));
}

PureState haar_state(const HilbertSpace& space, Seed seed) {
    Prng rng(seed);
    Vector v(space.total_dim());
    for (std::int64_t i = 0; i < space.total_dim(); ++i) {
        v(i) = rng.next_complex_normal();
    }
    v /= v.norm();
    return PureState(ComplexVector(space, std::move(v)));
}

namespace detail {

Eigen::VectorXd waterfill_spectrum(Eigen::VectorXd descending, double cap) {
    const Eigen::Index k = descending.size();
    for (Eigen::Index capped = 0; capped <= k; ++capped) {
        const double mass = 1.0 - static_cast<double>(capped) * cap;
        double tail = 0.0;
        for (Eigen::Index i = capped; i < k; ++i) tail += descending(i);

        if (capped == k || tail <= 0.0) {
            if (mass > 1e-12) break;  // cannot place the remaining mass
            Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
            for (Eigen::Index i = 0; i < capped; ++i) out(i) = cap;
            return out;
        }
        const double scale = mass / tail;
        if (descending(capped) * scale <= cap + 1e-12) {
            Eigen::VectorXd out = descending;
            for (Eigen::Index i = 0; i < capped; ++i) out(i) = cap;
            for (Eigen::Index i = capped; i < k; ++i) out(i) = descending(i) * scale;
            out /= out.sum();
            return out.cwiseMin(cap);
        }
    }
    throw std::invalid_argument("waterfill_spectrum: cap * length < 1, infeasible");
}

}  // namespace detail

PureState bounded_schmidt_state(int d_A1, int d_S, double lambda_max, Seed seed) {
    if (d_A1 < 1 || d_S < 1) {
        throw std::invalid_argument("bounded_schmidt_state: dimensions must be >= 1");
    }
    if (lambda_max > 1.0 + 1e-12 || lambda_max < 1.0 / static_cast<double>(d_S) - 1e-12) {
        throw std::invalid_argument("bounded_schmidt_state: need 1/d_S <= lambda_max <= 1");
    }
    const int needed = static_cast<int>(std::ceil(1.0 / lambda_max - 1e-9));
    if (d_A1 < needed) {
        throw std::invalid_argument("bounded_schmidt_state: d_A1 < ceil(1/lambda_max), infeasible");
    }

    PureState raw = haar_state(HilbertSpace({d_A1, d_S}), seed);
    SchmidtDecomposition schmidt = schmidt_decompose(raw, {0});

    Eigen::VectorXd spectrum = schmidt.coefficients.array().square();
    spectrum /= spectrum.sum();
    Eigen::VectorXd filled = detail::waterfill_spectrum(spectrum, std::min(1.0, lambda_max));

    Vector v = Vector::Zero(static_cast<std::int64_t>(d_A1) * d_S);
    for (Eigen::Index i = 0; i < filled.size(); ++i) {
        const double coeff = std::sqrt(filled(i));
        if (coeff == 0.0) continue;
        for (int a = 0; a < d_A1; ++a) {
            for (int s = 0; s < d_S; ++s) {
                v(static_cast<std::int64_t>(a) * d_S + s) +=
                    coeff * schmidt.left_basis[static_cast<std::size_t>(i)](a) *
                    schmidt.right_basis[static_cast<std::size_t>(i)](s);
            }
        }
    }
    v /= v.norm();
    return PureState(ComplexVector(HilbertSpace({d_A1, d_S}), std::move(v)));
}

}  // namespace densecode

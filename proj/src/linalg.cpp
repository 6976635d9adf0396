#include "chanest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chanest {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

RealVector realify_vec(const ComplexVector& z) {
    const std::size_t n = z.size();
    RealVector out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = z[i].real();
        out[n + i] = z[i].imag();
    }
    return out;
}

RealMatrix realify_mat(const ComplexMatrix& z) {
    const std::size_t r = z.rows(), c = z.cols();
    RealMatrix out(2 * r, 2 * c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double re = z(i, j).real(), im = z(i, j).imag();
            out(i, j) = re;
            out(i, c + j) = -im;
            out(r + i, j) = im;
            out(r + i, c + j) = re;
        }
    }
    return out;
}

RealVector realify_cols(const ComplexMatrix& z) {
    const std::size_t r = z.rows(), c = z.cols();
    RealVector out;
    out.reserve(2 * r * c);
    for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t i = 0; i < r; ++i) out.push_back(z(i, j).real());
        for (std::size_t i = 0; i < r; ++i) out.push_back(z(i, j).imag());
    }
    return out;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
    RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

RealMatrix transpose(const RealMatrix& a) {
    RealMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
    require(a.cols() == b.rows(), "matmul: inner dimensions differ");
    RealMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

RealVector matvec(const RealMatrix& a, const RealVector& x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    RealVector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

double dot(const RealVector& a, const RealVector& b) {
    require(a.size() == b.size(), "dot: dimension mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2_sq(const RealVector& a) { return dot(a, a); }

RealMatrix build_sensing_matrix(const ComplexMatrix& x, std::size_t n_rx) {
    const RealMatrix xt_bar = realify_mat(transpose(x));  // 2T x 2M
    return kron(RealMatrix::identity(n_rx), xt_bar);
}

ComplexMatrix sample_covariance(const ComplexMatrix& x) {
    const std::size_t m = x.rows(), t = x.cols();
    require(t > 0, "sample_covariance: empty pilot");
    ComplexMatrix r(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::complex<double> acc = 0.0;
            for (std::size_t k = 0; k < t; ++k) acc += x(i, k) * std::conj(x(j, k));
            r(i, j) = acc / static_cast<double>(t);
        }
    return r;
}

RealMatrix sample_covariance_realified(const ComplexMatrix& x) {
    const RealMatrix xt_bar = realify_mat(transpose(x));  // 2T x 2M
    RealMatrix r = matmul(transpose(xt_bar), xt_bar);
    const double scale = 1.0 / (2.0 * static_cast<double>(x.cols()));
    for (double& v : r.data()) v *= scale;
    return r;
}

SvdResult jacobi_svd(const RealMatrix& a) {
    // One-sided Jacobi on a tall working copy: orthogonalize column pairs
    // until convergence, then read singular values off the column norms.
    const bool wide = a.rows() < a.cols();
    RealMatrix b = wide ? transpose(a) : a;
    const std::size_t r = b.rows(), c = b.cols();
    RealMatrix v = RealMatrix::identity(c);

    auto col_dot = [&](std::size_t p, std::size_t q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < r; ++i) acc += b(i, p) * b(i, q);
        return acc;
    };

    const double eps = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < c; ++p) {
            for (std::size_t q = p + 1; q < c; ++q) {
                const double app = col_dot(p, p);
                const double aqq = col_dot(q, q);
                const double apq = col_dot(p, q);
                if (std::abs(apq) <= eps * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < r; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    b(i, p) = cs * bp - sn * bq;
                    b(i, q) = sn * bp + cs * bq;
                }
                for (std::size_t i = 0; i < c; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = cs * vp - sn * vq;
                    v(i, q) = sn * vp + cs * vq;
                }
            }
        }
        if (!rotated) break;
    }

    RealVector sigma(c);
    for (std::size_t j = 0; j < c; ++j) sigma[j] = std::sqrt(col_dot(j, j));

    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out;
    out.sigma.resize(c);
    out.u = RealMatrix(r, c);
    out.v = RealMatrix(c, c);
    for (std::size_t j = 0; j < c; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sigma[src];
        const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
        for (std::size_t i = 0; i < r; ++i) out.u(i, j) = b(i, src) * inv;
        for (std::size_t i = 0; i < c; ++i) out.v(i, j) = v(i, src);
    }
    if (wide) std::swap(out.u, out.v);
    return out;
}

RealVector singular_values(const RealMatrix& a) { return jacobi_svd(a).sigma; }

RealMatrix pinv(const RealMatrix& a) {
    if (a.rows() < a.cols())
        throw RankError("pinv: matrix has more columns than rows (not full column rank)");
    const SvdResult svd = jacobi_svd(a);
    const double sigma_max = svd.sigma.empty() ? 0.0 : svd.sigma.front();
    const double tol =
        1e-12 * sigma_max * static_cast<double>(std::max(a.rows(), a.cols()));
    if (svd.sigma.empty() || svd.sigma.back() <= tol)
        throw RankError("pinv: rank-deficient matrix (sigma_min below tolerance)");
    // A+ = V diag(1/sigma) U^T
    RealMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < svd.sigma.size(); ++k)
                acc += svd.v(i, k) * svd.u(j, k) / svd.sigma[k];
            out(i, j) = acc;
        }
    return out;
}

RealVector symmetric_eigenvalues(const RealMatrix& s) {
    require(s.rows() == s.cols(), "symmetric_eigenvalues: matrix not square");
    const std::size_t n = s.rows();
    RealMatrix a = s;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = cs * aip - sn * aiq;
                    a(i, q) = sn * aip + cs * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = cs * api - sn * aqi;
                    a(q, i) = sn * api + cs * aqi;
                }
            }
        }
    }

    RealVector eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

Cholesky cholesky(const RealMatrix& s) {
    require(s.rows() == s.cols(), "cholesky: matrix not square");
    const std::size_t n = s.rows();
    Cholesky f;
    f.lower = RealMatrix(n, n);
    f.log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = s(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= f.lower(i, k) * f.lower(j, k);
            if (i == j) {
                if (acc <= 0.0) throw std::domain_error("cholesky: matrix not positive definite");
                f.lower(i, i) = std::sqrt(acc);
                f.log_det += 2.0 * std::log(f.lower(i, i));
            } else {
                f.lower(i, j) = acc / f.lower(j, j);
            }
        }
    }
    return f;
}

RealVector cholesky_solve(const Cholesky& f, const RealVector& rhs) {
    const std::size_t n = f.lower.rows();
    require(rhs.size() == n, "cholesky_solve: dimension mismatch");
    RealVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = rhs[i];
        for (std::size_t k = 0; k < i; ++k) acc -= f.lower(i, k) * y[k];
        y[i] = acc / f.lower(i, i);
    }
    RealVector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= f.lower(k, ii) * x[k];
        x[ii] = acc / f.lower(ii, ii);
    }
    return x;
}

RealMatrix cholesky_inverse(const Cholesky& f) {
    const std::size_t n = f.lower.rows();
    RealMatrix out(n, n);
    RealVector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const RealVector col = cholesky_solve(f, e);
        for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
        e[j] = 0.0;
    }
    return out;
}

}  // namespace chanest

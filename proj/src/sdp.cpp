#include "hybridsm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hsm {

namespace {

void require_hermitian(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square");
    }
    const double scale = std::max(1.0, a.norm());
    if ((a - a.adjoint()).norm() > 1e-12 * scale * a.rows()) {
        throw std::invalid_argument(std::string(what) + ": matrix must be Hermitian");
    }
}

/// Project eigenvalues onto {lam >= 0, sum(lam) = c}: lam_i = max(lam_i - tau, 0)
/// with the water level tau fixed by the sum constraint.
RVector project_simplex_scaled(RVector lam, double c) {
    std::vector<double> sorted(lam.data(), lam.data() + lam.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0;
    double tau = (std::accumulate(sorted.begin(), sorted.end(), 0.0) - c) / sorted.size();
    for (size_t r = 0; r < sorted.size(); ++r) {
        cum += sorted[r];
        const double t = (cum - c) / static_cast<double>(r + 1);
        if (r + 1 == sorted.size() || sorted[r + 1] - t <= 0.0) {
            tau = t;
            break;
        }
    }
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        lam(i) = std::max(lam(i) - tau, 0.0);
    }
    return lam;
}

/// Exact solution of min Tr(CX) + (rho/2)||X - X0||^2 s.t. Tr(X) = c, X >= 0.
SdpSolution solve_proximal(const SdpProblem& p) {
    const double rho = p.prox_weight;
    const double c = p.trace_constraints[0].second;
    const CMatrix target = p.prox_center - p.cost / rho;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (target + target.adjoint()));
    const RVector lam = project_simplex_scaled(es.eigenvalues(), c);
    SdpSolution sol;
    sol.x = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    sol.x = 0.5 * (sol.x + sol.x.adjoint()).eval();
    sol.objective = (p.cost * sol.x).trace().real() +
                    0.5 * rho * (sol.x - p.prox_center).squaredNorm();
    sol.residual = std::abs(sol.x.trace().real() - c);
    sol.iterations = 1;
    return sol;
}

double max_psd_step(const CMatrix& x, const CMatrix& dx) {
    // largest alpha with x + alpha*dx >= 0, via I + alpha * L^-1 dx L^-H.
    Eigen::LLT<CMatrix> llt(x);
    if (llt.info() != Eigen::Success) {
        return 0.0;
    }
    CMatrix t = llt.matrixL().solve(dx);
    t = llt.matrixL().solve(t.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues()(0);
    if (lam_min >= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -1.0 / lam_min;
}

}  // namespace

RMatrix real_embed(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a.real();
    out.topRightCorner(n, n) = -a.imag();
    out.bottomLeftCorner(n, n) = a.imag();
    out.bottomRightCorner(n, n) = a.real();
    return out;
}

CMatrix real_unembed(const RMatrix& a) {
    const Eigen::Index n = a.rows() / 2;
    CMatrix out(n, n);
    out.real() = 0.5 * (a.topLeftCorner(n, n) + a.bottomRightCorner(n, n));
    out.imag() = 0.5 * (a.bottomLeftCorner(n, n) - a.topRightCorner(n, n));
    return out;
}

SdpSolution solve(const SdpProblem& p, double tol, int max_iter) {
    if (p.dim < 1 || p.dim > 64) {
        throw std::invalid_argument("sdp::solve: dim must be in [1, 64]");
    }
    require_hermitian(p.cost, "sdp cost");
    for (const auto& [a, b] : p.trace_constraints) {
        require_hermitian(a, "sdp constraint");
    }

    if (p.prox_weight > 0.0) {
        const bool identity_trace =
            p.trace_constraints.size() == 1 &&
            (p.trace_constraints[0].first - CMatrix::Identity(p.dim, p.dim)).norm() < 1e-12 * p.dim;
        if (!identity_trace) {
            throw std::invalid_argument(
                "sdp::solve: proximal problems support exactly one Tr(X)=c constraint");
        }
        return solve_proximal(p);
    }

    // Complex Hermitian -> real symmetric embedding; inner products double.
    // Constraints and cost are normalized to unit Frobenius norm to keep the
    // Schur system well conditioned.
    const int n = 2 * p.dim;
    const int m = static_cast<int>(p.trace_constraints.size());
    RMatrix c_r = real_embed(p.cost);
    const double cost_scale = std::max(1e-12, c_r.norm());
    c_r /= cost_scale;
    std::vector<RMatrix> a_r(m);
    RVector b(m);
    for (int k = 0; k < m; ++k) {
        a_r[k] = real_embed(p.trace_constraints[k].first);
        const double s = std::max(1e-12, a_r[k].norm());
        a_r[k] /= s;
        b(k) = 2.0 * p.trace_constraints[k].second / s;
    }

    auto solution_from = [&](const RMatrix& x_r, int iters,
                             std::vector<SdpIterStat> trace) {
        // average out the embedding asymmetry: J X J^T with J = [[0,-I],[I,0]]
        const Eigen::Index h = p.dim;
        RMatrix sym(n, n);
        sym.topLeftCorner(h, h) = x_r.bottomRightCorner(h, h);
        sym.topRightCorner(h, h) = -x_r.bottomLeftCorner(h, h);
        sym.bottomLeftCorner(h, h) = -x_r.topRightCorner(h, h);
        sym.bottomRightCorner(h, h) = x_r.topLeftCorner(h, h);
        SdpSolution sol;
        sol.x = real_unembed(0.5 * (x_r + sym));
        sol.x = (0.5 * (sol.x + sol.x.adjoint())).eval();
        // boundary iterates can dip a hair below the cone after unembedding
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.x);
        if (es.eigenvalues()(0) < 0.0) {
            sol.x = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                    es.eigenvectors().adjoint();
        }
        sol.objective = (p.cost * sol.x).trace().real();
        sol.residual = 0.0;
        for (const auto& [a, rhs] : p.trace_constraints) {
            sol.residual = std::max(sol.residual, std::abs((a * sol.x).trace().real() - rhs));
        }
        sol.iterations = iters;
        sol.trace = std::move(trace);
        return sol;
    };

    double b_scale = 1.0;
    for (int k = 0; k < m; ++k) {
        b_scale = std::max(b_scale, std::abs(b(k)) / n);
    }
    RMatrix x = b_scale * RMatrix::Identity(n, n);
    RMatrix z = std::max(1.0, c_r.norm() / std::sqrt(static_cast<double>(n))) *
                RMatrix::Identity(n, n);
    RVector y = RVector::Zero(m);

    std::vector<SdpIterStat> stats;
    const double b_norm = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    const double c_norm = 1.0 + c_r.norm();

    auto record = [&](int it) {
        SdpIterStat s;
        s.iter = it;
        s.primal_obj = 0.5 * (c_r * x).trace();
        s.dual_obj = 0.5 * b.dot(y);
        s.gap = 0.5 * (x * z).trace();
        RMatrix rd = c_r - z;
        double rp = 0.0;
        for (int k = 0; k < m; ++k) {
            rd -= y(k) * a_r[k];
            rp = std::max(rp, std::abs(b(k) - (a_r[k] * x).trace()));
        }
        s.primal_res = rp;
        s.dual_res = rd.norm();
        stats.push_back(s);
        return s;
    };

    RMatrix x_best = x;
    double merit_best = std::numeric_limits<double>::infinity();
    int stalled = 0;

    int it = 0;
    for (; it < max_iter; ++it) {
        const SdpIterStat s = record(it);
        const double obj_scale = 1.0 + std::abs(s.primal_obj);
        const double merit = std::max({s.primal_res / b_norm, s.dual_res / c_norm,
                                       s.gap / obj_scale});
        if (merit < merit_best) {
            merit_best = merit;
            x_best = x;
            stalled = 0;
        } else if (++stalled > 20) {
            break;
        }
        if (s.primal_res <= tol * b_norm && s.dual_res <= tol * c_norm &&
            s.gap <= tol * obj_scale) {
            return solution_from(x, it, std::move(stats));
        }

        const double mu = (x * z).trace() / n;
        if (!std::isfinite(mu) || mu > 1e14 || (m > 0 && y.cwiseAbs().maxCoeff() > 1e12)) {
            SdpSolution best = solution_from(x_best, it, std::move(stats));
            throw SdpFailure("sdp::solve: iterates diverged, problem appears infeasible",
                             std::move(best));
        }
        Eigen::LLT<RMatrix> z_llt(z);
        if (z_llt.info() != Eigen::Success) {
            break;
        }
        const RMatrix zi = z_llt.solve(RMatrix::Identity(n, n));
        RMatrix rd = c_r - z;
        RVector rp(m);
        for (int k = 0; k < m; ++k) {
            rd -= y(k) * a_r[k];
        }
        for (int k = 0; k < m; ++k) {
            rp(k) = b(k) - (a_r[k] * x).trace();
        }

        // Schur complement M_kj = <A_k, Zi A_j X>
        RMatrix schur(m, m);
        std::vector<RMatrix> zi_aj_x(m);
        for (int j = 0; j < m; ++j) {
            zi_aj_x[j] = zi * a_r[j] * x;
        }
        for (int k = 0; k < m; ++k) {
            for (int j = 0; j < m; ++j) {
                schur(k, j) = (a_r[k] * zi_aj_x[j]).trace();
            }
        }
        Eigen::FullPivLU<RMatrix> schur_lu(schur);
        if (!schur_lu.isInvertible()) {
            break;
        }
        const RMatrix zi_rd_x = zi * rd * x;

        auto newton = [&](double sigma, const RMatrix& corr) {
            RVector rhs(m);
            for (int k = 0; k < m; ++k) {
                rhs(k) = rp(k) + (a_r[k] * x).trace() + (a_r[k] * zi_rd_x).trace() +
                         (a_r[k] * (zi * corr)).trace() - sigma * mu * (a_r[k] * zi).trace();
            }
            const RVector dy = schur_lu.solve(rhs);
            RMatrix dz = rd;
            for (int k = 0; k < m; ++k) {
                dz -= dy(k) * a_r[k];
            }
            RMatrix dx = sigma * mu * zi - x - zi * corr - zi * dz * x;
            dx = 0.5 * (dx + dx.transpose()).eval();
            return std::make_pair(dx, std::make_pair(dz, dy));
        };

        // Mehrotra predictor-corrector.
        auto [dx_p, rest_p] = newton(0.0, RMatrix::Zero(n, n));
        auto& [dz_p, dy_p] = rest_p;
        (void)dy_p;
        const double tau = 0.98;
        double ap = std::min(1.0, tau * max_psd_step(x, dx_p));
        double ad = std::min(1.0, tau * max_psd_step(z, dz_p));
        const double mu_aff =
            ((x + ap * dx_p) * (z + ad * dz_p)).trace() / n;
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        auto [dx, rest] = newton(sigma, dz_p * dx_p);
        auto& [dz, dy] = rest;
        ap = std::min(1.0, tau * max_psd_step(x, dx));
        ad = std::min(1.0, tau * max_psd_step(z, dz));
        if (ap < 1e-12 && ad < 1e-12) {
            break;
        }
        x += ap * dx;
        z += ad * dz;
        y += ad * dy;
    }

    SdpSolution best = solution_from(x_best, it, std::move(stats));
    throw SdpFailure("sdp::solve: no convergence after " + std::to_string(it) +
                         " iterations (residual " + std::to_string(best.residual) + ")",
                     std::move(best));
}

RankOneExtract rank_one_extract(const CMatrix& x) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()));
    const Eigen::Index n = x.rows();
    const double lam1 = std::max(0.0, es.eigenvalues()(n - 1));
    RankOneExtract out;
    out.q = std::sqrt(lam1) * es.eigenvectors().col(n - 1);
    if (n > 1 && lam1 > 0.0) {
        out.defect = std::max(0.0, es.eigenvalues()(n - 2)) / lam1;
    }
    return out;
}

}  // namespace hsm

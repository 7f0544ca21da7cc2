#pragma once

#include "hybridsm/linalg.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace hsm {

/// min Tr(cost * X) [+ (prox_weight/2)*||X - prox_center||_F^2]
/// s.t. Tr(a_k * X) = b_k, X >= 0, over complex Hermitian X of size dim.
struct SdpProblem {
    int dim = 0;
    CMatrix cost;
    std::vector<std::pair<CMatrix, double>> trace_constraints;
    double prox_weight = 0.0;
    CMatrix prox_center;
};

struct SdpIterStat {
    int iter = 0;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
};

struct SdpSolution {
    CMatrix x;
    double objective = 0.0;
    double residual = 0.0;  ///< max constraint violation
    int iterations = 0;
    std::vector<SdpIterStat> trace;
};

/// Carries the best iterate when the solver gives up.
struct SdpFailure : std::runtime_error {
    SdpFailure(const std::string& what, SdpSolution best_so_far)
        : std::runtime_error(what), best(std::move(best_so_far)) {}
    SdpSolution best;
};

/// Interior-point solve for linear-cost problems; exact spectral projection
/// for proximal problems with a single Tr(X) = c constraint.
SdpSolution solve(const SdpProblem& p, double tol = 1e-8, int max_iter = 100);

struct RankOneExtract {
    CVector q;            ///< sqrt(lambda_max) * v_max
    double defect = 0.0;  ///< lambda_2 / lambda_1
};

RankOneExtract rank_one_extract(const CMatrix& x);

/// Hermitian -> real symmetric embedding [[Re, -Im], [Im, Re]] and its
/// inverse (structure-averaging), exposed for round-trip tests.
RMatrix real_embed(const CMatrix& a);
CMatrix real_unembed(const RMatrix& a);

}  // namespace hsm

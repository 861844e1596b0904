#include "rsfbl/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rsfbl::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::MaxIters: return "max-iters";
        case SolveStatus::Numerical: return "numerical";
    }
    return "?";
}

int ProgramBuilder::add_row(double offset) {
    offsets_.push_back(offset);
    return static_cast<int>(offsets_.size()) - 1;
}

void ProgramBuilder::coeff(int row, int var, double value) {
    if (value == 0.0) return;
    triplets_.emplace_back(row, var, value);
}

void ProgramBuilder::tag_cone(ConeType type, int dim) {
    if (tagged_rows_ + dim > static_cast<int>(offsets_.size())) {
        throw std::logic_error("tag_cone: not enough untagged rows");
    }
    cones_.push_back({type, dim});
    tagged_rows_ += dim;
}

void ProgramBuilder::name_var(int var, std::string name) {
    names_.resize(num_vars_);
    names_[var] = std::move(name);
}

ConicProgram ProgramBuilder::build() const {
    if (tagged_rows_ != static_cast<int>(offsets_.size())) {
        throw std::logic_error("build: rows left untagged");
    }
    ConicProgram p;
    p.objective = objective_;
    p.offset = Eigen::Map<const VectorXd>(offsets_.data(), offsets_.size());
    p.constraints.resize(static_cast<int>(offsets_.size()), num_vars_);
    p.constraints.setFromTriplets(triplets_.begin(), triplets_.end());
    p.cones = cones_;
    p.var_names = names_;
    return p;
}

namespace {

double cone_nu(const ConeSegment& seg) {
    switch (seg.type) {
        case ConeType::NonNeg: return seg.dim;
        case ConeType::Soc:
        case ConeType::RotatedSoc: return 2.0;
        case ConeType::Exp: return 3.0;
        default: return 0.0;
    }
}

bool seg_interior(const ConeSegment& seg, const Eigen::Ref<const VectorXd>& s) {
    switch (seg.type) {
        case ConeType::NonNeg:
            return (s.array() > 0.0).all();
        case ConeType::Soc: {
            if (s[0] <= 0.0) return false;
            double d = s[0] * s[0] - s.tail(seg.dim - 1).squaredNorm();
            return d > 0.0;
        }
        case ConeType::RotatedSoc: {
            if (s[0] <= 0.0 || s[1] <= 0.0) return false;
            double d = 2.0 * s[0] * s[1] - s.tail(seg.dim - 2).squaredNorm();
            return d > 0.0;
        }
        case ConeType::Exp: {
            double a = s[0], b = s[1], c = s[2];
            if (b <= 0.0 || c <= 0.0) return false;
            return b * std::log(c / b) - a > 0.0;
        }
        default:
            return false;
    }
}

// Barrier value, gradient, Hessian of one segment; caller guarantees interior.
void seg_barrier(const ConeSegment& seg, const Eigen::Ref<const VectorXd>& s,
                 double& value, VectorXd& grad, MatrixXd& hess) {
    const int d = seg.dim;
    grad.setZero(d);
    hess.setZero(d, d);
    switch (seg.type) {
        case ConeType::NonNeg: {
            value = 0.0;
            for (int i = 0; i < d; ++i) {
                value -= std::log(s[i]);
                grad[i] = -1.0 / s[i];
                hess(i, i) = 1.0 / (s[i] * s[i]);
            }
            break;
        }
        case ConeType::Soc: {
            double det = s[0] * s[0] - s.tail(d - 1).squaredNorm();
            value = -std::log(det);
            VectorXd gd(d);
            gd[0] = 2.0 * s[0];
            gd.tail(d - 1) = -2.0 * s.tail(d - 1);
            grad = -gd / det;
            hess = gd * gd.transpose() / (det * det);
            hess(0, 0) -= 2.0 / det;
            for (int i = 1; i < d; ++i) hess(i, i) += 2.0 / det;
            break;
        }
        case ConeType::RotatedSoc: {
            double det = 2.0 * s[0] * s[1] - s.tail(d - 2).squaredNorm();
            value = -std::log(det);
            VectorXd gd(d);
            gd[0] = 2.0 * s[1];
            gd[1] = 2.0 * s[0];
            gd.tail(d - 2) = -2.0 * s.tail(d - 2);
            grad = -gd / det;
            hess = gd * gd.transpose() / (det * det);
            hess(0, 1) -= 2.0 / det;
            hess(1, 0) -= 2.0 / det;
            for (int i = 2; i < d; ++i) hess(i, i) += 2.0 / det;
            break;
        }
        case ConeType::Exp: {
            double a = s[0], b = s[1], c = s[2];
            double lg = std::log(c / b);
            double u = b * lg - a;
            value = -std::log(u) - std::log(b) - std::log(c);
            Eigen::Vector3d du(-1.0, lg - 1.0, b / c);
            Eigen::Vector3d g = -du / u;
            g[1] -= 1.0 / b;
            g[2] -= 1.0 / c;
            grad = g;
            Eigen::Matrix3d hu = Eigen::Matrix3d::Zero();
            hu(1, 1) = -1.0 / b;
            hu(1, 2) = 1.0 / c;
            hu(2, 1) = 1.0 / c;
            hu(2, 2) = -b / (c * c);
            Eigen::Matrix3d h = du * du.transpose() / (u * u) - hu / u;
            h(1, 1) += 1.0 / (b * b);
            h(2, 2) += 1.0 / (c * c);
            hess = h;
            break;
        }
        default:
            throw std::logic_error("seg_barrier: zero cone has no barrier");
    }
}

struct BarrierData {
    MatrixXd A;  // barrier rows x reduced vars
    VectorXd b;
    std::vector<ConeSegment> cones;
    std::vector<int> seg_row;  // start row of each segment
    double nu = 0.0;

    bool interior(const VectorXd& s) const {
        for (std::size_t i = 0; i < cones.size(); ++i) {
            if (!seg_interior(cones[i], s.segment(seg_row[i], cones[i].dim))) return false;
        }
        return true;
    }

    double barrier_value(const VectorXd& s) const {
        double v = 0.0;
        VectorXd g;
        MatrixXd h;
        for (std::size_t i = 0; i < cones.size(); ++i) {
            const auto& seg = cones[i];
            double fv;
            seg_barrier(seg, s.segment(seg_row[i], seg.dim), fv, g, h);
            v += fv;
        }
        return v;
    }
};

struct CenterOutcome {
    bool converged = false;
    bool numerical = false;
    int steps = 0;
};

// Damped Newton minimization of t * c.z + F(A z + b), starting from a
// strictly interior z. `early_exit` (when set) stops as soon as it approves
// the current iterate.
template <typename Exit>
CenterOutcome center(const BarrierData& bd, const VectorXd& c, double t, VectorXd& z,
                     int step_budget, Exit early_exit) {
    CenterOutcome out;
    const int n = static_cast<int>(z.size());
    const double cscale = 1.0 + c.cwiseAbs().maxCoeff();
    VectorXd g_seg;
    MatrixXd h_seg;
    for (int it = 0; it < step_budget; ++it) {
        VectorXd s = bd.A * z + bd.b;
        double value = t * c.dot(z);
        VectorXd grad = t * c;
        MatrixXd hess = MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < bd.cones.size(); ++i) {
            const auto& seg = bd.cones[i];
            double fv;
            seg_barrier(seg, s.segment(bd.seg_row[i], seg.dim), fv, g_seg, h_seg);
            value += fv;
            auto As = bd.A.middleRows(bd.seg_row[i], seg.dim);
            grad.noalias() += As.transpose() * g_seg;
            hess.noalias() += As.transpose() * h_seg * As;
        }

        // Newton direction, with a growing ridge on factorization failure.
        VectorXd dir;
        double ridge = 0.0;
        for (;;) {
            MatrixXd h = hess;
            if (ridge > 0.0) h.diagonal().array() += ridge;
            Eigen::LLT<MatrixXd> llt(h);
            if (llt.info() == Eigen::Success) {
                dir = llt.solve(-grad);
                if (dir.allFinite()) break;
            }
            ridge = ridge == 0.0 ? 1e-12 * (1.0 + hess.trace() / n) : ridge * 100.0;
            if (ridge > 1e8) {
                out.numerical = true;
                out.steps = it;
                return out;
            }
        }

        double decrement2 = -grad.dot(dir);
        if (decrement2 * 0.5 < 1e-13 || grad.cwiseAbs().maxCoeff() <= 1e-11 * t * cscale) {
            out.converged = true;
            out.steps = it;
            return out;
        }

        // Backtrack into the interior, then Armijo.
        double alpha = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 120; ++ls) {
            VectorXd zn = z + alpha * dir;
            VectorXd sn = bd.A * zn + bd.b;
            if (bd.interior(sn)) {
                double vn = t * c.dot(zn) + bd.barrier_value(sn);
                if (vn <= value + 0.25 * alpha * grad.dot(dir)) {
                    z = zn;
                    ok = true;
                    break;
                }
            }
            alpha *= 0.5;
            if (alpha < 1e-12) break;
        }
        if (!ok) {
            // No progress possible at this centering accuracy.
            out.converged = true;
            out.steps = it;
            return out;
        }
        if (early_exit(z)) {
            out.converged = true;
            out.steps = it + 1;
            return out;
        }
    }
    out.steps = step_budget;
    return out;
}

}  // namespace

ConicSolution solve_conic(const ConicProgram& program, const SolverOptions& options) {
    const int n = program.num_vars();
    const int m = program.num_rows();
    {
        int rows = 0;
        for (const auto& seg : program.cones) rows += seg.dim;
        if (rows != m) throw std::invalid_argument("solve_conic: cone dims do not sum to rows");
        if (!program.offset.allFinite() || !program.objective.allFinite()) {
            throw std::invalid_argument("solve_conic: non-finite program data");
        }
    }

    ConicSolution sol;
    sol.x = VectorXd::Zero(n);
    sol.y = VectorXd::Zero(m);

    MatrixXd A = MatrixXd(program.constraints);
    const VectorXd& b = program.offset;
    const VectorXd& c = program.objective;
    const double bscale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    const double cscale = 1.0 + (n > 0 ? c.cwiseAbs().maxCoeff() : 0.0);

    // Split zero-cone rows (equalities) from barrier rows.
    std::vector<int> zero_rows, barrier_rows;
    BarrierData bd;
    {
        int row = 0;
        for (const auto& seg : program.cones) {
            if (seg.type == ConeType::Zero) {
                for (int i = 0; i < seg.dim; ++i) zero_rows.push_back(row + i);
            } else {
                bd.seg_row.push_back(static_cast<int>(barrier_rows.size()));
                bd.cones.push_back(seg);
                bd.nu += cone_nu(seg);
                for (int i = 0; i < seg.dim; ++i) barrier_rows.push_back(row + i);
            }
            row += seg.dim;
        }
    }
    const int mz = static_cast<int>(zero_rows.size());
    const int mb = static_cast<int>(barrier_rows.size());
    MatrixXd Ez(mz, n), Ab(mb, n);
    VectorXd fz(mz), bb(mb);
    for (int i = 0; i < mz; ++i) {
        Ez.row(i) = A.row(zero_rows[i]);
        fz[i] = b[zero_rows[i]];
    }
    for (int i = 0; i < mb; ++i) {
        Ab.row(i) = A.row(barrier_rows[i]);
        bb[i] = b[barrier_rows[i]];
    }

    // Eliminate equalities: x = x0 + N z.
    VectorXd x0 = VectorXd::Zero(n);
    MatrixXd N = MatrixXd::Identity(n, n);
    if (mz > 0) {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(Ez);
        x0 = qr.solve(-fz);
        if ((Ez * x0 + fz).cwiseAbs().maxCoeff() > options.feas_tol * bscale * 10.0) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        Eigen::FullPivLU<MatrixXd> lu(Ez);
        lu.setThreshold(1e-10);
        N = lu.kernel();
        if (lu.dimensionOfKernel() == 0) N.resize(n, 0);
    }
    const int nz = static_cast<int>(N.cols());

    bd.A = Ab * N;
    bd.b = bb + Ab * x0;
    VectorXd cr = N.transpose() * c;

    auto finish = [&](const VectorXd& z, double t_final, int steps) {
        sol.x = x0 + N * z;
        sol.objective = c.dot(sol.x);
        sol.newton_steps = steps;
        VectorXd s = bd.A * z + bd.b;
        // Newton-corrected duals: with dir solving (A'HA) dir = -(t c + A'g),
        // y = -(g + H A dir) / t satisfies A'y = c up to the linear solve.
        VectorXd yb = VectorXd::Zero(mb);
        {
            const int nzv = static_cast<int>(z.size());
            double fv;
            VectorXd g_all = VectorXd::Zero(mb);
            VectorXd grad = t_final * cr;
            MatrixXd hess = MatrixXd::Zero(nzv, nzv);
            std::vector<MatrixXd> h_segs(bd.cones.size());
            VectorXd g;
            for (std::size_t i = 0; i < bd.cones.size(); ++i) {
                const auto& seg = bd.cones[i];
                seg_barrier(seg, s.segment(bd.seg_row[i], seg.dim), fv, g, h_segs[i]);
                g_all.segment(bd.seg_row[i], seg.dim) = g;
                auto As = bd.A.middleRows(bd.seg_row[i], seg.dim);
                grad.noalias() += As.transpose() * g;
                hess.noalias() += As.transpose() * h_segs[i] * As;
            }
            VectorXd dir = VectorXd::Zero(nzv);
            if (nzv > 0) {
                Eigen::LDLT<MatrixXd> ldlt(hess);
                if (ldlt.info() == Eigen::Success) {
                    VectorXd d = ldlt.solve(-grad);
                    if (d.allFinite()) dir = d;
                }
            }
            VectorXd adir = bd.A * dir;
            for (std::size_t i = 0; i < bd.cones.size(); ++i) {
                const auto& seg = bd.cones[i];
                int r0 = bd.seg_row[i];
                yb.segment(r0, seg.dim) =
                    -(g_all.segment(r0, seg.dim) +
                      h_segs[i] * adir.segment(r0, seg.dim)) /
                    t_final;
            }
        }
        for (int i = 0; i < mb; ++i) sol.y[barrier_rows[i]] = yb[i];
        // Equality duals by least squares on stationarity c = A' y.
        VectorXd resid = c - Ab.transpose() * yb;
        if (mz > 0) {
            Eigen::ColPivHouseholderQR<MatrixXd> qr(Ez.transpose());
            VectorXd yz = qr.solve(resid);
            for (int i = 0; i < mz; ++i) sol.y[zero_rows[i]] = yz[i];
            resid -= Ez.transpose() * yz;
        }
        sol.dual_residual = (n > 0 ? resid.cwiseAbs().maxCoeff() : 0.0) / cscale;
        double pr = mz > 0 ? (Ez * sol.x + fz).cwiseAbs().maxCoeff() : 0.0;
        auto report = check_solution(program, sol.x, 0.0);
        sol.primal_residual = std::max(pr, std::max(report.worst, 0.0)) / bscale;
        sol.gap = (mb > 0 ? std::abs(s.dot(yb)) : 0.0) / (1.0 + std::abs(sol.objective));
        bool clean = sol.primal_residual <= 1e-7 && sol.dual_residual <= 1e-7 &&
                     sol.gap <= 1e-7;
        sol.status = clean ? SolveStatus::Optimal : SolveStatus::Numerical;
        return sol;
    };

    if (nz == 0 || mb == 0) {
        // Fully determined by equalities, or a pure equality/linear problem.
        VectorXd z(nz);
        z.setZero();
        if (mb == 0 && nz > 0 && cr.cwiseAbs().maxCoeff() > 1e-12 * cscale) {
            sol.status = SolveStatus::Unbounded;
            return sol;
        }
        if (mb > 0 && !bd.interior(bd.b)) {
            auto rep = check_solution(program, x0, options.feas_tol * bscale * 10.0);
            sol.status = rep.pass ? SolveStatus::Optimal : SolveStatus::Infeasible;
            if (sol.status == SolveStatus::Infeasible) return sol;
        }
        return finish(z, 1e12, 0);
    }

    int total_steps = 0;
    VectorXd z = VectorXd::Zero(nz);

    // Phase I: drive an added slack along an interior ray below zero.
    if (!bd.interior(bd.b)) {
        VectorXd ray(mb);
        {
            int r = 0;
            for (const auto& seg : bd.cones) {
                switch (seg.type) {
                    case ConeType::NonNeg:
                        ray.segment(r, seg.dim).setOnes();
                        break;
                    case ConeType::Soc:
                        ray.segment(r, seg.dim).setZero();
                        ray[r] = 1.0;
                        break;
                    case ConeType::RotatedSoc:
                        ray.segment(r, seg.dim).setZero();
                        ray[r] = 1.0;
                        ray[r + 1] = 1.0;
                        break;
                    case ConeType::Exp:
                        ray[r] = -1.0;
                        ray[r + 1] = 1.0;
                        ray[r + 2] = 1.0;
                        break;
                    default:
                        break;
                }
                r += seg.dim;
            }
        }
        double tau0 = 1.0;
        while (tau0 < 1e14 && !bd.interior(bd.b + tau0 * ray)) tau0 *= 2.0;
        if (tau0 >= 1e14) {
            sol.status = SolveStatus::Numerical;
            return sol;
        }

        // Box every coordinate during phase I. The phase I objective only
        // penalizes the slack, so the barrier otherwise drifts without bound
        // along recession directions of the feasible set.
        const double box = 1e6 * bscale;
        BarrierData pd = bd;
        pd.A.conservativeResize(mb + 2 * nz, nz + 1);
        pd.A.col(nz).head(mb) = ray;
        pd.A.col(nz).tail(2 * nz).setZero();
        pd.b.conservativeResize(mb + 2 * nz);
        for (int i = 0; i < nz; ++i) {
            pd.A.row(mb + 2 * i).setZero();
            pd.A(mb + 2 * i, i) = -1.0;
            pd.b[mb + 2 * i] = box;
            pd.A.row(mb + 2 * i + 1).setZero();
            pd.A(mb + 2 * i + 1, i) = 1.0;
            pd.b[mb + 2 * i + 1] = box;
        }
        pd.seg_row.push_back(mb);
        pd.cones.push_back({ConeType::NonNeg, 2 * nz});
        pd.nu += 2 * nz;
        VectorXd cp = VectorXd::Zero(nz + 1);
        cp[nz] = 1.0;
        VectorXd zp = VectorXd::Zero(nz + 1);
        zp[nz] = tau0;

        double t = 1.0;
        bool feasible = false;
        while (total_steps < options.max_newton_steps) {
            auto outcome = center(pd, cp, t, zp,
                                  std::min(500, options.max_newton_steps - total_steps),
                                  [&](const VectorXd& zz) { return zz[nz] < 0.0; });
            total_steps += outcome.steps;
            if (outcome.numerical) {
                sol.status = SolveStatus::Numerical;
                return sol;
            }
            if (std::getenv("CONIC_DEBUG")) {
                std::fprintf(stderr, "phase1 t=%g slack=%.12g steps=%d conv=%d\n", t,
                             zp[nz], outcome.steps, outcome.converged ? 1 : 0);
            }
            if (zp[nz] < 0.0) {
                feasible = true;
                break;
            }
            if (pd.nu / t <= 1e-9 * bscale) break;
            t *= options.barrier_growth;
        }
        if (!feasible) {
            sol.status = zp[nz] > options.feas_tol * bscale ? SolveStatus::Infeasible
                                                            : SolveStatus::Numerical;
            sol.newton_steps = total_steps;
            return sol;
        }
        z = zp.head(nz);
    }

    // Phase II: path following on the original objective.
    double t = 1.0;
    while (true) {
        auto outcome =
            center(bd, cr, t, z, std::min(500, options.max_newton_steps - total_steps),
                   [](const VectorXd&) { return false; });
        total_steps += outcome.steps;
        if (outcome.numerical) {
            sol.status = SolveStatus::Numerical;
            sol.newton_steps = total_steps;
            return sol;
        }
        double obj = cr.dot(z) + c.dot(x0);
        if (std::getenv("CONIC_DEBUG")) {
            std::fprintf(stderr, "phase2 t=%g obj=%.12g zmax=%g steps=%d conv=%d\n", t, obj,
                         z.cwiseAbs().maxCoeff(), outcome.steps, (int)outcome.converged);
        }
        if (obj < -1e13 * cscale || z.cwiseAbs().maxCoeff() > 1e13) {
            sol.status = SolveStatus::Unbounded;
            sol.newton_steps = total_steps;
            return sol;
        }
        if (bd.nu / t <= options.gap_tol * (1.0 + std::abs(obj))) break;
        if (total_steps >= options.max_newton_steps) {
            sol = finish(z, t, total_steps);
            sol.status = SolveStatus::MaxIters;
            return sol;
        }
        t *= options.barrier_growth;
    }
    return finish(z, t, total_steps);
}

ResidualReport check_solution(const ConicProgram& program, const Eigen::VectorXd& x,
                              double tol) {
    if (x.size() != program.num_vars()) {
        throw std::invalid_argument("check_solution: x dimension mismatch");
    }
    VectorXd s = program.constraints * x + program.offset;
    ResidualReport report;
    int row = 0, idx = 0;
    for (const auto& seg : program.cones) {
        auto sv = s.segment(row, seg.dim);
        double viol = 0.0;
        switch (seg.type) {
            case ConeType::Zero:
                viol = sv.cwiseAbs().maxCoeff();
                break;
            case ConeType::NonNeg:
                viol = -sv.minCoeff();
                break;
            case ConeType::Soc:
                viol = sv.tail(seg.dim - 1).norm() - sv[0];
                break;
            case ConeType::RotatedSoc: {
                double q = sv.tail(seg.dim - 2).squaredNorm() - 2.0 * sv[0] * sv[1];
                viol = std::max({q, -sv[0], -sv[1]});
                break;
            }
            case ConeType::Exp: {
                double a = sv[0], bv = sv[1], cv = sv[2];
                if (bv <= 0.0) {
                    viol = std::max({-bv, a, -cv});
                } else if (cv <= 0.0) {
                    viol = std::max(-cv, bv);
                } else {
                    viol = a - bv * std::log(cv / bv);
                }
                break;
            }
        }
        report.entries.push_back({idx, seg.type, viol});
        report.worst = std::max(report.worst, viol);
        row += seg.dim;
        ++idx;
    }
    report.pass = report.worst <= tol;
    return report;
}

void normalize_cones(ConicProgram& program) {
    const int m = program.num_rows();
    VectorXd scale = VectorXd::Ones(m);
    {
        VectorXd row_max = program.offset.cwiseAbs();
        for (int col = 0; col < program.constraints.outerSize(); ++col) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(program.constraints, col);
                 it; ++it) {
                row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
            }
        }
        int row = 0;
        for (const auto& seg : program.cones) {
            if (seg.type != ConeType::Zero) {
                double peak = row_max.segment(row, seg.dim).maxCoeff();
                if (peak > 0.0) scale.segment(row, seg.dim).setConstant(1.0 / peak);
            }
            row += seg.dim;
        }
    }
    program.constraints = scale.asDiagonal() * program.constraints;
    program.offset = scale.asDiagonal() * program.offset;
}

void dump_program(const ConicProgram& program, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "conic-program v1\n";
    out << "vars " << program.num_vars() << "\nrows " << program.num_rows() << "\n";
    out << "cones";
    for (const auto& seg : program.cones) {
        const char* tag = "?";
        switch (seg.type) {
            case ConeType::Zero: tag = "zero"; break;
            case ConeType::NonNeg: tag = "nonneg"; break;
            case ConeType::Soc: tag = "soc"; break;
            case ConeType::RotatedSoc: tag = "rsoc"; break;
            case ConeType::Exp: tag = "exp"; break;
        }
        out << " " << tag << ":" << seg.dim;
    }
    out << "\nobjective";
    for (int i = 0; i < program.num_vars(); ++i) out << " " << program.objective[i];
    out << "\noffset";
    for (int i = 0; i < program.num_rows(); ++i) out << " " << program.offset[i];
    out << "\ntriplets\n";
    for (int k = 0; k < program.constraints.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(program.constraints, k); it; ++it) {
            out << it.row() << " " << it.col() << " " << it.value() << "\n";
        }
    }
}

}  // namespace rsfbl::conic

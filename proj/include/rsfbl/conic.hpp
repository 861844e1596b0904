#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace rsfbl::conic {

enum class ConeType { Zero, NonNeg, Soc, RotatedSoc, Exp };

struct ConeSegment {
    ConeType type;
    int dim;  // rows it spans; Exp is always 3
};

/// Real conic program in the form
///     minimize  objective . x
///     such that A x + offset  lies in the cone product (row order = segment order).
/// Membership conventions:
///   Zero          s = 0
///   NonNeg        s_i >= 0
///   Soc           s_0 >= || s_1..s_{d-1} ||
///   RotatedSoc    2 s_0 s_1 >= || s_2..s_{d-1} ||^2,  s_0, s_1 >= 0
///   Exp           s_1 > 0 and s_1 exp(s_0 / s_1) <= s_2   (closure at s_1 = 0)
struct ConicProgram {
    Eigen::VectorXd objective;
    Eigen::SparseMatrix<double> constraints;  // A
    Eigen::VectorXd offset;                   // b
    std::vector<ConeSegment> cones;
    std::vector<std::string> var_names;  // optional, diagnostics only

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(offset.size()); }
};

/// Incremental assembly helper: rows are appended, then tagged with a cone.
class ProgramBuilder {
  public:
    explicit ProgramBuilder(int num_vars) : num_vars_(num_vars) {
        objective_ = Eigen::VectorXd::Zero(num_vars);
    }

    void set_objective(int var, double coeff) { objective_[var] = coeff; }
    int add_row(double offset);
    void coeff(int row, int var, double value);
    /// Tags the most recently added `dim` rows as one cone segment.
    void tag_cone(ConeType type, int dim);
    void name_var(int var, std::string name);

    ConicProgram build() const;

  private:
    int num_vars_;
    Eigen::VectorXd objective_;
    std::vector<Eigen::Triplet<double>> triplets_;
    std::vector<double> offsets_;
    std::vector<ConeSegment> cones_;
    std::vector<std::string> names_;
    int tagged_rows_ = 0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIters, Numerical };

std::string to_string(SolveStatus s);

struct SolverOptions {
    double gap_tol = 1e-9;        // relative complementarity target
    double feas_tol = 1e-8;       // equality-row feasibility target
    int max_newton_steps = 20000;  // across all centering problems
    double barrier_growth = 20.0;  // outer path-following factor
};

struct ConicSolution {
    SolveStatus status = SolveStatus::Numerical;
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // one dual per row; in the dual cone for optimal status
    double objective = 0.0;
    double primal_residual = 0.0;  // relative
    double dual_residual = 0.0;    // relative
    double gap = 0.0;              // relative complementarity s.y
    int newton_steps = 0;
};

/// Interior-point path-following solve. Deterministic for identical input;
/// numerical trouble is reported through the status, never thrown.
ConicSolution solve_conic(const ConicProgram& program, const SolverOptions& options = {});

struct ResidualReport {
    struct Entry {
        int segment;
        ConeType type;
        double violation;  // <= 0 means satisfied
    };
    std::vector<Entry> entries;
    double worst = 0.0;
    bool pass = false;
};

/// Per-cone worst membership violation of s = A x + offset.
ResidualReport check_solution(const ConicProgram& program, const Eigen::VectorXd& x,
                              double tol);

/// Scales each non-equality cone segment by the inverse of its largest
/// coefficient magnitude. Every supported cone is invariant under uniform
/// positive scaling, so the feasible set is unchanged; this tames programs
/// whose linearization coefficients span many orders of magnitude.
void normalize_cones(ConicProgram& program);

/// Text dump (n, m, cone tags, A triplets, offsets, objective), for offline
/// debugging of assembled programs.
void dump_program(const ConicProgram& program, const std::string& path);

}  // namespace rsfbl::conic

#pragma once

#include <memory>
#include <mutex>

#include "dblab/boundary_maps.hpp"
#include "dblab/operators.hpp"

namespace dblab {

// Values on a {t_i} x torus product grid. Vector-valued entries hold 1+n
// physical components per level.
struct StripField {
    GridSpec grid;
    std::vector<double> t_grid;
    bool has_u = false, has_grad = false, has_conormal = false;
    std::vector<Vec> u;                     // u(t_i, .)
    std::vector<std::vector<Vec>> grad;     // [d_t u, grad_x u](t_i, .)
    std::vector<std::vector<Vec>> conormal; // [d_nuA u, grad_x u](t_i, .)

    void validate() const;
};

// Log-spaced levels from h/4 to 16 L.
std::vector<double> default_t_grid(const GridSpec& g, int levels = 200);
std::vector<double> log_t_grid(double t_min, double t_max, int levels);

// Operators and functional calculi shared by solves with the same coefficients.
class SolverContext {
public:
    explicit SolverContext(const CoefficientField& A, const CalculusOptions& opt = {});

    const OperatorSet& ops() const { return ops_; }
    const GridSpec& grid() const { return ops_.grid; }
    const FunctionalCalculus& uT() const;
    const FunctionalCalculus& T() const;
    const SgnBlocks& uT_blocks() const;

private:
    OperatorSet ops_;
    CalculusOptions opt_;
    mutable std::once_flag uT_once_, T_once_, blocks_once_;
    mutable std::unique_ptr<FunctionalCalculus> uT_, T_;
    mutable std::unique_ptr<SgnBlocks> blocks_;
};

enum class SolutionKind { l2_neumann, l2_regularity, l2_dirichlet, energy_neumann, energy_regularity };
std::string to_string(SolutionKind k);

struct SolveOptions {
    bool force = false;         // permit block classes the theory does not cover
    double p_minus_tol = 1e-6;  // relative size of the negative spectral part of the trace
    double cond_limit = 1e8;    // Dirichlet restricted system
};

struct SolutionHandle {
    SolutionKind kind = SolutionKind::l2_neumann;
    std::shared_ptr<const SolverContext> ctx;
    Vec trace;            // H0 (conormal trace) or H~0 (Dirichlet), V-coordinates
    cplx gauge = 0.0;     // additive constant of u (Dirichlet)
    bool exploratory = false;
    double trace_ratio = 0.0;     // |trace| / |datum|
    double p_minus_residual = 0.0;
    double datum_error = 0.0;     // Dirichlet boundary trace error
    double system_cond = 1.0;     // conditioning of the inverted block or system
};

SolutionHandle solve_neumann_l2(std::shared_ptr<const SolverContext> ctx, const Vec& f, const SolveOptions& o = {});
SolutionHandle solve_regularity_l2(std::shared_ptr<const SolverContext> ctx, const std::vector<Vec>& g,
                                   const SolveOptions& o = {});
SolutionHandle solve_dirichlet_l2(std::shared_ptr<const SolverContext> ctx, const Vec& u0,
                                  const SolveOptions& o = {});

enum class EnergyDatum { neumann, dirichlet };
SolutionHandle solve_energy(std::shared_ptr<const SolverContext> ctx, EnergyDatum kind, const Vec& datum,
                            const SolveOptions& o = {});

inline std::shared_ptr<const SolverContext> make_context(const CoefficientField& A, const CalculusOptions& opt = {}) {
    return std::make_shared<const SolverContext>(A, opt);
}

// Conormal gradient in V-coordinates at height t.
Vec conormal_at(const SolutionHandle& h, double t);
StripField evaluate(const SolutionHandle& h, const std::vector<double>& t_grid);

// Physical [d_t u, grad_x u] from a physical conormal gradient and B = hat(A).
std::vector<Vec> gradient_from_conormal(const CoefficientField& B, const std::vector<Vec>& conormal);

struct Residuals {
    double first_order = 0.0;  // max_i |d_t F + D(B F)| / max_i |F|
    double curl = 0.0;         // max_i curl defect of F_par / max_i |F|
};
Residuals residual_check(const StripField& field, const CoefficientField& A);

// content: "u", "grad" or "conormal".
void write_strip_field(const std::string& json_path, const StripField& f, const std::string& content);

}  // namespace dblab

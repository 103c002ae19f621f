#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rof/data.hpp"
#include "rof/fem.hpp"

namespace rof {

/// ROF problem: minimize int |grad u|_eps + alpha/2 ||u - g||^2 subject to
/// u = u_D on the Dirichlet boundary (the whole boundary in all examples).
struct RofProblem {
    double alpha = 10.0;
    double epsilon = 0.0;
    DataFunction g = DataFunction::char_ball(Vec2::Zero(), 0.5);
    ScalarField dirichlet = [](const Vec2&) { return 0.0; };
    /// Use Pi_h in the fidelity term for CR discretizations.
    bool projected_fidelity = true;

    void validate() const;
};

enum class ExactVariant { BallD, TwoDisc, Sign1D };

/// Closed-form coefficients: max{1 - d/(alpha r), 0} for a single ball,
/// max{1 - 2/(alpha r), 0} for two discs and 1 - 1/(r alpha) for the 1D sign.
double coefficient(double r, double alpha, int d, ExactVariant variant);

struct ExactSolution {
    ScalarField u;
    std::optional<VectorField> z;
    /// Divergence of z where available.
    std::optional<ScalarField> div_z;
    double c = 0.0;
    std::string example;
    JumpSet jumps;
};

/// u = c g for g = chi of B_r(0) with the continuous dual field
/// z = -c' x/r inside and -c' r x/|x|^2 outside, c' = min{1, r alpha/d}.
ExactSolution exact_single_disc(double r, double alpha, int d);
/// u = c (chi_{B_r^+} - chi_{B_r^-}) o Phi; no global dual field.
ExactSolution exact_two_disc(double r, double alpha, const AffineMap& phi = {});
/// u = c sign(x) on (-1, 1) with c = 1 - 1/(r alpha).
ExactSolution exact_sign_1d(double r, double alpha);

struct Energies {
    double tv = 0.0;             // sum |T| |grad u_h|
    double tv_eps = 0.0;         // sum |T| |grad u_h|_eps
    double fidelity = 0.0;       // alpha/2 ||u_h - g||^2
    double fidelity_projected = 0.0;  // alpha/2 ||Pi_h (u_h - g)||^2
    double I_eps() const { return tv_eps + fidelity; }
    double I() const { return tv + fidelity; }
    double I_h() const { return tv + fidelity_projected; }
    double I_h_eps() const { return tv_eps + fidelity_projected; }
};

Energies energies(const FeFunction& u_h, const RofProblem& problem, const QuadratureOptions& opts = {});

struct DualEnergy {
    double value = 0.0;
    /// Largest |z| observed at the admissibility sample points.
    double max_modulus = 0.0;
    bool admissible = true;
    /// Regularized discrete value: adds sum eps |T| sqrt(1 - |z(x_T)|^2).
    double regularized = 0.0;
    /// Largest normal jump across interior sides (discrete fields only).
    double max_normal_jump = 0.0;
};

/// D(z) = -1/(2 alpha) ||div z + alpha g||^2 + alpha/2 ||g||^2 + int_{dOmega} u_D z.n
/// evaluated by quadrature on `mesh`; the boundary term vanishes for u_D = 0.
DualEnergy dual_energy(const VectorField& z, const ScalarField& div_z, const RofProblem& problem, const Mesh& mesh,
                       const QuadratureOptions& opts = {});
/// Discrete D_h with g_h = Pi_h g and admissibility |z_h(x_T)| <= 1.
DualEnergy dual_energy(const FeFunction& z_h, const RofProblem& problem, const QuadratureOptions& opts = {});

/// |z(x+) - z(x-)| / |x+ - x-|^theta in the closed form sin(phi) / (r^theta (1 - cos phi)^theta).
double holder_quotient(double phi, double r, double theta);
/// The same quotient evaluated literally from the points
/// x+- = r(+-(1 - cos phi), sin phi) and dual values z(x+-) = (cos phi, -+sin phi).
double holder_quotient_direct(double phi, double r, double theta);

}  // namespace rof

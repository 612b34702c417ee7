#pragma once

// Tensor mesh of the upper half sphere S^2_+ in (t, theta) coordinates and the
// bilinear finite element forms of the weighted spherical eigenproblem.
//
// A point is (cos t cos theta, cos t sin theta, sin t); t = 0 is the equator
// (the thin space) and t = pi/2 the pole. Nodes sit on rings t_0 = 0 < t_1 <
// ... < t_{nt-1} and the ring at the pole collapses to a single dof.

#include "conefrac/cones.hpp"
#include "conefrac/params.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <vector>

namespace conefrac {

using SpMat = Eigen::SparseMatrix<double>;

class HemisphereMesh {
public:
    HemisphereMesh(int n_t, int n_theta, double s, SphericalCap cap, double grading);

    int n_t() const { return n_t_; }
    int n_theta() const { return n_theta_; }
    double s() const { return s_; }
    double grading() const { return grading_; }
    const SphericalCap& cap() const { return cap_; }

    /// Ring heights t_0..t_{nt-1} followed by pi/2.
    const std::vector<double>& t_nodes() const { return t_nodes_; }
    const std::vector<double>& theta_nodes() const { return theta_nodes_; }
    double theta_step() const;

    int dof_count() const { return n_t_ * n_theta_ + 1; }
    int node(int ring, int j) const { return ring * n_theta_ + ((j % n_theta_) + n_theta_) % n_theta_; }
    int pole() const { return n_t_ * n_theta_; }
    double t_of(int dof) const;
    double theta_of(int dof) const;

    /// Equator node j lies in the cap (Robin) rather than in its complement (Dirichlet).
    bool in_omega(int j) const { return omega_[j] != 0; }
    int robin_count() const;
    int dirichlet_count() const { return n_theta_ - robin_count(); }

    /// Dofs kept after eliminating the Dirichlet equator nodes, ascending.
    const std::vector<int>& retained() const { return retained_; }
    /// Full dof -> position in retained(), or -1 for a Dirichlet dof.
    int reduced_index(int dof) const { return reduced_index_[dof]; }

    /// Bilinear interpolant of a full dof vector at (t, theta).
    double interpolate(const Eigen::VectorXd& f, double t, double theta) const;
    /// Equator values (ring 0) of a full dof vector.
    Eigen::VectorXd equator_values(const Eigen::VectorXd& f) const;

    /// Nodal interpolation of a function of (t, theta).
    Eigen::VectorXd sample(const std::function<double(double, double)>& f) const;

private:
    int n_t_;
    int n_theta_;
    double s_;
    double grading_;
    SphericalCap cap_;
    std::vector<double> t_nodes_;
    std::vector<double> theta_nodes_;
    std::vector<char> omega_;
    std::vector<int> retained_;
    std::vector<int> reduced_index_;
};

/// Throws DomainError for n_t < 4, n_theta < 4 or grading < 1.
HemisphereMesh build_mesh(int n_t, int n_theta, double s, const SphericalCap& cap, double grading = 2.0);

/// One-dimensional moments of a t-cell with the hat functions L0, L1 and the
/// weight w = (sin t)^{1-2s}: stiffness int w cos t L'L', mass int w cos t L L,
/// metric int w / cos t L L. On the pole cell only metric[0][0] is finite and
/// the other metric entries are reported as zero.
struct CellMoments {
    std::array<std::array<double, 2>, 2> stiffness{};
    std::array<std::array<double, 2>, 2> mass{};
    std::array<std::array<double, 2>, 2> metric{};
    double weight_integral = 0.0;  ///< int w cos t over the cell
};

CellMoments cell_moments(const HemisphereMesh& mesh, int ring);

/// Weighted forms on the full dof space and restricted to the retained dofs.
/// B is the periodic P1 mass of the whole equator; B_omega its restriction.
struct AssembledForms {
    HemisphereMesh mesh;
    double s;
    SpMat K;
    SpMat M;
    SpMat B;
    SpMat K_r;
    SpMat M_r;
    SpMat B_r;

    Eigen::VectorXd restrict_to_retained(const Eigen::VectorXd& full) const;
    /// Embeds a retained-dof vector, zero on the Dirichlet dofs.
    Eigen::VectorXd extend_from_retained(const Eigen::VectorXd& reduced) const;
};

/// Throws DomainError if params.s() differs from the mesh weight exponent and
/// NumericalError if the restricted mass is singular.
AssembledForms assemble(const HemisphereMesh& mesh, const ProblemParams& params);

/// int_{S^2_+} w f dS of the bilinear interpolant, equal to 1^T M f.
double weighted_surface_integral(const AssembledForms& forms, const Eigen::VectorXd& f);
/// f^T M g.
double weighted_inner(const AssembledForms& forms, const Eigen::VectorXd& f, const Eigen::VectorXd& g);
/// Integral over the exact arc omega of the piecewise linear equator trace of f.
double boundary_integral(const HemisphereMesh& mesh, const Eigen::VectorXd& f);
/// int_0^{2 pi} weight(theta) f(theta) g(theta) d theta for equator traces,
/// four Gauss points per segment.
double equator_integral(const HemisphereMesh& mesh, const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                        const std::function<double(double)>& weight);

}  // namespace conefrac

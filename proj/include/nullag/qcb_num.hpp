#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "nullag/polyform.hpp"

namespace nullag {

struct unsupported_dimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct optimization_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Simplicial (Kuhn) mesh of the rotated half-cube R ((0,1)^{n-1} x (-1,0)).
// The flat top face maps to Gamma with outward normal rho; all other boundary
// vertices carry the homogeneous Dirichlet condition.
struct StandardDomainMesh {
  int dim = 0;
  int resolution = 0;
  Eigen::MatrixXd vertices;  // nverts x n, physical (rotated) coordinates

  struct Simplex {
    std::vector<int> v;        // n+1 vertex ids
    Eigen::MatrixXd grads;     // (n+1) x n gradients of barycentric coords
    double volume = 0;
  };
  std::vector<Simplex> simplices;

  struct GammaFace {
    std::vector<int> v;  // n vertex ids
    double area = 0;
  };
  std::vector<GammaFace> gamma_faces;

  std::vector<char> dirichlet;    // per vertex: on boundary \ Gamma
  std::vector<int> free_qcb;      // interior + Gamma-interior vertices
  std::vector<int> free_interior; // interior vertices only
  BoundaryFrame frame;

  int nverts() const { return static_cast<int>(vertices.rows()); }
  double volume() const;
  double gamma_area() const;
};

// Public builder (n in {2,3}). `build_standard_domain_any` is the
// dimension-generic core used by the verification suites, which also need
// n = 4 identity checks.
StandardDomainMesh build_standard_domain(int n, const Eigen::VectorXd& rho, int h);
StandardDomainMesh build_standard_domain_any(int n, const Eigen::VectorXd& rho, int h);

// Continuous piecewise-affine R^m-valued field on the mesh, identically zero
// at Dirichlet vertices.
struct P1Field {
  const StandardDomainMesh* mesh = nullptr;
  int m = 0;
  Eigen::MatrixXd values;  // nverts x m

  // m x n gradient on a given simplex.
  Eigen::MatrixXd grad_on(int simplex) const;
};

P1Field zero_field(const StandardDomainMesh& mesh, int m);
// Uniform [-scale, scale] values at the given free vertices.
P1Field random_field(const StandardDomainMesh& mesh, int m, const std::vector<int>& free_verts,
                     std::mt19937_64& rng, double scale);
// Nodal interpolation of a smooth field; Dirichlet vertices forced to zero.
P1Field interpolate_field(const StandardDomainMesh& mesh, int m,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& u,
                          const std::vector<int>& free_verts);

// sum_T |T| v(F + grad u|_T); exact per element up to roundoff.
double energy(const CompiledPoly& v, const Eigen::MatrixXd& f, const P1Field& u);
// int_Gamma q . u dS, exact for the affine trace.
double gamma_term(const Eigen::VectorXd& q, const P1Field& u);

struct OptimizerOptions {
  int max_iterations = 200;
  double grad_tol = 1e-8;
  double divergence_floor = -1e6;  // stop early: unbounded descent certified
};

struct QCBReport {
  double estimate = 0;
  // Owns the mesh the certificate lives on (certificate.mesh points here).
  std::shared_ptr<const StandardDomainMesh> mesh;
  P1Field certificate;
  int trials = 0;
  int converged_trials = 0;
  int diverged_trials = 0;
  int mesh_resolution = 0;
  bool unbounded_direction = false;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// Multistart minimization of
//   deficit(u) = int v(F + grad u) - int_Gamma q.u - v(F)|Omega|,
// q = grad v(F) rho, over fields free on Gamma. Negative estimates are
// certified qcb violations.
QCBReport qcb_deficit(const PolyMatrixFn& v, const Eigen::MatrixXd& f,
                      const Eigen::VectorXd& rho, int h, int trials, std::uint64_t seed,
                      const OptimizerOptions& opt = {});

// Sign certificate for the boundary envelope of a positively p-homogeneous v
// at 0: returns min(0, best found). Negative means the envelope is -inf.
QCBReport qcb_envelope0(const PolyMatrixFn& v, const Eigen::VectorXd& rho, int h, int trials,
                        std::uint64_t seed, const OptimizerOptions& opt = {});

// Interior test: all boundary vertices Dirichlet, no surface term; estimates
// Qv(F) - v(F).
QCBReport interior_qc_deficit(const PolyMatrixFn& v, const Eigen::MatrixXd& f, int h, int trials,
                              std::uint64_t seed, const OptimizerOptions& opt = {});

}  // namespace nullag

#pragma once

#include <functional>
#include <map>

#include "nullag/polyform.hpp"
#include "nullag/quadrature.hpp"

namespace nullag {

enum class SequenceKind {
  boundary_concentration,
  interior_concentration,
  counterexample_sec4,
};

// Closed-form sequence (u_k, grad u_k) with gradient support concentrated in
// `support`; outside it the gradient equals the (constant) weak-limit
// gradient.
struct AnalyticSequence {
  SequenceKind kind;
  int domain_dim = 0;  // n
  int range_dim = 0;   // m
  int k = 0;
  Eigen::VectorXd x0;  // concentration point (boundary kinds)
  Box domain;
  std::vector<Box> support;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> u;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> grad;
  Eigen::MatrixXd limit_gradient;
  // Optional non-constant weak limit (e.g. a constant-in-k sequence whose
  // limit is the field itself); equals limit_gradient outside the support.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> limit_grad;
};

// Determinant concentration at the midpoint of the top edge of (0,1)^2:
// u_k = w(s_k(x)) with w = (sin(pi x) y, -sin(2 pi x) y) squeezed onto the
// k^-1 square attached to the top edge. int det grad u_k = -4/3 for every k.
AnalyticSequence det_concentration_sequence(int k);

// Interior control: the same squeeze with a field vanishing on the whole
// boundary of the small square, centered at (1/2, 1/2).
AnalyticSequence interior_concentration_sequence(int k);

// det'-analogue on (0,1)^3 with m = 2, concentrating at the center of the
// top face (normal e_3).
AnalyticSequence detprime_face_concentration_sequence(int k);

// The radially symmetric higher-integrability counterexample
// u_k(x', x_n) = g(x_n) h_k(|x'|) x'/|x'| on (0,1)^{n-1} x (-1/2, 1/2).
AnalyticSequence counterexample_sequence(int n, int k);
// Closed form of det' grad u_k for that sequence.
double counterexample_detprime(int n, int k, const Eigen::VectorXd& x);

struct TestFunction {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> phi;
};

struct ExperimentReport {
  struct Row {
    int k = 0;
    std::string label;  // phi name or delta
    double value = 0;
  };
  std::vector<Row> rows;
  std::map<std::string, double> est_limit;
  std::map<std::string, double> target;
  std::map<std::string, double> fit_slope;
  std::map<std::string, double> fit_r2;
  std::string verdict;
  bool nonneg_hypothesis = true;  // min f(grad u_k) >= -1e-12 at sampled nodes
  std::vector<std::string> notes;

  std::string to_json() const;
  std::string to_csv() const;
};

// Computes int phi(x) f(grad u_k(x)) dx for each (k, phi), extrapolates
// k -> infinity and compares against the weak-limit value
// int phi f(limit gradient) dx.
ExperimentReport weak_continuity_experiment(const PolyMatrixFn& f,
                                            const std::function<AnalyticSequence(int)>& make_seq,
                                            const std::vector<TestFunction>& phis,
                                            const std::vector<int>& k_list);

// Section-4 scalings: I(k,delta) = int over the tube slab of
// gamma(det' grad u_k) for x_n in (delta, eps), by exact radial reduction and
// 1-D quadrature, and the anisotropic norm A(k) = int |grad' u_k|^{n-1}.
// Labels: "A" rows carry A(k); "delta=..." rows carry I(k,delta).
ExperimentReport higher_integrability_experiment(int n, const std::vector<int>& k_list,
                                                 double eps, const std::vector<double>& deltas);

}  // namespace nullag

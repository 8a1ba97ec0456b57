#include "nullag/qcb_num.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace nullag {

namespace {

int env_thread_cap() {
  if (const char* s = std::getenv("NULLAG_THREADS")) {
    int v = std::atoi(s);
    if (v >= 1) return v;
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, hw);
}

}  // namespace

double StandardDomainMesh::volume() const {
  double v = 0;
  for (const auto& s : simplices) v += s.volume;
  return v;
}

double StandardDomainMesh::gamma_area() const {
  double a = 0;
  for (const auto& f : gamma_faces) a += f.area;
  return a;
}

StandardDomainMesh build_standard_domain_any(int n, const Eigen::VectorXd& rho, int h) {
  if (n < 2) throw unsupported_dimension("mesh dimension must be at least 2");
  if (h < 2) throw std::invalid_argument("resolution h must be at least 2");
  StandardDomainMesh mesh;
  mesh.dim = n;
  mesh.resolution = h;
  mesh.frame = complete_rotation(rho);

  const int nv_axis = h + 1;
  long nverts = 1;
  for (int i = 0; i < n; ++i) nverts *= nv_axis;
  mesh.vertices.resize(nverts, n);

  auto vertex_id = [&](const std::vector<int>& idx) {
    long id = 0;
    for (int i = n - 1; i >= 0; --i) id = id * nv_axis + idx[i];
    return static_cast<int>(id);
  };

  // Reference domain (0,1)^{n-1} x (-1,0); index i_n = h is the flat top.
  std::vector<int> idx(n, 0);
  std::vector<std::vector<int>> ref_idx(nverts);
  while (true) {
    Eigen::VectorXd x(n);
    for (int i = 0; i + 1 < n; ++i) x(i) = double(idx[i]) / h;
    x(n - 1) = -1.0 + double(idx[n - 1]) / h;
    const int id = vertex_id(idx);
    mesh.vertices.row(id) = (mesh.frame.rotation * x).transpose();
    ref_idx[id] = idx;
    int i = 0;
    while (i < n && ++idx[i] == nv_axis) idx[i++] = 0;
    if (i == n) break;
  }

  // Kuhn subdivision: one simplex per (cell, permutation).
  std::vector<int> perm(n);
  std::vector<int> cell(n, 0);
  while (true) {
    std::iota(perm.begin(), perm.end(), 0);
    do {
      StandardDomainMesh::Simplex s;
      std::vector<int> corner = cell;
      s.v.push_back(vertex_id(corner));
      for (int j = 0; j < n; ++j) {
        ++corner[perm[j]];
        s.v.push_back(vertex_id(corner));
      }
      Eigen::MatrixXd edges(n, n);
      for (int j = 1; j <= n; ++j)
        edges.col(j - 1) = (mesh.vertices.row(s.v[j]) - mesh.vertices.row(s.v[0])).transpose();
      Eigen::MatrixXd inv = edges.inverse();
      s.grads.resize(n + 1, n);
      for (int j = 1; j <= n; ++j) s.grads.row(j) = inv.row(j - 1);
      s.grads.row(0) = -s.grads.bottomRows(n).colwise().sum();
      double factorial = 1;
      for (int j = 2; j <= n; ++j) factorial *= j;
      s.volume = std::abs(edges.determinant()) / factorial;

      // Gamma facet: exactly n of the n+1 vertices on the top plane.
      std::vector<int> top;
      for (int vid : s.v)
        if (ref_idx[vid][n - 1] == h) top.push_back(vid);
      if (static_cast<int>(top.size()) == n) {
        StandardDomainMesh::GammaFace face;
        face.v = top;
        Eigen::MatrixXd q(n, n - 1);
        for (int j = 1; j < n; ++j)
          q.col(j - 1) = (mesh.vertices.row(top[j]) - mesh.vertices.row(top[0])).transpose();
        double fac = 1;
        for (int j = 2; j <= n - 1; ++j) fac *= j;
        face.area = std::sqrt((q.transpose() * q).determinant()) / fac;
        mesh.gamma_faces.push_back(std::move(face));
      }
      mesh.simplices.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
    int i = 0;
    while (i < n && ++cell[i] == h) cell[i++] = 0;
    if (i == n) break;
  }

  mesh.dirichlet.assign(nverts, 0);
  for (long id = 0; id < nverts; ++id) {
    const auto& ix = ref_idx[id];
    bool on_boundary = false;
    for (int i = 0; i < n; ++i)
      if (ix[i] == 0 || ix[i] == h) on_boundary = true;
    if (!on_boundary) {
      mesh.free_interior.push_back(static_cast<int>(id));
      mesh.free_qcb.push_back(static_cast<int>(id));
      continue;
    }
    bool gamma_interior = ix[n - 1] == h;
    for (int i = 0; i + 1 < n; ++i)
      if (ix[i] == 0 || ix[i] == h) gamma_interior = false;
    if (gamma_interior)
      mesh.free_qcb.push_back(static_cast<int>(id));
    else
      mesh.dirichlet[id] = 1;
  }
  return mesh;
}

StandardDomainMesh build_standard_domain(int n, const Eigen::VectorXd& rho, int h) {
  if (n != 2 && n != 3)
    throw unsupported_dimension("build_standard_domain supports n in {2,3}");
  return build_standard_domain_any(n, rho, h);
}

Eigen::MatrixXd P1Field::grad_on(int simplex) const {
  const auto& s = mesh->simplices[simplex];
  const int n = mesh->dim;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, n);
  for (int loc = 0; loc <= n; ++loc) g += values.row(s.v[loc]).transpose() * s.grads.row(loc);
  return g;
}

P1Field zero_field(const StandardDomainMesh& mesh, int m) {
  P1Field u;
  u.mesh = &mesh;
  u.m = m;
  u.values = Eigen::MatrixXd::Zero(mesh.nverts(), m);
  return u;
}

P1Field random_field(const StandardDomainMesh& mesh, int m, const std::vector<int>& free_verts,
                     std::mt19937_64& rng, double scale) {
  P1Field u = zero_field(mesh, m);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (int v : free_verts)
    for (int c = 0; c < m; ++c) u.values(v, c) = dist(rng);
  return u;
}

P1Field interpolate_field(const StandardDomainMesh& mesh, int m,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                          const std::vector<int>& free_verts) {
  P1Field u = zero_field(mesh, m);
  for (int v : free_verts) u.values.row(v) = f(mesh.vertices.row(v).transpose()).transpose();
  return u;
}

double energy(const CompiledPoly& v, const Eigen::MatrixXd& f, const P1Field& u) {
  const auto& mesh = *u.mesh;
  const int m = u.m, n = mesh.dim;
  std::vector<double> x(m * n);
  double acc = 0;
  for (const auto& s : mesh.simplices) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) x[i * n + j] = f(i, j);
    for (int loc = 0; loc <= n; ++loc) {
      const int vid = s.v[loc];
      for (int i = 0; i < m; ++i) {
        const double val = u.values(vid, i);
        if (val == 0) continue;
        for (int j = 0; j < n; ++j) x[i * n + j] += val * s.grads(loc, j);
      }
    }
    acc += s.volume * v(x.data());
  }
  return acc;
}

double gamma_term(const Eigen::VectorXd& q, const P1Field& u) {
  const auto& mesh = *u.mesh;
  const int n = mesh.dim;
  double acc = 0;
  for (const auto& face : mesh.gamma_faces) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(u.m);
    for (int vid : face.v) mean += u.values.row(vid).transpose();
    acc += face.area / n * q.dot(mean);
  }
  return acc;
}

namespace {

// Objective over the stacked free unknowns. The surface term is linear with
// per-vertex weight sum(area/n) over incident Gamma faces.
class DeficitObjective {
 public:
  DeficitObjective(const StandardDomainMesh& mesh, const PolyMatrixFn& v,
                   const Eigen::MatrixXd& f, const std::vector<int>& free_verts,
                   const Eigen::VectorXd* q)
      : mesh_(mesh), m_(v.rows()), n_(mesh.dim), f_(f), free_(free_verts), compiled_(v) {
    dv_.resize(m_, n_);
    for (const auto& gi : v.gradient()) grad_polys_.emplace_back(gi);
    vert_slot_.assign(mesh.nverts(), -1);
    for (size_t k = 0; k < free_.size(); ++k) vert_slot_[free_[k]] = static_cast<int>(k);
    gamma_weight_ = Eigen::VectorXd::Zero(mesh.nverts());
    if (q) {
      q_ = *q;
      for (const auto& face : mesh.gamma_faces)
        for (int vid : face.v) gamma_weight_(vid) += face.area / n_;
    }
  }

  int dof() const { return static_cast<int>(free_.size()) * m_; }

  P1Field to_field(const Eigen::VectorXd& x) const {
    P1Field u = zero_field(mesh_, m_);
    for (size_t k = 0; k < free_.size(); ++k)
      for (int c = 0; c < m_; ++c) u.values(free_[k], c) = x(k * m_ + c);
    return u;
  }

  double value(const Eigen::VectorXd& x) const {
    P1Field u = to_field(x);
    double e = energy(compiled_, f_, u);
    if (q_.size()) e -= gamma_term(q_, u);
    return e;
  }

  double value_and_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    P1Field u = to_field(x);
    grad.setZero(dof());
    std::vector<double> pt(m_ * n_);
    double acc = 0;
    for (const auto& s : mesh_.simplices) {
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) pt[i * n_ + j] = f_(i, j);
      for (int loc = 0; loc <= n_; ++loc) {
        const int vid = s.v[loc];
        for (int i = 0; i < m_; ++i) {
          const double val = u.values(vid, i);
          if (val == 0) continue;
          for (int j = 0; j < n_; ++j) pt[i * n_ + j] += val * s.grads(loc, j);
        }
      }
      acc += s.volume * compiled_(pt.data());
      // dv/dF at this element, chain rule through grad u.
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) dv_(i, j) = grad_polys_[i * n_ + j](pt.data());
      for (int loc = 0; loc <= n_; ++loc) {
        const int slot = vert_slot_[s.v[loc]];
        if (slot < 0) continue;
        for (int i = 0; i < m_; ++i) {
          double gsum = 0;
          for (int j = 0; j < n_; ++j) gsum += dv_(i, j) * s.grads(loc, j);
          grad(slot * m_ + i) += s.volume * gsum;
        }
      }
    }
    if (q_.size()) {
      acc -= gamma_term(q_, u);
      for (size_t k = 0; k < free_.size(); ++k) {
        const double w = gamma_weight_(free_[k]);
        if (w == 0) continue;
        for (int c = 0; c < m_; ++c) grad(k * m_ + c) -= w * q_(c);
      }
    }
    return acc;
  }

 private:
  const StandardDomainMesh& mesh_;
  int m_, n_;
  Eigen::MatrixXd f_;
  std::vector<int> free_;
  std::vector<int> vert_slot_;
  CompiledPoly compiled_;
  std::vector<CompiledPoly> grad_polys_;
  Eigen::VectorXd q_;
  Eigen::VectorXd gamma_weight_;
  mutable Eigen::MatrixXd dv_{Eigen::MatrixXd()};
};

struct TrialResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  bool converged = false;
  bool diverged = false;
  bool unbounded = false;
};

// Barzilai-Borwein descent with Armijo backtracking.
TrialResult minimize_bb(const DeficitObjective& obj, Eigen::VectorXd x,
                        const OptimizerOptions& opt) {
  TrialResult res;
  Eigen::VectorXd g(obj.dof()), gn(obj.dof());
  double e = obj.value_and_grad(x, g);
  if (!std::isfinite(e)) {
    res.diverged = true;
    return res;
  }
  double alpha = 1.0 / (g.norm() + 1.0);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double gmax = g.lpNorm<Eigen::Infinity>();
    if (gmax <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    if (e <= opt.divergence_floor) {
      res.unbounded = true;
      res.converged = true;
      break;
    }
    // Backtracking on the steepest-descent direction.
    const double slope = -g.squaredNorm();
    double step = alpha;
    Eigen::VectorXd xn;
    double en = e;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      xn = x - step * g;
      en = obj.value(xn);
      if (std::isfinite(en) && en <= e + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no further progress possible at machine scale
      break;
    }
    en = obj.value_and_grad(xn, gn);
    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      alpha = std::clamp(s.squaredNorm() / sy, 1e-12, 1e12);
    } else {
      // Negative curvature along the step: expand.
      alpha = step * 2.0;
    }
    x.swap(xn);
    g.swap(gn);
    e = en;
  }
  if (!std::isfinite(e)) {
    res.diverged = true;
    return res;
  }
  res.value = e;
  res.x = std::move(x);
  return res;
}

QCBReport run_multistart(const DeficitObjective& obj, const StandardDomainMesh& mesh, int m,
                         const std::vector<int>& free_verts, int h, int trials,
                         std::uint64_t seed, const OptimizerOptions& opt) {
  std::vector<TrialResult> results(trials);
  const int nthreads = std::min(env_thread_cap(), std::max(1, trials));
  auto worker = [&](int t0) {
    for (int t = t0; t < trials; t += nthreads) {
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
      P1Field u0 = random_field(mesh, m, free_verts, rng, 1.0 / h);
      Eigen::VectorXd x0(obj.dof());
      for (size_t k = 0; k < free_verts.size(); ++k)
        for (int c = 0; c < m; ++c) x0(k * m + c) = u0.values(free_verts[k], c);
      results[t] = minimize_bb(obj, std::move(x0), opt);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  QCBReport rep;
  rep.trials = trials;
  rep.mesh_resolution = h;
  rep.seed = seed;
  int best = -1;
  for (int t = 0; t < trials; ++t) {
    const auto& r = results[t];
    if (r.diverged) {
      ++rep.diverged_trials;
      continue;
    }
    if (r.converged) ++rep.converged_trials;
    if (r.unbounded) rep.unbounded_direction = true;
    if (best < 0 || r.value < results[best].value) best = t;
  }
  if (best < 0) throw optimization_failure("all optimizer trials diverged");
  rep.estimate = results[best].value;
  rep.certificate = obj.to_field(results[best].x);
  return rep;
}

}  // namespace

QCBReport qcb_deficit(const PolyMatrixFn& v, const Eigen::MatrixXd& f, const Eigen::VectorXd& rho,
                      int h, int trials, std::uint64_t seed, const OptimizerOptions& opt) {
  auto mesh = std::make_shared<StandardDomainMesh>(
      build_standard_domain(static_cast<int>(rho.size()), rho, h));
  Eigen::VectorXd q = v.gradient_at(f) * rho;
  DeficitObjective obj(*mesh, v, f, mesh->free_qcb, &q);
  QCBReport rep = run_multistart(obj, *mesh, v.rows(), mesh->free_qcb, h, trials, seed, opt);
  const double base = CompiledPoly(v)(f) * mesh->volume();
  rep.estimate -= base;
  rep.mesh = mesh;
  rep.certificate.mesh = rep.mesh.get();
  return rep;
}

QCBReport qcb_envelope0(const PolyMatrixFn& v, const Eigen::VectorXd& rho, int h, int trials,
                        std::uint64_t seed, const OptimizerOptions& opt) {
  auto parts = v.homogeneous_parts().parts;
  int nonzero = 0;
  for (const auto& p : parts)
    if (!p.is_zero()) ++nonzero;
  if (nonzero > 1)
    throw std::invalid_argument("qcb_envelope0: integrand must be positively homogeneous");
  auto mesh = std::make_shared<StandardDomainMesh>(
      build_standard_domain(static_cast<int>(rho.size()), rho, h));
  Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(v.rows(), v.cols());
  DeficitObjective obj(*mesh, v, f0, mesh->free_qcb, nullptr);
  QCBReport rep = run_multistart(obj, *mesh, v.rows(), mesh->free_qcb, h, trials, seed, opt);
  rep.estimate = std::min(0.0, rep.estimate / mesh->volume());
  if (rep.estimate == 0.0) rep.certificate = zero_field(*mesh, v.rows());
  rep.mesh = mesh;
  rep.certificate.mesh = rep.mesh.get();
  return rep;
}

QCBReport interior_qc_deficit(const PolyMatrixFn& v, const Eigen::MatrixXd& f, int h, int trials,
                              std::uint64_t seed, const OptimizerOptions& opt) {
  // Interior test runs on the same reference geometry with normal e_n.
  const int n = v.cols();
  auto mesh = std::make_shared<StandardDomainMesh>(
      build_standard_domain(n, Eigen::VectorXd::Unit(n, n - 1), h));
  DeficitObjective obj(*mesh, v, f, mesh->free_interior, nullptr);
  QCBReport rep = run_multistart(obj, *mesh, v.rows(), mesh->free_interior, h, trials, seed, opt);
  rep.estimate = rep.estimate / mesh->volume() - CompiledPoly(v)(f);
  rep.mesh = mesh;
  rep.certificate.mesh = rep.mesh.get();
  return rep;
}

std::string QCBReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = "v1";
  j["estimate"] = estimate;
  j["trials"] = trials;
  j["converged_trials"] = converged_trials;
  j["diverged_trials"] = diverged_trials;
  j["mesh_resolution"] = mesh_resolution;
  j["unbounded_direction"] = unbounded_direction;
  j["seed"] = seed;
  auto cert = nlohmann::json::array();
  if (certificate.mesh) {
    for (int vrow = 0; vrow < certificate.values.rows(); ++vrow) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < certificate.values.cols(); ++c) row.push_back(certificate.values(vrow, c));
      cert.push_back(row);
    }
  }
  j["certificate"] = cert;
  return j.dump(2);
}

}  // namespace nullag

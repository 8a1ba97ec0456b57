#include "nullag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nullag {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
const double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kGaussWeights[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                 0.417959183673469, 0.381830050505119, 0.279705391489277,
                                 0.129484966168870};

struct GK {
  double kronrod, err;
};

GK gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double kr = 0, gs = 0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + h * kKronrodNodes[i]);
    kr += kKronrodWeights[i] * v;
    if (i % 2 == 1) gs += kGaussWeights[i / 2] * v;
  }
  evals += 15;
  return {kr * h, std::abs(kr - gs) * h};
}

void adapt_1d(const std::function<double(double)>& f, double a, double b, double tol,
              int depth, int max_depth, QuadratureResult& out) {
  GK r = gk15(f, a, b, out.evaluations);
  if (r.err <= tol || depth >= max_depth) {
    out.value += r.kronrod;
    out.error_estimate += r.err;
    if (depth >= max_depth && r.err > tol) out.converged = false;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt_1d(f, a, m, tol * 0.5, depth + 1, max_depth, out);
  adapt_1d(f, m, b, tol * 0.5, depth + 1, max_depth, out);
}

}  // namespace

QuadratureResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth) {
  QuadratureResult out;
  GK first = gk15(f, a, b, out.evaluations);
  const double tol = std::max(abs_tol, rel_tol * std::abs(first.kronrod));
  out.evaluations = 0;
  adapt_1d(f, a, b, tol, 0, max_depth, out);
  return out;
}

double Box::volume() const {
  double v = 1;
  for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

namespace {

const double kG5Nodes[5] = {-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683,
                            0.906179845938664};
const double kG5Weights[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                              0.478628670499366, 0.236926885056189};
const double kG3Nodes[3] = {-0.774596669241483, 0.0, 0.774596669241483};
const double kG3Weights[3] = {0.555555555555556, 0.888888888888889, 0.555555555555556};

double tensor_gauss(const std::function<double(const std::vector<double>&)>& f, const Box& b,
                    const double* nodes, const double* weights, int npts, long& evals) {
  const int d = b.dim();
  std::vector<int> idx(d, 0);
  std::vector<double> x(d);
  double acc = 0;
  while (true) {
    double w = 1;
    for (int i = 0; i < d; ++i) {
      const double c = 0.5 * (b.lo[i] + b.hi[i]), h = 0.5 * (b.hi[i] - b.lo[i]);
      x[i] = c + h * nodes[idx[i]];
      w *= h * weights[idx[i]];
    }
    acc += w * f(x);
    ++evals;
    int i = 0;
    while (i < d && ++idx[i] == npts) idx[i++] = 0;
    if (i == d) break;
  }
  return acc;
}

struct BoxItem {
  Box box;
  double value;  // 5-point estimate
  double err;
  bool operator<(const BoxItem& rhs) const { return err < rhs.err; }
};

BoxItem eval_box(const std::function<double(const std::vector<double>&)>& f, Box b, long& evals) {
  double v5 = tensor_gauss(f, b, kG5Nodes, kG5Weights, 5, evals);
  double v3 = tensor_gauss(f, b, kG3Nodes, kG3Weights, 3, evals);
  return {std::move(b), v5, std::abs(v5 - v3)};
}

}  // namespace

QuadratureResult integrate_box(const std::function<double(const std::vector<double>&)>& f,
                               const Box& box, double abs_tol, double rel_tol,
                               int max_subdivisions) {
  QuadratureResult out;
  std::priority_queue<BoxItem> heap;
  heap.push(eval_box(f, box, out.evaluations));
  double total = heap.top().value, total_err = heap.top().err;
  int splits = 0;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && splits < max_subdivisions) {
    BoxItem worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_err -= worst.err;
    int axis = 0;
    for (int i = 1; i < worst.box.dim(); ++i)
      if (worst.box.hi[i] - worst.box.lo[i] > worst.box.hi[axis] - worst.box.lo[axis]) axis = i;
    const double mid = 0.5 * (worst.box.lo[axis] + worst.box.hi[axis]);
    Box left = worst.box, right = worst.box;
    left.hi[axis] = mid;
    right.lo[axis] = mid;
    for (auto& half : {left, right}) {
      BoxItem item = eval_box(f, half, out.evaluations);
      total += item.value;
      total_err += item.err;
      heap.push(std::move(item));
    }
    ++splits;
  }
  out.value = total;
  out.error_estimate = total_err;
  out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total)) * 1.0001 + 1e-300;
  return out;
}

}  // namespace nullag

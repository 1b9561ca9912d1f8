#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a list of panels.
//
// Nodes are strictly interior, so integrands are never evaluated at panel
// endpoints. Endpoints flagged as singular are handled with the substitution
// r = endpoint +/- t^2, which removes inverse-square-root singularities and
// square-root cusps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tethercov {

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  bool singular_lo = false;
  bool singular_hi = false;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, Panel worst)
      : std::runtime_error(what), worst_panel(worst) {}
  Panel worst_panel;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Change of variables mapping an interval to a smooth parameter range.
struct Mapping {
  enum class Kind { Linear, SqrtLo, SqrtHi } kind = Kind::Linear;
  double anchor = 0.0;  ///< singular endpoint for the sqrt maps

  /// Returns x(t) and writes dx/dt.
  double map(double t, double& jac) const {
    switch (kind) {
      case Kind::SqrtLo:
        jac = 2.0 * t;
        return anchor + t * t;
      case Kind::SqrtHi:
        jac = 2.0 * t;
        return anchor - t * t;
      case Kind::Linear:
      default:
        jac = 1.0;
        return t;
    }
  }
};

template <std::size_t N>
struct Segment {
  double a = 0.0;  ///< parameter-space bounds
  double b = 0.0;
  Mapping mapping;
  std::size_t panel = 0;
  std::array<double, N> value{};
  double error = 0.0;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <std::size_t N>
double component_sum(const std::array<double, N>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss estimate.
/// The error heuristic (QUADPACK's) is applied to the sum of components.
template <std::size_t N, class F>
void gk15(F& f, Segment<N>& s) {
  using Vec = std::array<double, N>;
  const double center = 0.5 * (s.a + s.b);
  const double half = 0.5 * (s.b - s.a);
  const double abs_half = std::abs(half);
  auto eval = [&](double t) {
    double jac = 0.0;
    const double x = s.mapping.map(t, jac);
    Vec v = f(x);
    for (auto& c : v) c *= jac;
    return v;
  };
  const Vec fc = eval(center);
  Vec res_k{}, res_g{};
  std::array<double, 15> sums{};
  for (std::size_t c = 0; c < N; ++c) {
    res_k[c] = fc[c] * kKronrodW[7];
    res_g[c] = fc[c] * kGaussW[3];
  }
  sums[14] = component_sum(fc);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodX[j];
    const Vec f1 = eval(center - dx);
    const Vec f2 = eval(center + dx);
    for (std::size_t c = 0; c < N; ++c) {
      res_k[c] += kKronrodW[j] * (f1[c] + f2[c]);
      if (j % 2 == 1) res_g[c] += kGaussW[j / 2] * (f1[c] + f2[c]);
    }
    sums[2 * j] = component_sum(f1);
    sums[2 * j + 1] = component_sum(f2);
  }
  const double k_sum = component_sum(res_k);
  const double mean = 0.5 * k_sum;
  double res_abs = kKronrodW[7] * std::abs(sums[14]);
  double res_asc = kKronrodW[7] * std::abs(sums[14] - mean);
  for (int j = 0; j < 7; ++j) {
    res_abs += kKronrodW[j] * (std::abs(sums[2 * j]) + std::abs(sums[2 * j + 1]));
    res_asc += kKronrodW[j] * (std::abs(sums[2 * j] - mean) + std::abs(sums[2 * j + 1] - mean));
  }
  double err = std::abs(k_sum - component_sum(res_g)) * abs_half;
  res_abs *= abs_half;
  res_asc *= abs_half;
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  const double round = 50.0 * std::numeric_limits<double>::epsilon() * res_abs;
  if (round > std::numeric_limits<double>::min()) err = std::max(round, err);
  // abs_half makes a reversed parameter range (SqrtHi) integrate with the
  // orientation that matches x increasing.
  for (auto& c : res_k) c *= abs_half;
  s.value = res_k;
  s.error = err;
}

template <std::size_t N>
void seed_segments(const Panel& p, std::size_t index, std::vector<Segment<N>>& out) {
  if (!(p.hi > p.lo)) return;
  auto add_lo = [&](double a, double b) {
    // x in [a, b] with singular a: x = a + t^2, t in [0, sqrt(b - a)]
    out.push_back({0.0, std::sqrt(b - a), {Mapping::Kind::SqrtLo, a}, index});
  };
  auto add_hi = [&](double a, double b) {
    // x in [a, b] with singular b: x = b - t^2, t from sqrt(b - a) down to 0
    out.push_back({std::sqrt(b - a), 0.0, {Mapping::Kind::SqrtHi, b}, index});
  };
  if (p.singular_lo && p.singular_hi) {
    const double mid = 0.5 * (p.lo + p.hi);
    add_lo(p.lo, mid);
    add_hi(mid, p.hi);
  } else if (p.singular_lo) {
    add_lo(p.lo, p.hi);
  } else if (p.singular_hi) {
    add_hi(p.lo, p.hi);
  } else {
    out.push_back({p.lo, p.hi, {}, index});
  }
}

}  // namespace detail

template <std::size_t N>
struct VectorIntegral {
  std::array<double, N> value{};
  double error = 0.0;  ///< estimate for the sum of components
  std::size_t evaluations = 0;
};

/// Integrates a vector-valued f (returning std::array<double, N>) over the
/// union of panels. The absolute error target applies to the sum of the
/// components.
///
/// Throws QuadratureError carrying the worst panel when the evaluation budget
/// is exhausted before the target is met.
template <std::size_t N, class F>
VectorIntegral<N> integrate_adaptive_vec(F&& f, std::span<const Panel> panels, double abs_tol,
                                         std::size_t max_evals = 100000) {
  using Seg = detail::Segment<N>;
  std::vector<Seg> init;
  init.reserve(panels.size() * 2);
  for (std::size_t i = 0; i < panels.size(); ++i) detail::seed_segments(panels[i], i, init);

  VectorIntegral<N> out;
  std::priority_queue<Seg> heap;
  double total_err = 0.0;
  for (auto& s : init) {
    detail::gk15(f, s);
    out.evaluations += 15;
    total_err += s.error;
    heap.push(s);
  }
  while (total_err > abs_tol && !heap.empty()) {
    const Seg worst = heap.top();
    if (std::abs(worst.b - worst.a) < 1e-13 * (1.0 + std::abs(worst.a))) break;  // roundoff floor
    if (out.evaluations + 30 > max_evals) {
      std::ostringstream msg;
      msg << "quadrature budget of " << max_evals << " evaluations exceeded (error "
          << total_err << " > " << abs_tol << ")";
      throw QuadratureError(msg.str(), panels[worst.panel]);
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Seg left{worst.a, mid, worst.mapping, worst.panel};
    Seg right{mid, worst.b, worst.mapping, worst.panel};
    detail::gk15(f, left);
    detail::gk15(f, right);
    out.evaluations += 30;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the leaves to shed drift from the incremental updates.
  double err = 0.0;
  for (; !heap.empty(); heap.pop()) {
    const Seg& s = heap.top();
    for (std::size_t c = 0; c < N; ++c) out.value[c] += s.value[c];
    err += s.error;
  }
  out.error = err;
  return out;
}

/// Scalar form of integrate_adaptive_vec.
template <class F>
Integral integrate_adaptive(F&& f, std::span<const Panel> panels, double abs_tol,
                            std::size_t max_evals = 100000) {
  auto wrapped = [&f](double x) { return std::array<double, 1>{f(x)}; };
  const auto r = integrate_adaptive_vec<1>(wrapped, panels, abs_tol, max_evals);
  return {r.value[0], r.error, r.evaluations};
}

template <class F>
Integral integrate_adaptive(F&& f, const std::vector<Panel>& panels, double abs_tol,
                            std::size_t max_evals = 100000) {
  return integrate_adaptive(std::forward<F>(f), std::span<const Panel>(panels), abs_tol, max_evals);
}

}  // namespace tethercov

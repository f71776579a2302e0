#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "tccopula/errors.hpp"
#include "tccopula/gaussmath.hpp"

namespace tccopula {

namespace {

// Kronrod abscissae; odd indices are the 7-point Gauss abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double abs_error;
};

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("QuadratureConfig: abs_tol must be > 0");
  if (max_subdivisions < 1) throw DomainError("QuadratureConfig: max_subdivisions must be >= 1");
}

// Layout: x[0..6] = c - h*xgk[j], x[7] = c, x[8..14] = c + h*xgk[j].
void gk15_nodes(double a, double b, std::span<double> x) noexcept {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int j = 0; j < 7; ++j) {
    x[j] = center - half * kXgk[j];
    x[8 + j] = center + half * kXgk[j];
  }
  x[7] = center;
}

PanelEstimate gk15_panel(double a, double b, std::span<const double> fx) noexcept {
  const double half = 0.5 * (b - a);
  const double fc = fx[7];
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  for (int j = 0; j < 7; ++j) {
    const double f1 = fx[j];
    const double f2 = fx[8 + j];
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fx[j] - reskh) + std::fabs(fx[8 + j] - reskh));

  const double ahalf = std::fabs(half);
  resabs *= ahalf;
  resasc *= ahalf;
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {resk * half, err};
}

QuadratureResult integrate_adaptive(const BatchIntegrand& f, double a, double b,
                                    const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return {0.0, 0.0, 1, true};

  std::array<double, 2 * kGk15Points> x{};
  std::array<double, 2 * kGk15Points> fx{};

  gk15_nodes(a, b, std::span(x).first(kGk15Points));
  f(std::span<const double>(x).first(kGk15Points), std::span(fx).first(kGk15Points));
  const PanelEstimate first = gk15_panel(a, b, std::span<const double>(fx).first(kGk15Points));

  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(cfg.max_subdivisions));
  panels.push_back({a, b, first.value, first.abs_error});
  double total_error = first.abs_error;
  bool exhausted_resolution = false;

  while (total_error > cfg.abs_tol && static_cast<int>(panels.size()) < cfg.max_subdivisions) {
    auto worst = std::max_element(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) {
      return l.abs_error < r.abs_error;
    });
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) {
      exhausted_resolution = true;
      break;
    }
    gk15_nodes(lo, mid, std::span(x).first(kGk15Points));
    gk15_nodes(mid, hi, std::span(x).subspan(kGk15Points));
    f(x, fx);
    const PanelEstimate left = gk15_panel(lo, mid, std::span<const double>(fx).first(kGk15Points));
    const PanelEstimate right = gk15_panel(mid, hi, std::span<const double>(fx).subspan(kGk15Points));
    *worst = {lo, mid, left.value, left.abs_error};
    panels.push_back({mid, hi, right.value, right.abs_error});

    total_error = 0.0;
    for (const Panel& p : panels) total_error += p.abs_error;
  }

  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadratureResult result;
  for (const Panel& p : panels) {
    result.value += p.value;
    result.abs_error += p.abs_error;
  }
  result.intervals = static_cast<int>(panels.size());
  result.converged = !exhausted_resolution && result.abs_error <= cfg.abs_tol;
  return result;
}

double integrate(const BatchIntegrand& f, double a, double b, const QuadratureConfig& cfg) {
  const QuadratureResult r = integrate_adaptive(f, a, b, cfg);
  if (!r.converged) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integrate: no convergence on [" << a << ", " << b << "] after " << r.intervals
        << " panels (estimate " << r.value << ", error " << r.abs_error << " > tolerance "
        << cfg.abs_tol << ")";
    throw ConvergenceError(msg.str(), r.value, r.abs_error);
  }
  return r.value;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
  return integrate(
      [&f](std::span<const double> x, std::span<double> fx) {
        for (std::size_t i = 0; i < x.size(); ++i) fx[i] = f(x[i]);
      },
      a, b, cfg);
}

}  // namespace tccopula

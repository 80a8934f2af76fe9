#include "stepgnn/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace stepgnn {

double sigma_star(double x) {
  if (x < 0.5) return 0.0;
  if (x > 0.5) return 1.0;
  return 0.5;
}

Activation::Activation(std::string name, ScalarMap f, ScalarMap d1, ScalarMap d2)
    : name_(std::move(name)), f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)) {}

double Activation::derivative(double x) const {
  if (d1_) return d1_(x);
  const double h = kFiniteDifferenceStep;
  return (f_(x + h) - f_(x - h)) / (2.0 * h);
}

double Activation::second_derivative(double x) const {
  if (d2_) return d2_(x);
  const double h = kFiniteDifferenceStep;
  return (f_(x + h) - 2.0 * f_(x) + f_(x - h)) / (h * h);
}

void StepLikeParams::validate() const {
  if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (N < 0) throw std::invalid_argument("N must be non-negative");
  if (!(H > 0.0)) throw std::invalid_argument("H must be positive");
}

namespace {

constexpr double kPi = std::numbers::pi;

double sech2(double x) {
  const double c = std::cosh(x);
  return std::isinf(c) ? 0.0 : 1.0 / (c * c);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// tanh realised through the logistic function.
double tanh_via_sigmoid(double x) { return 2.0 * logistic(2.0 * x) - 1.0; }

}  // namespace

Activation relu() {
  return Activation("relu", [](double x) { return x > 0.0 ? x : 0.0; });
}

Activation crelu() {
  return Activation("crelu", [](double x) { return std::clamp(x, 0.0, 1.0); });
}

Activation sigma_star_activation() {
  return Activation("sigma-star", [](double x) { return sigma_star(x); });
}

Activation sigmoid() {
  return Activation(
      "sigmoid", logistic,
      [](double x) {
        const double s = logistic(x);
        return s * (1.0 - s);
      },
      [](double x) {
        const double s = logistic(x);
        return s * (1.0 - s) * (1.0 - 2.0 * s);
      });
}

Activation tanh_activation() {
  return Activation(
      "tanh", [](double x) { return std::tanh(x); }, [](double x) { return sech2(x); },
      [](double x) { return -2.0 * sech2(x) * std::tanh(x); });
}

Activation arctan_4pi() {
  return Activation(
      "arctan-4pi", [](double x) { return 4.0 / kPi * std::atan(x); },
      [](double x) { return 4.0 / kPi / (1.0 + x * x); },
      [](double x) { return -8.0 / kPi * x / ((1.0 + x * x) * (1.0 + x * x)); });
}

StepLike make_step_arctan() {
  Activation a(
      "step-arctan", [](double x) { return 0.5 + 2.0 / kPi * std::atan(2.0 * x - 1.0); },
      [](double x) {
        const double u = 2.0 * x - 1.0;
        return 4.0 / kPi / (1.0 + u * u);
      },
      [](double x) {
        const double u = 2.0 * x - 1.0;
        const double q = 1.0 + u * u;
        return -16.0 / kPi * u / (q * q);
      });
  return {std::move(a), {0.64, 0.1, 0, 1.52}};
}

namespace {

const double kTanhHalf = std::tanh(0.5);

double sigma_tanh(double x) { return 0.5 + std::tanh(x - 0.5) / (2.0 * kTanhHalf); }
double sigma_tanh_d1(double x) { return sech2(x - 0.5) / (2.0 * kTanhHalf); }
double sigma_tanh_d2(double x) {
  const double y = x - 0.5;
  return -sech2(y) * std::tanh(y) / kTanhHalf;
}

// Inner map of the eta = 0 construction,
//   tau(x) = P(a (2x - 1)) / (2 P(a)) + 1/2,  P(y) = tanh y - (alpha/2) tanh 2y + tanh 3y.
// P'(y) = sech^2(2y) (R(y) - alpha) with R the minimised ratio, so P' >= 0
// with double zeros exactly at y = +-a, i.e. tau'(x) = 0 iff x in {0, 1}.
struct InnerMap {
  double a;
  double c;      // alpha / 2
  double scale;  // 2 P(a)

  template <class Tanh>
  double p(double y, Tanh th) const {
    return th(y) - c * th(2.0 * y) + th(3.0 * y);
  }
  double p1(double y) const { return sech2(y) - 2.0 * c * sech2(2.0 * y) + 3.0 * sech2(3.0 * y); }
  double p2(double y) const {
    return -2.0 * sech2(y) * std::tanh(y) + 8.0 * c * sech2(2.0 * y) * std::tanh(2.0 * y) -
           18.0 * sech2(3.0 * y) * std::tanh(3.0 * y);
  }
};

InnerMap make_inner_map() {
  const auto k = tanh_eta0_constants();
  InnerMap m{k.a, k.alpha / 2.0, 0.0};
  m.scale = 2.0 * m.p(k.a, [](double y) { return std::tanh(y); });
  return m;
}

}  // namespace

StepLike make_step_tanh() {
  return {Activation("step-tanh", sigma_tanh, sigma_tanh_d1, sigma_tanh_d2),
          {0.86, 0.16, 0, 0.84}};
}

StepLike make_steplike_tanh_eta0() {
  const InnerMap in = make_inner_map();
  auto tau = [in](double x) {
    return in.p(in.a * (2.0 * x - 1.0), [](double y) { return std::tanh(y); }) / in.scale + 0.5;
  };
  auto tau1 = [in](double x) { return 2.0 * in.a * in.p1(in.a * (2.0 * x - 1.0)) / in.scale; };
  auto tau2 = [in](double x) {
    return 4.0 * in.a * in.a * in.p2(in.a * (2.0 * x - 1.0)) / in.scale;
  };
  Activation act(
      "steplike-tanh-eta0", [tau](double x) { return sigma_tanh(tau(x)); },
      [tau, tau1](double x) { return sigma_tanh_d1(tau(x)) * tau1(x); },
      [tau, tau1, tau2](double x) {
        const double t = tau(x);
        const double t1 = tau1(x);
        return sigma_tanh_d2(t) * t1 * t1 + sigma_tanh_d1(t) * tau2(x);
      });
  return {std::move(act), {0.0, 0.2, 0, 2.2}};
}

StepLike make_step_sigmoid() {
  const InnerMap in = make_inner_map();
  const double scale = 2.0 * in.p(in.a, tanh_via_sigmoid);
  const double half = tanh_via_sigmoid(0.5);
  auto f = [in, scale, half](double x) {
    const double t = in.p(in.a * (2.0 * x - 1.0), tanh_via_sigmoid) / scale + 0.5;
    return 0.5 + tanh_via_sigmoid(t - 0.5) / (2.0 * half);
  };
  return {Activation("steplike-sigmoid-eta0", f), {0.0, 0.2, 0, 2.2}};
}

double golden_section_minimize(const ScalarMap& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

TanhEta0Constants tanh_eta0_constants() {
  static const TanhEta0Constants k = [] {
    auto ratio = [](double x) { return (sech2(x) + 3.0 * sech2(3.0 * x)) / sech2(2.0 * x); };
    constexpr double lo = 0.3;
    constexpr double hi = 0.6;
    const double a = golden_section_minimize(ratio, lo, hi, 1e-10);
    if (a - lo < 1e-6 || hi - a < 1e-6)
      throw std::runtime_error("minimiser of the sech^2 ratio is not bracketed by [0.3, 0.6]");
    return TanhEta0Constants{a, ratio(a)};
  }();
  return k;
}

double iterate(const Activation& a, int m, double x) {
  if (m < 0) throw std::invalid_argument("composition depth must be non-negative");
  for (int i = 0; i < m; ++i) x = a(x);
  return x;
}

std::vector<double> Grid::points() const {
  std::vector<double> xs(count);
  if (count == 0) return xs;
  if (count == 1) {
    xs[0] = lo;
    return xs;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) xs[i] = lo + step * static_cast<double>(i);
  xs.back() = hi;
  return xs;
}

namespace {

bool outside_band(double x, double eps) { return x <= eps || x >= 1.0 - eps; }

void record(ConditionCheck& c, double value, double x) {
  ++c.checked;
  if (value > c.worst || c.checked == 1) {
    c.worst = value;
    c.where = x;
  }
}

}  // namespace

StepLikeReport verify_step_like(const Activation& a, const StepLikeParams& p, const Grid& grid,
                                double tol) {
  p.validate();
  StepLikeReport rep{a.name(), p, grid, tol, {}, {}, {}, {}};

  rep.fixed_points.limit = 0.0;
  record(rep.fixed_points, std::abs(a(0.0)), 0.0);
  record(rep.fixed_points, std::abs(a(1.0) - 1.0), 1.0);
  rep.fixed_points.pass = rep.fixed_points.worst <= tol;

  rep.derivative.limit = p.eta;
  record(rep.derivative, std::abs(a.derivative(0.0)), 0.0);
  record(rep.derivative, std::abs(a.derivative(1.0)), 1.0);
  rep.derivative.pass = rep.derivative.worst <= p.eta + tol;

  rep.closeness.limit = std::min(p.eps, (1.0 - p.eta) / p.H);
  rep.curvature.limit = p.H;
  for (double x : grid.points()) {
    if (!outside_band(x, p.eps)) continue;
    const double y = iterate(a, p.N, x);
    record(rep.closeness, std::abs(y - sigma_star(x)), x);
    record(rep.curvature, std::abs(a.second_derivative(y)), y);
  }
  rep.closeness.pass = rep.closeness.worst <= rep.closeness.limit + tol;
  rep.curvature.pass = rep.curvature.worst <= rep.curvature.limit + tol;
  return rep;
}

double convergence_bound(const StepLikeParams& p, int m) {
  if (m < p.N)
    throw std::invalid_argument("composition depth " + std::to_string(m) + " below N = " +
                                std::to_string(p.N));
  const int k = m - p.N;
  if (p.eta > 0.0) return p.eps * std::pow((1.0 + p.eta) / 2.0, k);
  // 2^(2^k - 1) overflows double long before k = 11.
  if (k >= 11) return 0.0;
  return std::ldexp(p.eps, -((1 << k) - 1));
}

std::vector<double> observed_convergence(const Activation& a, const StepLikeParams& p,
                                         const Grid& grid, int m_lo, int m_hi) {
  if (m_lo < 0 || m_hi < m_lo) throw std::invalid_argument("invalid composition depth range");
  std::vector<double> xs;
  for (double x : grid.points())
    if (outside_band(x, p.eps)) xs.push_back(x);
  std::vector<double> ys = xs;
  for (auto& y : ys) y = iterate(a, m_lo, y);
  std::vector<double> worst;
  for (int m = m_lo; m <= m_hi; ++m) {
    if (m > m_lo)
      for (auto& y : ys) y = a(y);
    double w = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) w = std::max(w, std::abs(ys[i] - sigma_star(xs[i])));
    worst.push_back(w);
  }
  return worst;
}

int required_composition_depth(const StepLikeParams& p, int delta) {
  p.validate();
  if (delta < 0) throw std::invalid_argument("max degree must be non-negative");
  const double factor = 2.0 * (static_cast<double>(delta) + 2.0);
  for (int m = p.N; m < p.N + 100000; ++m)
    if (factor * convergence_bound(p, m) < 1.0) return m;
  throw std::runtime_error("composition depth scan did not terminate");
}

DepthClosedForms closed_form_composition_depth(const StepLikeParams& p, int delta) {
  const double lg = std::log2(static_cast<double>(delta) + 2.0);
  if (p.eta == 0.0) {
    const double v = p.N + std::log2(2.0 + lg);
    return {v, v};
  }
  return {p.N + (2.0 + lg) / (1.0 - std::log2(1.0 - p.eta)),
          p.N + (2.0 + lg) / (1.0 - std::log2(1.0 + p.eta))};
}

ContractionReport contraction_check(const Activation& f, double x0, double r, double eta,
                                           double H, int n, std::size_t samples, double tol) {
  if (!(r > 0.0) || !(H > 0.0) || !(eta >= 0.0 && eta < 1.0) || n < 0)
    throw std::invalid_argument("invalid contraction check parameters");
  if (H * r > 1.0 - eta)
    throw std::invalid_argument("hypothesis H r <= 1 - eta violated");
  ContractionReport rep;
  rep.worst_slack = -std::numeric_limits<double>::infinity();
  const Grid grid{x0 - r, x0 + r, samples};
  for (double x : grid.points()) {
    rep.measured_sup_second_derivative =
        std::max(rep.measured_sup_second_derivative, std::abs(f.second_derivative(x)));
    const double dist0 = std::abs(x - x0);
    double y = x;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) y = f(y);
      double bound = 0.0;
      if (eta > 0.0) {
        bound = std::pow((1.0 + eta) / 2.0, k) * dist0;
      } else {
        // (H/2)^(2^k - 1) |x - x0|^(2^k) = (2/H) ((H/2) |x - x0|)^(2^k)
        bound = 2.0 / H * std::pow(H / 2.0 * dist0, std::ldexp(1.0, k));
      }
      const double slack = std::abs(y - x0) - bound;
      ++rep.checked;
      if (slack > rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_x = x;
        rep.worst_n = k;
      }
    }
  }
  rep.pass = rep.worst_slack <= tol;
  return rep;
}

ActivationSpec::ActivationSpec(Activation base, int m, std::optional<StepLikeParams> step)
    : base_(std::move(base)), m_(m), step_(step), shifted_(base_.name() == "arctan-4pi") {
  if (m < 0) throw std::invalid_argument("composition depth must be non-negative");
}

double ActivationSpec::operator()(double z) const {
  if (shifted_) return 0.5 + 0.5 * iterate(base_, m_, z - 0.5);
  return iterate(base_, m_, z);
}

const std::vector<std::string>& activation_names() {
  static const std::vector<std::string> names = {
      "relu",      "crelu",     "sigma-star",         "sigmoid",
      "tanh",      "step-arctan", "step-tanh",        "steplike-tanh-eta0",
      "steplike-sigmoid-eta0", "arctan-4pi"};
  return names;
}

const std::vector<std::string>& step_like_names() {
  static const std::vector<std::string> names = {"step-arctan", "step-tanh", "steplike-tanh-eta0",
                                                 "steplike-sigmoid-eta0"};
  return names;
}

std::optional<StepLike> step_like_by_name(std::string_view name) {
  if (name == "step-arctan") return make_step_arctan();
  if (name == "step-tanh") return make_step_tanh();
  if (name == "steplike-tanh-eta0") return make_steplike_tanh_eta0();
  if (name == "steplike-sigmoid-eta0") return make_step_sigmoid();
  return std::nullopt;
}

ActivationSpec activation_by_name(std::string_view name, int m) {
  if (auto s = step_like_by_name(name)) return ActivationSpec(s->activation, m, s->params);
  if (name == "relu") return ActivationSpec(relu(), m);
  if (name == "crelu") return ActivationSpec(crelu(), m);
  if (name == "sigma-star") return ActivationSpec(sigma_star_activation(), m);
  if (name == "sigmoid") return ActivationSpec(sigmoid(), m);
  if (name == "tanh") return ActivationSpec(tanh_activation(), m);
  if (name == "arctan-4pi") return ActivationSpec(arctan_4pi(), m);
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

}  // namespace stepgnn

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stepgnn {

using ScalarMap = std::function<double(double)>;

/// Linear threshold activation: 0 below 1/2, 1/2 at 1/2, 1 above.
double sigma_star(double x);

/// Named scalar activation. Derivatives fall back to central finite
/// differences (step 1e-5) when no closed form is attached.
class Activation {
 public:
  Activation(std::string name, ScalarMap f, ScalarMap d1 = {}, ScalarMap d2 = {});

  const std::string& name() const { return name_; }
  double operator()(double x) const { return f_(x); }
  double derivative(double x) const;
  double second_derivative(double x) const;
  bool has_closed_form_derivatives() const { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }

  static constexpr double kFiniteDifferenceStep = 1e-5;

 private:
  std::string name_;
  ScalarMap f_;
  ScalarMap d1_;
  ScalarMap d2_;
};

/// Certificate (eta, eps, N, H) of a step-like activation.
struct StepLikeParams {
  double eta = 0.0;  // [0, 1)
  double eps = 0.25; // (0, 1/2)
  int N = 0;         // >= 0
  double H = 1.0;    // > 0

  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
};

struct StepLike {
  Activation activation;
  StepLikeParams params;
};

Activation relu();
Activation crelu();
Activation sigma_star_activation();
Activation sigmoid();
Activation tanh_activation();
/// x -> (4/pi) arctan(x); fixed points -1, 0, 1.
Activation arctan_4pi();

/// 1/2 + (2/pi) arctan(2x - 1), certificate (0.64, 0.1, 0, 1.52).
StepLike make_step_arctan();
/// 1/2 + tanh(x - 1/2) / (2 tanh(1/2)), certificate (0.86, 0.16, 0, 0.84).
StepLike make_step_tanh();
/// sigma_tanh composed with a three-tanh inner map flat at 0 and 1,
/// certificate (0, 0.2, 0, 2.2).
StepLike make_steplike_tanh_eta0();
/// The same map with every tanh realised as 2 Sigmoid(2x) - 1.
StepLike make_step_sigmoid();

/// Constants of the eta = 0 tanh construction: `a` minimises
/// (sech^2 x + 3 sech^2 3x) / sech^2 2x and `alpha` is the minimum value.
struct TanhEta0Constants {
  double a;
  double alpha;
};
/// Golden-section search on [0.3, 0.6] to 1e-10. Throws std::runtime_error
/// when the minimum is not bracketed in the interior.
TanhEta0Constants tanh_eta0_constants();

/// Golden-section minimisation of a unimodal function on [lo, hi].
double golden_section_minimize(const ScalarMap& f, double lo, double hi, double tol);

/// sigma applied m times; m = 0 is the identity.
double iterate(const Activation& a, int m, double x);

/// Evenly spaced sample points over [lo, hi], endpoints included.
struct Grid {
  double lo = -50.0;
  double hi = 51.0;
  std::size_t count = 100000;

  std::vector<double> points() const;
};

/// Outcome of one step-like condition: worst observed quantity against its
/// limit, and where it happened.
struct ConditionCheck {
  bool pass = true;
  double worst = 0.0;
  double limit = 0.0;
  double where = 0.0;
  std::size_t checked = 0;
};

struct StepLikeReport {
  std::string name;
  StepLikeParams params;
  Grid grid;
  double tol = 1e-9;
  ConditionCheck fixed_points;  // (a)
  ConditionCheck derivative;    // (b)
  ConditionCheck closeness;     // (c)
  ConditionCheck curvature;     // (d)

  bool pass() const {
    return fixed_points.pass && derivative.pass && closeness.pass && curvature.pass;
  }
};

/// Checks the four step-like conditions on the grid points outside
/// (eps, 1 - eps); (d) is checked on their image under sigma^N.
StepLikeReport verify_step_like(const Activation& a, const StepLikeParams& p, const Grid& grid,
                                double tol = 1e-9);

/// eps ((1 + eta) / 2)^(m - N) for eta > 0 and eps / 2^(2^(m - N) - 1) for
/// eta = 0. Throws std::invalid_argument when m < N.
double convergence_bound(const StepLikeParams& p, int m);

/// Worst |sigma^m(x) - sigma*(x)| over grid points outside (eps, 1 - eps),
/// for m = m_lo..m_hi.
std::vector<double> observed_convergence(const Activation& a, const StepLikeParams& p,
                                         const Grid& grid, int m_lo, int m_hi);

/// Smallest m >= N with 2 (delta + 2) convergence_bound(p, m) < 1.
int required_composition_depth(const StepLikeParams& p, int delta);

/// The two closed-form depth estimates: the one as usually printed, with
/// denominator 1 - log2(1 - eta), and the one consistent with the
/// ((1 + eta) / 2) contraction rate, 1 - log2(1 + eta). Equal when eta = 0.
struct DepthClosedForms {
  double printed;
  double rate_consistent;
};
DepthClosedForms closed_form_composition_depth(const StepLikeParams& p, int delta);

struct ContractionReport {
  bool pass = true;
  double worst_slack = 0.0;  // max over samples of |f^n(x) - x0| - bound
  double worst_x = 0.0;
  int worst_n = 0;
  double measured_sup_second_derivative = 0.0;
  std::size_t checked = 0;
};

/// Attractive fixed point check on [x0 - r, x0 + r] for iterates 0..n.
/// Throws std::invalid_argument when H r > 1 - eta.
ContractionReport contraction_check(const Activation& f, double x0, double r, double eta,
                                           double H, int n, std::size_t samples = 1000,
                                           double tol = 1e-12);

/// An activation as used inside a combine function: base map composed m
/// times. `arctan-4pi` is the shifted composite 1/2 + f^m(z - 1/2) / 2.
class ActivationSpec {
 public:
  ActivationSpec(Activation base, int m, std::optional<StepLikeParams> step = {});

  const Activation& base() const { return base_; }
  const std::string& name() const { return base_.name(); }
  int composition_depth() const { return m_; }
  const std::optional<StepLikeParams>& step_params() const { return step_; }

  double operator()(double z) const;

 private:
  Activation base_;
  int m_;
  std::optional<StepLikeParams> step_;
  bool shifted_;
};

/// Names: relu, crelu, sigma-star, sigmoid, tanh, step-arctan, step-tanh,
/// steplike-tanh-eta0, steplike-sigmoid-eta0, arctan-4pi.
ActivationSpec activation_by_name(std::string_view name, int m = 1);
std::optional<StepLike> step_like_by_name(std::string_view name);
const std::vector<std::string>& activation_names();
const std::vector<std::string>& step_like_names();

}  // namespace stepgnn

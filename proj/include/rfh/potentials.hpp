#pragma once

#include "rfh/spectrum.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace rfh {

enum class PotentialKind { sphere, ellipsoid, p_power, custom_quadratic_plus, linear_blend, cutoff_blend, custom };
enum class Symmetry { none, s1, z2 };

std::string to_string(PotentialKind kind);
std::string to_string(Symmetry sym);
PotentialKind potential_kind_from_string(const std::string& name);
Symmetry symmetry_from_string(const std::string& name);

/// Value, E-gradient and E-Hessian of a potential in coordinates.
struct PotentialJet {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

/// Jet order: 0 = value, 1 = value + gradient, 2 = everything.
enum class JetOrder { value = 0, gradient = 1, hessian = 2 };

/// Externally supplied potential body (e.g. the kernel-reduced Q).
class CustomTerm {
 public:
  virtual ~CustomTerm() = default;
  virtual PotentialJet evaluate(const SpectralModel& model, const Vec& u, JetOrder order) const = 0;
  virtual std::string name() const = 0;
};

/// Small perturbation K(u) = strength * g(u) * chi(|u|^2) with chi = 1 on the
/// ball of `radius` and 0 outside twice that radius.
///   linear:  g = <f, u>          (no symmetry)
///   even:    g = <f, u>^2        (Z2-even)
///   s1_even: g = sum_i f_i u_i^2 (f constant on each (Re, Im) pair, S^1-invariant)
struct GenericPerturbation {
  enum class Mode { linear, even, s1_even };
  Mode mode = Mode::linear;
  double strength = 0.0;
  Vec direction;
  double radius = 1.0;
};

/// K(u) = strength * Re(a_k) * exp(-(|a_k|^2 - rho2)^2 / (2 (width rho2)^2)),
/// a Gaussian bump in |a_k|^2 centred on the circle's shell.
struct SymmetryBreak {
  double strength = 0.0;
  int re_slot = 0;
  int im_slot = 1;
  double rho2 = 1.0;
  double width = 0.15;
};

using Perturbation = std::variant<GenericPerturbation, SymmetryBreak>;

/// Immutable starshaped potential F. Copies share state.
class Potential {
 public:
  static Potential sphere(Symmetry sym = Symmetry::none);
  static Potential ellipsoid(std::vector<double> weights, Symmetry sym = Symmetry::none);
  /// F(u) = (int h |u|^{p+1} - 1) / (p + 1); h given by cosine coefficients;
  /// grid_points = 0 picks 4 * max frequency + 4.
  static Potential p_power(double p, std::vector<double> h_cos = {1.0}, int grid_points = 0,
                           Symmetry sym = Symmetry::none);
  /// F(u) = sum_m c_m |u|^{2m}.
  static Potential radial_polynomial(std::vector<double> coeffs, Symmetry sym = Symmetry::none);
  /// (1 - s) a + s b.
  static Potential linear_blend(const Potential& a, const Potential& b, double s);
  /// eta(|u|^2) inner + (1 - eta(|u|^2)) outer, eta = 1 below q0 and 0 above 4 q0.
  static Potential cutoff_blend(const Potential& inner, const Potential& outer, double q0);
  static Potential custom(std::shared_ptr<const CustomTerm> term, Symmetry sym = Symmetry::none);

  PotentialKind kind() const;
  Symmetry symmetry() const;
  const std::vector<Perturbation>& perturbations() const;

  const std::vector<double>& weights() const;
  double exponent() const;
  const std::vector<double>& h_cos() const;
  int grid_points() const;
  const std::vector<double>& coefficients() const;
  const std::vector<Potential>& children() const;
  double blend_parameter() const;
  const std::shared_ptr<const CustomTerm>& custom_term() const;

  Potential with_perturbation(Perturbation p, Symmetry sym) const;
  Potential with_symmetry(Symmetry sym) const;

  PotentialJet jet(const SpectralModel& model, const Vec& u, JetOrder order = JetOrder::hessian) const;
  double value(const SpectralModel& model, const Vec& u) const;

 private:
  struct Impl;
  explicit Potential(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Free-function form of Potential::jet.
PotentialJet potential_jet(const Potential& pot, const SpectralModel& model, const Vec& u);

/// Quadrature realization of the model's eigenfunctions.
struct FieldSampler {
  Vec weights;                                ///< quadrature weights (sum = measure = 1)
  std::vector<Mat> channels;                  ///< node x slot samples per real channel
  std::vector<std::vector<int>> components;   ///< channels grouped into moduli |w|
  std::vector<double> nodes_x;
  std::vector<double> nodes_t;
};

/// Samples eigenfunctions (or the kernel block when `kernel` is set).
FieldSampler sample_modes(const SpectralModel& model, int grid_points, bool kernel = false);
int default_grid_points(const SpectralModel& model);

/// Quintic smoothstep on [0, 1] with its first two derivatives.
struct Smooth {
  double v, d1, d2;
};
Smooth smoothstep(double x);

struct StarshapeReport {
  double min_radial_derivative = 0.0;
  int samples = 0;
  bool bounded = false;
  double max_radius = 0.0;
  double min_radius = 0.0;
  bool passed = false;
};

/// Root r > 0 of F(r d) = 0 along the unit direction d.
double radial_root(const Potential& pot, const SpectralModel& model, const Vec& direction, double r_max = 50.0);

StarshapeReport check_starshape(const Potential& pot, const SpectralModel& model, int n_samples,
                                std::uint64_t seed, double r_max = 50.0);

/// Generic small perturbation respecting the potential's declared symmetry.
Potential perturb_generic(const Potential& pot, const SpectralModel& model, double strength,
                          std::uint64_t direction_seed);

struct CriticalRecord;
Potential break_symmetry(const Potential& pot, const SpectralModel& model, const CriticalRecord& circle,
                         double strength);

/// Largest |F1 - F2| over a sampled ball.
double sampled_sup_difference(const Potential& f1, const Potential& f2, const SpectralModel& model,
                              double radius, int samples, std::uint64_t seed);

}  // namespace rfh

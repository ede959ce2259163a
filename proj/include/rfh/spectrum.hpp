#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ModelKind { abstract, dirac_toy, elliptic_system, beam, wave };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Spatial domain on which the eigenfunctions of a model are realized when a
/// potential needs quadrature.
enum class Domain { none, circle, interval, torus };

/// How one eigendirection looks as a function. Only the fields relevant to the
/// model's domain are used.
///   circle:   real  -> sqrt(2) cos(freq x) (parity 0) or sqrt(2) sin(freq x) (parity 1)
///             complex -> exp(i freq x), freq signed
///   interval: sin(freq pi x) placed in the (u, v) components with sign `component_sign`
///   torus:    product of cos/sin in x (freq) and t (freq_t), parity bits select sin
struct ModeShape {
  double freq = 0.0;
  double freq_t = 0.0;
  int parity = 0;
  int component_sign = 0;
};

/// Truncated eigen-description of the operator L in an E-orthonormal eigenbasis.
///
/// Coordinates are ordered by label (ascending). With `complex_structure` every
/// label owns two consecutive real slots (Re, Im), rotated together by the S^1
/// action.
struct SpectralModel {
  ModelKind kind = ModelKind::abstract;
  std::vector<int> labels;
  std::vector<double> eigenvalues;
  bool complex_structure = false;
  std::vector<int> truncation;
  int kernel_dim = 0;

  Domain domain = Domain::none;
  std::vector<ModeShape> shapes;
  std::vector<ModeShape> kernel_shapes;

  int slots_per_label() const { return complex_structure ? 2 : 1; }
  int real_dim() const { return static_cast<int>(labels.size()) * slots_per_label(); }
  /// Real dimension of H^- in the truncation.
  int negative_dim() const;
  int label_of_slot(int slot) const { return labels[slot / slots_per_label()]; }
  double eigenvalue_of_slot(int slot) const { return eigenvalues[slot / slots_per_label()]; }
  /// Index into `labels` of the given label, or -1.
  int label_index(int label) const;
  /// |lambda_i| for every real slot.
  Vec metric_weights() const;
  /// lambda_i for every real slot.
  Vec slot_eigenvalues() const;
  /// Largest spatial frequency among retained modes (kernel included).
  double max_frequency() const;
};

/// z = (u, lambda) in truncated coordinates.
struct StatePoint {
  Vec coeffs;
  double multiplier = 0.0;

  /// Packed [coeffs; multiplier].
  Vec packed() const;
  static StatePoint unpack(const Vec& z);
};

struct ModelParams {
  ModelKind kind = ModelKind::abstract;
  std::vector<int> truncation;
  bool complex_structure = false;
  /// Optional explicit eigenvalues for the abstract kind (labels assigned by sign).
  std::optional<std::vector<double>> eigenvalues;
};

/// Builds a truncated model.
///   abstract:        truncation {N}; eigenvalue of label i is i (or the explicit list)
///   dirac_toy:       truncation {N}; eigenvalues +-(n - 1/2), n = 1..N
///   elliptic_system: truncation {K}; eigenvalues +-(k pi)^2, k = 1..K
///   beam:            truncation {J, K}; eigenvalues +-sqrt(j^2 + (k pi)^4), j = 0..J, k = 1..K
///   wave:            truncation {J}; eigenvalues j^2 - k^2, 0 <= j, k <= J; j == k goes to the kernel
SpectralModel build_model(const ModelParams& params);
SpectralModel build_model(ModelKind kind, std::vector<int> truncation, bool complex_structure);

/// H x R inner product: sum |lambda_i| a_i b_i + lambda_1 lambda_2.
double h_inner(const SpectralModel& model, const StatePoint& z1, const StatePoint& z2);
double e_norm2(const Vec& coeffs);
double h_norm2(const SpectralModel& model, const Vec& coeffs);

/// (u+, u-) with multipliers zeroed.
std::pair<StatePoint, StatePoint> split_pm(const SpectralModel& model, const StatePoint& z);

/// Simultaneous rotation of every (Re, Im) pair by theta. Identity for real models.
Vec rotate_phase(const SpectralModel& model, const Vec& coeffs, double theta);
/// Infinitesimal generator of rotate_phase applied to coeffs.
Vec phase_generator(const SpectralModel& model, const Vec& coeffs);

void check_conforms(const SpectralModel& model, const StatePoint& z);

}  // namespace rfh

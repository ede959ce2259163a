#include "rfh/spectrum.hpp"

#include "rfh/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rfh {

namespace {

struct Entry {
  double value;
  ModeShape shape;
};

void require_cutoffs(const std::vector<int>& truncation, std::size_t count, const char* kind) {
  if (truncation.size() != count) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(kind) + " model expects " + std::to_string(count) + " truncation cutoff(s)");
  }
  for (int c : truncation) {
    if (c < 1) throw Error(ErrorCode::InvalidArgument, "truncation cutoffs must be >= 1");
  }
}

// Assigns labels: positive values get 1, 2, ... by ascending value, negative
// values get -1, -2, ... by ascending magnitude. Ties keep insertion order.
void assign_labels(SpectralModel& model, std::vector<Entry> entries) {
  std::vector<Entry> pos;
  std::vector<Entry> neg;
  for (auto& e : entries) {
    if (e.value == 0.0) throw Error(ErrorCode::ZeroEigenvalue, "operator L must be invertible");
    (e.value > 0 ? pos : neg).push_back(e);
  }
  auto by_magnitude = [](const Entry& a, const Entry& b) { return std::abs(a.value) < std::abs(b.value); };
  std::stable_sort(pos.begin(), pos.end(), by_magnitude);
  std::stable_sort(neg.begin(), neg.end(), by_magnitude);

  model.labels.clear();
  model.eigenvalues.clear();
  model.shapes.clear();
  for (int i = static_cast<int>(neg.size()) - 1; i >= 0; --i) {
    model.labels.push_back(-(i + 1));
    model.eigenvalues.push_back(neg[i].value);
    model.shapes.push_back(neg[i].shape);
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    model.labels.push_back(static_cast<int>(i) + 1);
    model.eigenvalues.push_back(pos[i].value);
    model.shapes.push_back(pos[i].shape);
  }
}

ModeShape circle_shape(double freq, bool negative, bool complex_structure) {
  ModeShape s;
  if (complex_structure) {
    s.freq = negative ? -freq : freq;
  } else {
    s.freq = freq;
    s.parity = negative ? 1 : 0;
  }
  return s;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::abstract: return "abstract";
    case ModelKind::dirac_toy: return "dirac_toy";
    case ModelKind::elliptic_system: return "elliptic_system";
    case ModelKind::beam: return "beam";
    case ModelKind::wave: return "wave";
  }
  return "abstract";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "abstract") return ModelKind::abstract;
  if (name == "dirac_toy") return ModelKind::dirac_toy;
  if (name == "elliptic_system") return ModelKind::elliptic_system;
  if (name == "beam") return ModelKind::beam;
  if (name == "wave") return ModelKind::wave;
  throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + name + "'");
}

int SpectralModel::negative_dim() const {
  int count = 0;
  for (int l : labels) count += l < 0 ? 1 : 0;
  return count * slots_per_label();
}

int SpectralModel::label_index(int label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

Vec SpectralModel::metric_weights() const {
  Vec w(real_dim());
  for (int s = 0; s < real_dim(); ++s) w[s] = std::abs(eigenvalue_of_slot(s));
  return w;
}

Vec SpectralModel::slot_eigenvalues() const {
  Vec w(real_dim());
  for (int s = 0; s < real_dim(); ++s) w[s] = eigenvalue_of_slot(s);
  return w;
}

double SpectralModel::max_frequency() const {
  double f = 0.0;
  for (const auto& s : shapes) f = std::max({f, std::abs(s.freq), std::abs(s.freq_t)});
  for (const auto& s : kernel_shapes) f = std::max({f, std::abs(s.freq), std::abs(s.freq_t)});
  return f;
}

Vec StatePoint::packed() const {
  Vec z(coeffs.size() + 1);
  z.head(coeffs.size()) = coeffs;
  z[coeffs.size()] = multiplier;
  return z;
}

StatePoint StatePoint::unpack(const Vec& z) {
  StatePoint p;
  p.coeffs = z.head(z.size() - 1);
  p.multiplier = z[z.size() - 1];
  return p;
}

SpectralModel build_model(ModelKind kind, std::vector<int> truncation, bool complex_structure) {
  ModelParams params;
  params.kind = kind;
  params.truncation = std::move(truncation);
  params.complex_structure = complex_structure;
  return build_model(params);
}

SpectralModel build_model(const ModelParams& params) {
  using std::numbers::pi;
  SpectralModel model;
  model.kind = params.kind;
  model.truncation = params.truncation;
  model.complex_structure = params.complex_structure;

  std::vector<Entry> entries;
  switch (params.kind) {
    case ModelKind::abstract: {
      model.domain = Domain::circle;
      if (params.eigenvalues) {
        // Frequencies follow the label magnitude once labels are assigned.
        for (double v : *params.eigenvalues) entries.push_back({v, {}});
        assign_labels(model, entries);
        for (std::size_t i = 0; i < model.labels.size(); ++i) {
          model.shapes[i] = circle_shape(std::abs(model.labels[i]), model.labels[i] < 0, model.complex_structure);
        }
        return model;
      }
      require_cutoffs(params.truncation, 1, "abstract");
      const int n = params.truncation[0];
      for (int k = 1; k <= n; ++k) {
        entries.push_back({static_cast<double>(k), circle_shape(k, false, params.complex_structure)});
        entries.push_back({-static_cast<double>(k), circle_shape(k, true, params.complex_structure)});
      }
      break;
    }
    case ModelKind::dirac_toy: {
      model.domain = Domain::circle;
      require_cutoffs(params.truncation, 1, "dirac_toy");
      for (int k = 1; k <= params.truncation[0]; ++k) {
        const double v = k - 0.5;
        entries.push_back({v, circle_shape(v, false, params.complex_structure)});
        entries.push_back({-v, circle_shape(v, true, params.complex_structure)});
      }
      break;
    }
    case ModelKind::elliptic_system: {
      model.domain = Domain::interval;
      require_cutoffs(params.truncation, 1, "elliptic_system");
      for (int k = 1; k <= params.truncation[0]; ++k) {
        const double mu = (k * pi) * (k * pi);
        entries.push_back({mu, ModeShape{static_cast<double>(k), 0.0, 0, +1}});
        entries.push_back({-mu, ModeShape{static_cast<double>(k), 0.0, 0, -1}});
      }
      break;
    }
    case ModelKind::beam: {
      model.domain = Domain::none;
      require_cutoffs(params.truncation, 2, "beam");
      for (int j = 0; j <= params.truncation[0]; ++j) {
        for (int k = 1; k <= params.truncation[1]; ++k) {
          const double mu = (k * pi) * (k * pi);
          const double v = std::sqrt(static_cast<double>(j * j) + mu * mu);
          entries.push_back({v, ModeShape{static_cast<double>(j), static_cast<double>(k), 0, 0}});
          entries.push_back({-v, ModeShape{static_cast<double>(j), static_cast<double>(k), 1, 0}});
        }
      }
      break;
    }
    case ModelKind::wave: {
      if (params.complex_structure) {
        throw Error(ErrorCode::InvalidArgument, "wave model is realized with a real basis only");
      }
      model.domain = Domain::torus;
      require_cutoffs(params.truncation, 1, "wave");
      const int cut = params.truncation[0];
      for (int j = 0; j <= cut; ++j) {
        for (int k = 0; k <= cut; ++k) {
          // parity bit 0: sin in x, bit 1: sin in t; zero frequencies admit cos only.
          for (int parity = 0; parity < 4; ++parity) {
            if (j == 0 && (parity & 1)) continue;
            if (k == 0 && (parity & 2)) continue;
            ModeShape s{static_cast<double>(j), static_cast<double>(k), parity, 0};
            if (j == k) {
              model.kernel_shapes.push_back(s);
            } else {
              entries.push_back({static_cast<double>(j * j - k * k), s});
            }
          }
        }
      }
      model.kernel_dim = static_cast<int>(model.kernel_shapes.size());
      break;
    }
  }
  assign_labels(model, std::move(entries));
  return model;
}

void check_conforms(const SpectralModel& model, const StatePoint& z) {
  if (z.coeffs.size() != model.real_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "point has " + std::to_string(z.coeffs.size()) +
                                                  " coefficients, model expects " +
                                                  std::to_string(model.real_dim()));
  }
}

double e_norm2(const Vec& coeffs) { return coeffs.squaredNorm(); }

double h_norm2(const SpectralModel& model, const Vec& coeffs) {
  return (model.metric_weights().array() * coeffs.array().square()).sum();
}

double h_inner(const SpectralModel& model, const StatePoint& z1, const StatePoint& z2) {
  check_conforms(model, z1);
  check_conforms(model, z2);
  const Vec w = model.metric_weights();
  return (w.array() * z1.coeffs.array() * z2.coeffs.array()).sum() + z1.multiplier * z2.multiplier;
}

std::pair<StatePoint, StatePoint> split_pm(const SpectralModel& model, const StatePoint& z) {
  check_conforms(model, z);
  StatePoint plus{Vec::Zero(z.coeffs.size()), 0.0};
  StatePoint minus{Vec::Zero(z.coeffs.size()), 0.0};
  for (int s = 0; s < model.real_dim(); ++s) {
    (model.label_of_slot(s) > 0 ? plus : minus).coeffs[s] = z.coeffs[s];
  }
  return {plus, minus};
}

Vec rotate_phase(const SpectralModel& model, const Vec& coeffs, double theta) {
  if (!model.complex_structure) return coeffs;
  Vec out(coeffs.size());
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (int i = 0; i + 1 < coeffs.size(); i += 2) {
    out[i] = c * coeffs[i] - s * coeffs[i + 1];
    out[i + 1] = s * coeffs[i] + c * coeffs[i + 1];
  }
  return out;
}

Vec phase_generator(const SpectralModel& model, const Vec& coeffs) {
  Vec out = Vec::Zero(coeffs.size());
  if (!model.complex_structure) return out;
  for (int i = 0; i + 1 < coeffs.size(); i += 2) {
    out[i] = -coeffs[i + 1];
    out[i + 1] = coeffs[i];
  }
  return out;
}

}  // namespace rfh

#include "rfh/potentials.hpp"

#include "rfh/critical.hpp"
#include "rfh/error.hpp"
#include "rfh/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace rfh {

struct Potential::Impl {
  PotentialKind kind = PotentialKind::sphere;
  Symmetry symmetry = Symmetry::none;
  std::vector<double> weights;
  double p = 3.0;
  std::vector<double> h_cos{1.0};
  int grid_points = 0;
  std::vector<double> coeffs;
  std::vector<Potential> children;
  double blend = 0.0;
  std::shared_ptr<const CustomTerm> custom;
  std::vector<Perturbation> perturbations;
};

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::sphere: return "sphere";
    case PotentialKind::ellipsoid: return "ellipsoid";
    case PotentialKind::p_power: return "p_power";
    case PotentialKind::custom_quadratic_plus: return "custom_quadratic_plus";
    case PotentialKind::linear_blend: return "linear_blend";
    case PotentialKind::cutoff_blend: return "cutoff_blend";
    case PotentialKind::custom: return "custom";
  }
  return "sphere";
}

std::string to_string(Symmetry sym) {
  switch (sym) {
    case Symmetry::none: return "none";
    case Symmetry::s1: return "s1";
    case Symmetry::z2: return "z2";
  }
  return "none";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  for (auto k : {PotentialKind::sphere, PotentialKind::ellipsoid, PotentialKind::p_power,
                 PotentialKind::custom_quadratic_plus, PotentialKind::linear_blend, PotentialKind::cutoff_blend,
                 PotentialKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown potential kind '" + name + "'");
}

Symmetry symmetry_from_string(const std::string& name) {
  if (name == "none") return Symmetry::none;
  if (name == "s1") return Symmetry::s1;
  if (name == "z2") return Symmetry::z2;
  throw Error(ErrorCode::InvalidArgument, "unknown symmetry '" + name + "'");
}

Smooth smoothstep(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double x2 = x * x;
  return {x2 * x * (10.0 - 15.0 * x + 6.0 * x2), 30.0 * x2 * (1.0 - x) * (1.0 - x),
          60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)};
}

namespace {

// eta(q) = 1 - S((q - q0) / (q1 - q0)), returned with derivatives in q.
Smooth falling_cutoff(double q, double q0, double q1) {
  const double span = q1 - q0;
  const Smooth s = smoothstep((q - q0) / span);
  return {1.0 - s.v, -s.d1 / span, -s.d2 / (span * span)};
}

// Adds a radial factor: T = g(u) * c(|u|^2).
void apply_radial_factor(PotentialJet& g, const Smooth& c, const Vec& u, JetOrder order) {
  const double gv = g.value;
  if (order == JetOrder::hessian) {
    const Vec dq = 2.0 * u;
    Mat h = c.v * g.hess;
    h.noalias() += c.d1 * (g.grad * dq.transpose() + dq * g.grad.transpose());
    h.noalias() += gv * c.d2 * (dq * dq.transpose());
    h.diagonal().array() += gv * c.d1 * 2.0;
    g.hess = std::move(h);
  }
  if (order != JetOrder::value) g.grad = c.v * g.grad + gv * c.d1 * 2.0 * u;
  g.value = gv * c.v;
}

PotentialJet zero_jet(int dim, JetOrder order) {
  PotentialJet j;
  if (order != JetOrder::value) j.grad = Vec::Zero(dim);
  if (order == JetOrder::hessian) j.hess = Mat::Zero(dim, dim);
  return j;
}

void accumulate(PotentialJet& acc, const PotentialJet& term, double scale, JetOrder order) {
  acc.value += scale * term.value;
  if (order != JetOrder::value) acc.grad += scale * term.grad;
  if (order == JetOrder::hessian) acc.hess += scale * term.hess;
}

PotentialJet generic_term(const GenericPerturbation& k, const Vec& u, JetOrder order) {
  const int n = static_cast<int>(u.size());
  if (k.direction.size() != n) throw Error(ErrorCode::DimensionMismatch, "perturbation direction size");
  PotentialJet g = zero_jet(n, order);
  switch (k.mode) {
    case GenericPerturbation::Mode::linear: {
      g.value = k.strength * k.direction.dot(u);
      if (order != JetOrder::value) g.grad = k.strength * k.direction;
      break;
    }
    case GenericPerturbation::Mode::even: {
      const double d = k.direction.dot(u);
      g.value = k.strength * d * d;
      if (order != JetOrder::value) g.grad = 2.0 * k.strength * d * k.direction;
      if (order == JetOrder::hessian) g.hess = 2.0 * k.strength * k.direction * k.direction.transpose();
      break;
    }
    case GenericPerturbation::Mode::s1_even: {
      g.value = k.strength * (k.direction.array() * u.array().square()).sum();
      if (order != JetOrder::value) g.grad = 2.0 * k.strength * (k.direction.array() * u.array()).matrix();
      if (order == JetOrder::hessian) g.hess = (2.0 * k.strength * k.direction).asDiagonal();
      break;
    }
  }
  const double r2 = k.radius * k.radius;
  apply_radial_factor(g, falling_cutoff(u.squaredNorm(), r2, 4.0 * r2), u, order);
  return g;
}

PotentialJet symmetry_break_term(const SymmetryBreak& k, const Vec& u, JetOrder order) {
  const int n = static_cast<int>(u.size());
  PotentialJet out = zero_jet(n, order);
  const double x = u[k.re_slot];
  const double y = u[k.im_slot];
  const double q = x * x + y * y;
  const double w2 = (k.width * k.rho2) * (k.width * k.rho2);
  const double dq = q - k.rho2;
  const double b = std::exp(-0.5 * dq * dq / w2);
  const double b1 = -dq / w2 * b;
  const double b2 = (dq * dq / (w2 * w2) - 1.0 / w2) * b;
  const double s = k.strength;

  out.value = s * x * b;
  if (order == JetOrder::value) return out;
  // d/dx (x b) = b + x b1 2x ; d/dy = x b1 2y
  out.grad[k.re_slot] = s * (b + 2.0 * x * x * b1);
  out.grad[k.im_slot] = s * (2.0 * x * y * b1);
  if (order == JetOrder::hessian) {
    // T = x b(q): grad g = e_x, grad q = 2(x, y)
    const double hxx = 2.0 * b1 * 2.0 * x + x * (b2 * 4.0 * x * x + b1 * 2.0);
    const double hxy = b1 * 2.0 * y + x * b2 * 4.0 * x * y;
    const double hyy = x * (b2 * 4.0 * y * y + b1 * 2.0);
    out.hess(k.re_slot, k.re_slot) = s * hxx;
    out.hess(k.re_slot, k.im_slot) = s * hxy;
    out.hess(k.im_slot, k.re_slot) = s * hxy;
    out.hess(k.im_slot, k.im_slot) = s * hyy;
  }
  return out;
}

// ---- quadrature -----------------------------------------------------------

std::string sampler_key(const SpectralModel& model, int grid, bool kernel) {
  std::string key = to_string(model.kind) + (model.complex_structure ? "c" : "r") + std::to_string(grid) +
                    (kernel ? "k" : "e") + std::to_string(model.labels.size()) + ":";
  for (int t : model.truncation) key += std::to_string(t) + ",";
  for (const auto& s : model.shapes) key += std::to_string(s.freq) + "/" + std::to_string(s.parity) + ";";
  return key;
}

std::shared_ptr<const FieldSampler> cached_sampler(const SpectralModel& model, int grid, bool kernel) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const FieldSampler>> cache;
  const std::string key = sampler_key(model, grid, kernel);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto sampler = std::make_shared<const FieldSampler>(sample_modes(model, grid, kernel));
  std::lock_guard lock(mutex);
  cache.emplace(key, sampler);
  return sampler;
}

double h_at(const std::vector<double>& h_cos, double x, Domain domain) {
  double h = 0.0;
  const double scale = domain == Domain::interval ? std::numbers::pi : 1.0;
  for (std::size_t m = 0; m < h_cos.size(); ++m) h += h_cos[m] * std::cos(static_cast<double>(m) * scale * x);
  return h;
}

}  // namespace

int default_grid_points(const SpectralModel& model) {
  return static_cast<int>(std::ceil(4.0 * model.max_frequency())) + 4;
}

FieldSampler sample_modes(const SpectralModel& model, int grid, bool kernel) {
  using std::numbers::pi;
  const auto& shapes = kernel ? model.kernel_shapes : model.shapes;
  const int dim = kernel ? static_cast<int>(shapes.size()) : model.real_dim();
  const bool cplx = model.complex_structure && !kernel;
  FieldSampler fs;
  switch (model.domain) {
    case Domain::none:
      throw Error(ErrorCode::InvalidArgument, to_string(model.kind) + " model has no spatial realization");
    case Domain::circle: {
      const int n = grid;
      fs.weights = Vec::Constant(n, 1.0 / n);
      for (int i = 0; i < n; ++i) fs.nodes_x.push_back(2.0 * pi * i / n);
      if (cplx) {
        Mat re = Mat::Zero(n, dim);
        Mat im = Mat::Zero(n, dim);
        for (std::size_t l = 0; l < shapes.size(); ++l) {
          for (int i = 0; i < n; ++i) {
            const double th = shapes[l].freq * fs.nodes_x[i];
            re(i, 2 * l) = std::cos(th);
            re(i, 2 * l + 1) = -std::sin(th);
            im(i, 2 * l) = std::sin(th);
            im(i, 2 * l + 1) = std::cos(th);
          }
        }
        fs.channels = {re, im};
        fs.components = {{0, 1}};
      } else {
        Mat b = Mat::Zero(n, dim);
        for (std::size_t l = 0; l < shapes.size(); ++l) {
          for (int i = 0; i < n; ++i) {
            const double th = shapes[l].freq * fs.nodes_x[i];
            b(i, l) = std::sqrt(2.0) * (shapes[l].parity ? std::sin(th) : std::cos(th));
          }
        }
        fs.channels = {b};
        fs.components = {{0}};
      }
      break;
    }
    case Domain::interval: {
      const int n = grid + 1;
      fs.weights = Vec::Constant(n, 1.0 / grid);
      fs.weights[0] *= 0.5;
      fs.weights[n - 1] *= 0.5;
      for (int i = 0; i < n; ++i) fs.nodes_x.push_back(static_cast<double>(i) / grid);
      const int per = cplx ? 2 : 1;
      std::vector<Mat> ch(2 * per, Mat::Zero(n, dim));
      for (std::size_t l = 0; l < shapes.size(); ++l) {
        for (int i = 0; i < n; ++i) {
          const double phi = std::sin(shapes[l].freq * pi * fs.nodes_x[i]);
          const double sgn = shapes[l].component_sign;
          if (cplx) {
            ch[0](i, 2 * l) = phi;
            ch[1](i, 2 * l + 1) = phi;
            ch[2](i, 2 * l) = sgn * phi;
            ch[3](i, 2 * l + 1) = sgn * phi;
          } else {
            ch[0](i, l) = phi;
            ch[1](i, l) = sgn * phi;
          }
        }
      }
      fs.channels = ch;
      fs.components = cplx ? std::vector<std::vector<int>>{{0, 1}, {2, 3}} : std::vector<std::vector<int>>{{0}, {1}};
      break;
    }
    case Domain::torus: {
      const int n = grid * grid;
      fs.weights = Vec::Constant(n, 1.0 / n);
      for (int a = 0; a < grid; ++a) {
        for (int b = 0; b < grid; ++b) {
          fs.nodes_x.push_back(2.0 * pi * a / grid);
          fs.nodes_t.push_back(2.0 * pi * b / grid);
        }
      }
      Mat m = Mat::Zero(n, dim);
      for (std::size_t l = 0; l < shapes.size(); ++l) {
        const auto& s = shapes[l];
        const double norm = (s.freq > 0 ? std::sqrt(2.0) : 1.0) * (s.freq_t > 0 ? std::sqrt(2.0) : 1.0);
        for (int i = 0; i < n; ++i) {
          const double ax = s.freq * fs.nodes_x[i];
          const double at = s.freq_t * fs.nodes_t[i];
          const double fx = (s.parity & 1) ? std::sin(ax) : std::cos(ax);
          const double ft = (s.parity & 2) ? std::sin(at) : std::cos(at);
          m(i, l) = norm * fx * ft;
        }
      }
      fs.channels = {m};
      fs.components = {{0}};
      break;
    }
  }
  return fs;
}

namespace {

struct PowerParams {
  double p;
  const std::vector<double>& h_cos;
  int grid_points;
};

PotentialJet p_power_jet(const PowerParams& impl, const SpectralModel& model, const Vec& u, JetOrder order) {
  const int grid = impl.grid_points > 0 ? impl.grid_points : default_grid_points(model);
  if (grid < 4.0 * model.max_frequency()) {
    throw Error(ErrorCode::QuadratureUnderresolved,
                "grid of " + std::to_string(grid) + " points below 4 x max frequency");
  }
  if (model.domain == Domain::torus && impl.h_cos.size() > 1) {
    throw Error(ErrorCode::InvalidArgument, "torus potentials support constant h only");
  }
  const auto fs = cached_sampler(model, grid, false);
  const int n = static_cast<int>(fs->weights.size());
  const int dim = static_cast<int>(u.size());
  const double p = impl.p;

  Vec wh(n);
  for (int i = 0; i < n; ++i) {
    const double h = h_at(impl.h_cos, fs->nodes_x[i], model.domain);
    if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "coefficient h must be positive on the grid");
    wh[i] = fs->weights[i] * h;
  }

  std::vector<Vec> field;
  field.reserve(fs->channels.size());
  for (const auto& ch : fs->channels) field.push_back(ch * u);

  PotentialJet out = zero_jet(dim, order);
  double integral = 0.0;
  for (const auto& comp : fs->components) {
    Vec mod2 = Vec::Zero(n);
    for (int c : comp) mod2 += field[c].array().square().matrix();
    const Vec mod = mod2.array().sqrt();
    const Vec pw = mod.array().pow(p + 1.0);
    integral += wh.dot(pw);
    if (order == JetOrder::value) continue;
    const Vec c1 = (wh.array() * mod.array().pow(p - 1.0)).matrix();
    for (int c : comp) out.grad.noalias() += fs->channels[c].transpose() * (c1.array() * field[c].array()).matrix();
    if (order != JetOrder::hessian) continue;
    for (int c : comp) out.hess.noalias() += fs->channels[c].transpose() * c1.asDiagonal() * fs->channels[c];
    if (comp.size() > 1) {
      // (p - 1) |w|^{p-3} (w . dw)(w . dw) on multi-channel moduli
      Vec c2(n);
      for (int i = 0; i < n; ++i) c2[i] = mod[i] > 0 ? wh[i] * (p - 1.0) * std::pow(mod[i], p - 3.0) : 0.0;
      Mat v = Mat::Zero(n, dim);
      for (int c : comp) v += field[c].asDiagonal() * fs->channels[c];
      out.hess.noalias() += v.transpose() * c2.asDiagonal() * v;
    } else {
      const int c = comp[0];
      const Vec c2 = (wh.array() * (p - 1.0) * mod.array().pow(p - 1.0)).matrix();
      out.hess.noalias() += fs->channels[c].transpose() * c2.asDiagonal() * fs->channels[c];
    }
  }
  out.value = (integral - 1.0) / (p + 1.0);
  return out;
}

}  // namespace

Potential Potential::sphere(Symmetry sym) {
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::sphere;
  impl->symmetry = sym;
  return Potential(impl);
}

Potential Potential::ellipsoid(std::vector<double> weights, Symmetry sym) {
  for (double c : weights) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid weights must be positive");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::ellipsoid;
  impl->symmetry = sym;
  impl->weights = std::move(weights);
  return Potential(impl);
}

Potential Potential::p_power(double p, std::vector<double> h_cos, int grid_points, Symmetry sym) {
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p_power exponent must exceed 1");
  if (h_cos.empty()) h_cos = {1.0};
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::p_power;
  impl->symmetry = sym;
  impl->p = p;
  impl->h_cos = std::move(h_cos);
  impl->grid_points = grid_points;
  return Potential(impl);
}

Potential Potential::radial_polynomial(std::vector<double> coeffs, Symmetry sym) {
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::custom_quadratic_plus;
  impl->symmetry = sym;
  impl->coeffs = std::move(coeffs);
  return Potential(impl);
}

Potential Potential::linear_blend(const Potential& a, const Potential& b, double s) {
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::linear_blend;
  impl->symmetry = a.symmetry() == b.symmetry() ? a.symmetry() : Symmetry::none;
  impl->children = {a, b};
  impl->blend = s;
  return Potential(impl);
}

Potential Potential::cutoff_blend(const Potential& inner, const Potential& outer, double q0) {
  if (!(q0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff radius must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::cutoff_blend;
  impl->symmetry = inner.symmetry() == outer.symmetry() ? inner.symmetry() : Symmetry::none;
  impl->children = {inner, outer};
  impl->blend = q0;
  return Potential(impl);
}

Potential Potential::custom(std::shared_ptr<const CustomTerm> term, Symmetry sym) {
  auto impl = std::make_shared<Impl>();
  impl->kind = PotentialKind::custom;
  impl->symmetry = sym;
  impl->custom = std::move(term);
  return Potential(impl);
}

PotentialKind Potential::kind() const { return impl_->kind; }
Symmetry Potential::symmetry() const { return impl_->symmetry; }
const std::vector<Perturbation>& Potential::perturbations() const { return impl_->perturbations; }
const std::vector<double>& Potential::weights() const { return impl_->weights; }
double Potential::exponent() const { return impl_->p; }
const std::vector<double>& Potential::h_cos() const { return impl_->h_cos; }
int Potential::grid_points() const { return impl_->grid_points; }
const std::vector<double>& Potential::coefficients() const { return impl_->coeffs; }
const std::vector<Potential>& Potential::children() const { return impl_->children; }
double Potential::blend_parameter() const { return impl_->blend; }
const std::shared_ptr<const CustomTerm>& Potential::custom_term() const { return impl_->custom; }

Potential Potential::with_perturbation(Perturbation p, Symmetry sym) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->perturbations.push_back(std::move(p));
  impl->symmetry = sym;
  return Potential(impl);
}

Potential Potential::with_symmetry(Symmetry sym) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->symmetry = sym;
  return Potential(impl);
}

PotentialJet Potential::jet(const SpectralModel& model, const Vec& u, JetOrder order) const {
  const int n = model.real_dim();
  if (u.size() != n) throw Error(ErrorCode::DimensionMismatch, "coefficient vector does not match model");
  const Impl& im = *impl_;
  PotentialJet out = zero_jet(n, order);
  switch (im.kind) {
    case PotentialKind::sphere: {
      out.value = 0.5 * (u.squaredNorm() - 1.0);
      if (order != JetOrder::value) out.grad = u;
      if (order == JetOrder::hessian) out.hess = Mat::Identity(n, n);
      break;
    }
    case PotentialKind::ellipsoid: {
      Vec c(n);
      if (im.weights.size() == 1) {
        c.setConstant(im.weights[0]);
      } else if (static_cast<int>(im.weights.size()) == n) {
        for (int i = 0; i < n; ++i) c[i] = im.weights[i];
      } else {
        throw Error(ErrorCode::DimensionMismatch, "ellipsoid weights do not match model dimension");
      }
      out.value = 0.5 * ((c.array() * u.array().square()).sum() - 1.0);
      if (order != JetOrder::value) out.grad = (c.array() * u.array()).matrix();
      if (order == JetOrder::hessian) out.hess = c.asDiagonal();
      break;
    }
    case PotentialKind::p_power:
      out = p_power_jet({im.p, im.h_cos, im.grid_points}, model, u, order);
      break;
    case PotentialKind::custom_quadratic_plus: {
      const double q = u.squaredNorm();
      double v = 0.0, d1 = 0.0, d2 = 0.0;
      for (std::size_t m = 0; m < im.coeffs.size(); ++m) {
        const double c = im.coeffs[m];
        v += c * std::pow(q, static_cast<double>(m));
        if (m >= 1) d1 += c * m * std::pow(q, static_cast<double>(m) - 1.0);
        if (m >= 2) d2 += c * m * (m - 1.0) * std::pow(q, static_cast<double>(m) - 2.0);
      }
      out.value = v;
      if (order != JetOrder::value) out.grad = 2.0 * d1 * u;
      if (order == JetOrder::hessian) {
        out.hess = 4.0 * d2 * u * u.transpose();
        out.hess.diagonal().array() += 2.0 * d1;
      }
      break;
    }
    case PotentialKind::linear_blend: {
      const double s = im.blend;
      accumulate(out, im.children[0].jet(model, u, order), 1.0 - s, order);
      accumulate(out, im.children[1].jet(model, u, order), s, order);
      break;
    }
    case PotentialKind::cutoff_blend: {
      const PotentialJet a = im.children[0].jet(model, u, order);
      const PotentialJet b = im.children[1].jet(model, u, order);
      const Smooth eta = falling_cutoff(u.squaredNorm(), im.blend, 4.0 * im.blend);
      const double diff = a.value - b.value;
      out.value = eta.v * a.value + (1.0 - eta.v) * b.value;
      if (order != JetOrder::value) {
        out.grad = eta.v * a.grad + (1.0 - eta.v) * b.grad + eta.d1 * diff * 2.0 * u;
      }
      if (order == JetOrder::hessian) {
        const Vec dq = 2.0 * u;
        const Vec dg = a.grad - b.grad;
        out.hess = eta.v * a.hess + (1.0 - eta.v) * b.hess;
        out.hess.noalias() += eta.d1 * (dq * dg.transpose() + dg * dq.transpose());
        out.hess.noalias() += diff * eta.d2 * (dq * dq.transpose());
        out.hess.diagonal().array() += diff * eta.d1 * 2.0;
      }
      break;
    }
    case PotentialKind::custom:
      out = im.custom->evaluate(model, u, order);
      break;
  }
  for (const auto& pert : im.perturbations) {
    if (const auto* g = std::get_if<GenericPerturbation>(&pert)) {
      accumulate(out, generic_term(*g, u, order), 1.0, order);
    } else {
      accumulate(out, symmetry_break_term(std::get<SymmetryBreak>(pert), u, order), 1.0, order);
    }
  }
  return out;
}

double Potential::value(const SpectralModel& model, const Vec& u) const {
  return jet(model, u, JetOrder::value).value;
}

PotentialJet potential_jet(const Potential& pot, const SpectralModel& model, const Vec& u) {
  return pot.jet(model, u, JetOrder::hessian);
}

// ---- starshape ------------------------------------------------------------

namespace {

struct RadialScan {
  int crossings = 0;
  double lo = 0.0;
  double hi = 0.0;
};

RadialScan scan_radial(const Potential& pot, const SpectralModel& model, const Vec& d, double r_max) {
  constexpr int kSamples = 400;
  const double r_min = 1e-3 * r_max;
  RadialScan scan;
  double prev_r = 0.0;
  double prev_v = pot.value(model, Vec::Zero(d.size()));
  for (int i = 0; i < kSamples; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (kSamples - 1));
    const double v = pot.value(model, r * d);
    if ((prev_v < 0.0) != (v < 0.0)) {
      if (scan.crossings == 0) {
        scan.lo = prev_r;
        scan.hi = r;
      }
      ++scan.crossings;
    }
    prev_r = r;
    prev_v = v;
  }
  return scan;
}

}  // namespace

double radial_root(const Potential& pot, const SpectralModel& model, const Vec& direction, double r_max) {
  const Vec d = direction / direction.norm();
  const RadialScan scan = scan_radial(pot, model, d, r_max);
  if (scan.crossings == 0) throw Error(ErrorCode::NoZeroCrossing, "no root of F along ray");
  if (scan.crossings > 1) throw Error(ErrorCode::MultipleCrossings, "ray meets the zero set more than once");
  double lo = scan.lo;
  double hi = scan.hi;
  const bool lo_negative = pot.value(model, lo * d) < 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((pot.value(model, mid * d) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

StarshapeReport check_starshape(const Potential& pot, const SpectralModel& model, int n_samples, std::uint64_t seed,
                                double r_max) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  Rng rng = make_rng(seed, 0x57a5);
  StarshapeReport rep;
  rep.min_radial_derivative = std::numeric_limits<double>::infinity();
  rep.min_radius = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const Vec d = random_unit(rng, model.real_dim());
    const double r = radial_root(pot, model, d, r_max);
    const Vec u = r * d;
    const double radial = pot.jet(model, u, JetOrder::gradient).grad.dot(u);
    rep.min_radial_derivative = std::min(rep.min_radial_derivative, radial);
    rep.max_radius = std::max(rep.max_radius, r);
    rep.min_radius = std::min(rep.min_radius, r);
  }
  rep.samples = n_samples;
  rep.bounded = std::isfinite(rep.max_radius) && rep.max_radius < r_max;
  rep.passed = rep.min_radial_derivative > 0.0 && rep.bounded;
  return rep;
}

Potential perturb_generic(const Potential& pot, const SpectralModel& model, double strength,
                          std::uint64_t direction_seed) {
  if (strength < 0.0) throw Error(ErrorCode::InvalidArgument, "perturbation strength must be nonnegative");
  Rng rng = make_rng(direction_seed, 0x9e7);
  GenericPerturbation k;
  k.strength = strength;
  switch (pot.symmetry()) {
    case Symmetry::none:
      k.mode = GenericPerturbation::Mode::linear;
      k.direction = random_unit(rng, model.real_dim());
      break;
    case Symmetry::z2:
      k.mode = GenericPerturbation::Mode::even;
      k.direction = random_unit(rng, model.real_dim());
      break;
    case Symmetry::s1: {
      k.mode = GenericPerturbation::Mode::s1_even;
      const Vec w = random_unit(rng, static_cast<int>(model.labels.size()));
      k.direction.resize(model.real_dim());
      for (int s = 0; s < model.real_dim(); ++s) k.direction[s] = w[s / model.slots_per_label()];
      break;
    }
  }
  const StarshapeReport rep = check_starshape(pot, model, 256, direction_seed);
  k.radius = 1.5 * rep.max_radius;
  return pot.with_perturbation(k, pot.symmetry());
}

Potential break_symmetry(const Potential& pot, const SpectralModel& model, const CriticalRecord& circle,
                         double strength) {
  if (circle.orbit_type != OrbitType::circle || !model.complex_structure) {
    throw Error(ErrorCode::NotACircle, "record " + circle.id + " is not a critical circle");
  }
  if (pot.symmetry() != Symmetry::s1) {
    throw Error(ErrorCode::InvalidArgument, "symmetry breaking requires an S^1-invariant potential");
  }
  const int label_idx = dominant_label_index(model, circle.point.coeffs);
  SymmetryBreak k;
  k.strength = strength;
  k.re_slot = 2 * label_idx;
  k.im_slot = 2 * label_idx + 1;
  k.rho2 = circle.point.coeffs.segment(2 * label_idx, 2).squaredNorm();
  return pot.with_perturbation(k, Symmetry::none);
}

double sampled_sup_difference(const Potential& f1, const Potential& f2, const SpectralModel& model, double radius,
                              int samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0xd1ff);
  const int n = model.real_dim();
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    // uniform in the ball
    const Vec d = random_unit(rng, n);
    const double r = radius * std::pow(random_uniform(rng, 0.0, 1.0), 1.0 / n);
    const Vec u = r * d;
    sup = std::max(sup, std::abs(f1.value(model, u) - f2.value(model, u)));
  }
  return sup;
}

}  // namespace rfh

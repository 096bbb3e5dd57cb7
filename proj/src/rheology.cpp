#include "nnst/rheology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nnst/error.hpp"
#include "nnst/kernels.hpp"

namespace nnst {

double FluidParams::beta() const { return p / (1.0 + gamma / sigma); }

double FluidParams::gamma_bar() const { return std::min(1.0, gamma); }

void FluidParams::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::BadValue, msg); };
  if (d != 2 && d != 3) bad("dimension must be 2 or 3");
  if (!(p > 1.0) || std::isinf(p)) bad("fluid.p must satisfy 1 < p < inf");
  if (!(q > 1.0 && q < 2.0)) bad("fluid.q must lie in (1, 2)");
  if (!(sigma >= 1.0)) bad("fluid.sigma must lie in [1, inf]");
  if (!(gamma >= 0.0) || std::isinf(gamma)) bad("fluid.gamma must be finite and >= 0");
  if (!(nu_star > 0.0)) bad("fluid.nu_star must be > 0");
  if (!(nu_max >= nu_star)) bad("fluid.nu_max must be >= fluid.nu_star");
  if (!(delta >= 0.0) || std::isinf(delta)) bad("fluid.delta must be finite and >= 0");
  if (static_cast<int>(g.size()) != d) bad("fluid.g must have d components");
  if (!(beta() > 1.0)) bad("derived beta = p / (1 + gamma/sigma) must exceed 1");
}

FluidParams FluidParams::newtonian(int d) {
  FluidParams f;
  f.d = d;
  f.g.assign(d, 0.0);
  f.g.back() = -1.0;
  f.sigma = std::numeric_limits<double>::infinity();
  return f;
}

// --- ViscosityLaw ------------------------------------------------------------

ViscosityLaw ViscosityLaw::constant(double value) {
  if (!(value >= 0.0)) fail(ErrorKind::BadValue, "constant viscosity must be >= 0");
  ViscosityLaw law;
  law.kind_ = ViscosityKind::constant;
  law.a_ = value;
  law.cap_ = value;
  return law;
}

ViscosityLaw ViscosityLaw::power(double nu_star, double gamma) {
  if (!(nu_star > 0.0) || !(gamma >= 0.0)) fail(ErrorKind::BadValue, "power law needs nu_star > 0, gamma >= 0");
  ViscosityLaw law;
  law.kind_ = ViscosityKind::power;
  law.a_ = nu_star;
  law.gamma_ = gamma;
  law.cap_ = std::numeric_limits<double>::infinity();
  return law;
}

ViscosityLaw ViscosityLaw::bounded_power(double nu_star, double gamma, double nu_max) {
  if (!(nu_star > 0.0) || !(gamma >= 0.0) || !(nu_max >= nu_star))
    fail(ErrorKind::BadValue, "bounded power law needs nu_star > 0, gamma >= 0, nu_max >= nu_star");
  ViscosityLaw law;
  law.kind_ = ViscosityKind::bounded_power;
  law.a_ = nu_star;
  law.gamma_ = gamma;
  law.cap_ = nu_max;
  return law;
}

ViscosityLaw ViscosityLaw::user_table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) fail(ErrorKind::BadValue, "viscosity table needs at least two points");
  if (points.front().first != 0.0) fail(ErrorKind::BadValue, "viscosity table must start at r = 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second >= 0.0)) fail(ErrorKind::BadValue, "viscosity table values must be >= 0");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      fail(ErrorKind::BadValue, "viscosity table abscissae must increase strictly");
  }
  ViscosityLaw law;
  law.kind_ = ViscosityKind::user_table;
  law.cap_ = 0.0;
  for (const auto& [r, v] : points) law.cap_ = std::max(law.cap_, v);
  law.table_ = std::move(points);
  return law;
}

double ViscosityLaw::operator()(double r) const noexcept {
  r = std::abs(r);
  switch (kind_) {
    case ViscosityKind::constant:
      return a_;
    case ViscosityKind::power:
      return gamma_ == 0.0 ? a_ : a_ * std::pow(r, gamma_);
    case ViscosityKind::bounded_power:
      return std::min(cap_, gamma_ == 0.0 ? a_ : a_ * std::pow(r, gamma_));
    case ViscosityKind::user_table: {
      if (r >= table_.back().first) return table_.back().second;
      auto it = std::upper_bound(table_.begin(), table_.end(), r,
                                 [](double x, const auto& pt) { return x < pt.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (r - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double ViscosityLaw::upper_bound() const noexcept {
  if (kind_ == ViscosityKind::power && gamma_ == 0.0) return a_;
  return cap_;
}

std::string ViscosityLaw::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ViscosityKind::constant: os << "constant(" << a_ << ")"; break;
    case ViscosityKind::power: os << "power(nu_star=" << a_ << ", gamma=" << gamma_ << ")"; break;
    case ViscosityKind::bounded_power:
      os << "bounded_power(nu_star=" << a_ << ", gamma=" << gamma_ << ", nu_max=" << cap_ << ")";
      break;
    case ViscosityKind::user_table: os << "user_table(" << table_.size() << " points)"; break;
  }
  return os.str();
}

bool satisfies_lower_bound(const ViscosityLaw& law, double nu_star, double gamma, int samples) {
  for (int i = 1; i <= samples; ++i) {
    const double r = static_cast<double>(i) / samples;
    const double need = nu_star * std::pow(r, gamma);
    if (law(r) < need * (1.0 - 1e-12) || law(-r) < need * (1.0 - 1e-12)) return false;
  }
  return true;
}

double holder_constant(const ViscosityLaw& law, double exponent, double lo, double hi, int samples) {
  std::vector<double> xs(samples), vs(samples);
  for (int i = 0; i < samples; ++i) {
    xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
    vs[i] = law(xs[i]);
  }
  double H = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = i + 1; j < samples; ++j)
      H = std::max(H, std::abs(vs[i] - vs[j]) / std::pow(xs[j] - xs[i], exponent));
  return H;
}

// --- fields ------------------------------------------------------------------

GridField viscosity_eval(const ViscosityLaw& law, const GridField& rho) {
  GridField out(rho.grid);
  kernels::viscosity(law, rho.values, out.values);
  return out;
}

SymTensorField stress(const ViscosityLaw& law, const FluidParams& params, const GridField& rho,
                      const SymTensorField& Du) {
  const GridField nu = viscosity_eval(law, rho);
  SymTensorField out(Du.grid);
  const auto in = kernels::packed_view(Du);
  const auto dst = kernels::packed_view_mut(out);
  kernels::power_stress({Du.dim(), params.p, params.delta}, nu.values, in, dst);
  return out;
}

GridField dissipation_density(const ViscosityLaw& law, const FluidParams& params, const GridField& rho,
                              const SymTensorField& Du) {
  const GridField nu = viscosity_eval(law, rho);
  GridField out(rho.grid);
  const auto in = kernels::packed_view(Du);
  kernels::dissipation({Du.dim(), params.p, params.delta}, nu.values, in, out.values);
  return out;
}

}  // namespace nnst

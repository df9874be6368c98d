#include "spinwave/radiative.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinwave/error.hpp"
#include "spinwave/parallel.hpp"
#include "spinwave/simd/kernels.hpp"

namespace spinwave::radiative {

DipoleAxis::DipoleAxis(Vec3 direction) {
  const double len = norm(direction);
  if (!is_finite(direction) || len == 0.0) throw InvalidArgument("dipole axis must be a nonzero finite vector");
  n_ = direction / len;
}

std::string to_string(KernelMode mode) {
  return mode == KernelMode::complex ? "complex" : "real_only";
}

KernelMode parse_kernel_mode(const std::string& name) {
  if (name == "real_only") return KernelMode::real_only;
  if (name == "complex") return KernelMode::complex;
  throw InvalidArgument("unknown kernel mode '" + name + "' (real_only|complex)");
}

double f_pair(const Vec3& x, const DipoleAxis& axis) {
  return simd::pair_kernel(x, axis.direction(), false).f;
}

double g_pair(const Vec3& x, const DipoleAxis& axis) {
  if (norm(x) == 0.0) throw InvalidArgument("dispersive kernel diverges at zero separation");
  const double r = norm(x);
  const double c = dot(axis.direction(), x) / r;
  const double y0 = -std::cos(r) / r;
  const double y1x = (-std::cos(r) / r - std::sin(r)) / (r * r);
  return 1.5 * ((1.0 - c * c) * y0 - (1.0 - 3.0 * c * c) * y1x);
}

double f_quadrature(const Vec3& x, const DipoleAxis& axis, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  using boost::math::quadrature::gauss_kronrod;
  constexpr double pi = std::numbers::pi;
  const Vec3& n = axis.direction();

  // Polar axis along x, so the phase is |x| cosθ and the inner φ integral
  // only sees the smooth angular weight.
  const double r = norm(x);
  Vec3 e3{0, 0, 1};
  if (r > 0.0) e3 = x / r;
  Vec3 helper = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = cross(helper, e3) / norm(cross(helper, e3));
  const Vec3 e2 = cross(e3, e1);
  const double n1 = dot(n, e1), n2 = dot(n, e2), n3 = dot(n, e3);

  double worst = 0.0;
  auto inner = [&](double u) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    auto weight = [&](double phi) {
      const double nk = n1 * s * std::cos(phi) + n2 * s * std::sin(phi) + n3 * u;
      return 1.0 - nk * nk;
    };
    double err = 0.0;
    const double w = gauss_kronrod<double, 31>::integrate(weight, 0.0, 2.0 * pi, 3, tol * 1e-2, &err);
    worst = std::max(worst, err);
    return w * std::cos(r * u);
  };
  double err = 0.0, l1 = 0.0;
  const double outer = gauss_kronrod<double, 61>::integrate(inner, -1.0, 1.0, 10, tol * 1e-2, &err, &l1);
  const double value = 3.0 / (8.0 * pi) * outer;
  const double achieved = 3.0 / (8.0 * pi) * (err + 2.0 * worst);
  if (!(achieved <= tol)) {
    std::ostringstream msg;
    msg << "angular quadrature did not converge: estimate " << value << ", error " << achieved
        << " > tol " << tol;
    throw NumericError(msg.str());
  }
  return value;
}

ComplexRate gamma_n(const AtomicEnsemble& e, const WaveVector& k0p, const DipoleAxis& axis,
                    KernelMode mode, unsigned threads) {
  ComplexRate out;
  out.mode = mode;
  if (std::abs(k0p.magnitude() - 1.0) > 0.1) {
    std::ostringstream msg;
    msg << "|k'0| = " << k0p.magnitude() << " differs from the emission wavenumber by more than 10%";
    out.warnings.push_back(msg.str());
  }
  const simd::PositionsView r{e.xs(), e.ys(), e.zs()};
  const simd::PairSum s = simd::kernels().pair_kernel_sum(
      r, k0p, axis.direction(), mode == KernelMode::complex, threads ? threads : default_threads());
  out.value = 1.0 + 2.0 * s.value / static_cast<double>(e.size());
  if (mode == KernelMode::complex) out.near_zone_pairs = s.near_zone;
  out.coincident_pairs = s.coincident;
  if (s.coincident > 0)
    out.warnings.push_back(std::to_string(s.coincident) + " coincident atom pairs (f = 1 used)");
  if (out.near_zone_pairs > 0)
    out.warnings.push_back(std::to_string(out.near_zone_pairs) +
                           " near-zone pairs, dispersive part dropped");
  return out;
}

Eigen::MatrixXcd decay_matrix(const AtomicEnsemble& e, const DipoleAxis& axis, KernelMode mode,
                              unsigned threads) {
  const auto n = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXcd m(n, n);
  const bool dispersive = mode == KernelMode::complex;
  parallel_for(e.size(), threads ? threads : default_threads(), [&](std::size_t mu) {
    const auto i = static_cast<Eigen::Index>(mu);
    m(i, i) = 0.5;
    for (std::size_t nu = mu + 1; nu < e.size(); ++nu) {
      const auto k = simd::pair_kernel(e[mu] - e[nu], axis.direction(), dispersive);
      const auto j = static_cast<Eigen::Index>(nu);
      m(i, j) = 0.5 * cplx{k.f, k.g};
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return m;
}

}  // namespace spinwave::radiative

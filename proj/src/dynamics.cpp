#include "spinwave/dynamics.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/NonLinearOptimization>

#include "spinwave/dicke.hpp"
#include "spinwave/error.hpp"
#include "spinwave/parallel.hpp"
#include "spinwave/simd/kernels.hpp"

namespace spinwave::dynamics {

namespace {

constexpr double pi = std::numbers::pi;

unsigned workers(unsigned threads) { return threads ? threads : default_threads(); }

void require_decaying(cplx gamma_n) {
  if (!(gamma_n.real() > 0.0) || !std::isfinite(gamma_n.imag()))
    throw InvalidArgument("collective rate must have a positive real part");
}

// (e^{-(Γ/2 + iΔ) t} - 1) / (Γ/2 + iΔ)
cplx lorentz_factor(cplx gamma_n, double detuning, double t) {
  const cplx z = 0.5 * gamma_n + cplx{0.0, detuning};
  if (std::isinf(t)) return -1.0 / z;
  return (std::exp(-z * t) - 1.0) / z;
}

}  // namespace

std::string to_string(PulseShape shape) { return shape == PulseShape::sin2 ? "sin2" : "square"; }

PulseShape parse_pulse_shape(const std::string& name) {
  if (name == "square") return PulseShape::square;
  if (name == "sin2") return PulseShape::sin2;
  throw InvalidArgument("unknown pulse shape '" + name + "' (square|sin2)");
}

PulseProfile::PulseProfile(PulseShape shape, double mean_rabi)
    : shape_(shape), mean_rabi_(mean_rabi) {
  if (!(mean_rabi > 0.0) || !std::isfinite(mean_rabi))
    throw InvalidArgument("mean Rabi frequency must be positive");
  duration_ = pi / mean_rabi;
}

double PulseProfile::rabi(double t) const {
  if (t < 0.0 || t > duration_) return 0.0;
  if (shape_ == PulseShape::square) return mean_rabi_;
  const double s = std::sin(pi * t / duration_);
  return 2.0 * mean_rabi_ * s * s;
}

double PulseProfile::beta(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= duration_) return 0.5 * pi;
  if (shape_ == PulseShape::square) return 0.5 * mean_rabi_ * t;
  return mean_rabi_ * (0.5 * t - duration_ * std::sin(2.0 * pi * t / duration_) / (4.0 * pi));
}

AmplitudeTrace e0_of_t(const PulseProfile& pulse, cplx gamma_n, const std::vector<double>& t) {
  AmplitudeTrace out{t, {}};
  out.value.reserve(t.size());
  for (double ti : t) out.value.push_back(std::sin(pulse.beta(ti)) * std::exp(-0.5 * gamma_n * ti));
  return out;
}

Validity validity_check(const PulseProfile& pulse, cplx gamma_n) {
  const double ratio = gamma_n.real() * pulse.duration() / 2.0;
  return {ratio < kValidityThreshold, ratio};
}

cplx mode_amplitude(cplx gamma_n, cplx v0g, double detuning, double t) {
  if (t == 0.0) return 0.0;
  return lorentz_factor(gamma_n, detuning, t) * v0g;
}

ModeGrid::ModeGrid(std::vector<Direction> directions, std::vector<double> detunings,
                   std::vector<double> detuning_weights, radiative::DipoleAxis axis)
    : directions_(std::move(directions)),
      detunings_(std::move(detunings)),
      detuning_weights_(std::move(detuning_weights)),
      axis_(axis) {
  if (directions_.empty() || detunings_.empty()) throw InvalidArgument("empty mode grid");
  if (detuning_weights_.size() != detunings_.size())
    throw InvalidArgument("detuning weights do not match the detuning grid");
  for (auto& d : directions_) {
    const double len = norm(d.k);
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidArgument("bad grid direction");
    d.k = d.k / len;
  }
  const std::size_t n = detunings_.size();
  double scale = 0.0;
  for (double x : detunings_) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(detunings_[i] + detunings_[n - 1 - i]) > 1e-12 * std::max(1.0, scale))
      throw InvalidArgument("detuning grid must be symmetric about zero");
}

std::vector<Direction> ModeGrid::sphere(unsigned n_theta, unsigned n_phi, Vec3 polar_axis) {
  if (n_theta == 0 || n_phi == 0) throw InvalidArgument("empty direction grid");
  const double len = norm(polar_axis);
  if (!(len > 0.0)) throw InvalidArgument("polar axis must be nonzero");
  const Vec3 e3 = polar_axis / len;
  const Vec3 helper = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = cross(helper, e3) / norm(cross(helper, e3));
  const Vec3 e2 = cross(e3, e1);

  // Legendre nodes: boost returns the non-negative zeros only.
  const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n_theta));
  std::vector<double> nodes;
  for (double z : zeros) {
    nodes.push_back(z);
    if (z != 0.0) nodes.push_back(-z);
  }
  std::sort(nodes.begin(), nodes.end());

  std::vector<Direction> out;
  out.reserve(nodes.size() * n_phi);
  const double dphi = 2.0 * pi / n_phi;
  for (double u : nodes) {
    const double dp = boost::math::legendre_p_prime(static_cast<int>(n_theta), u);
    const double wu = 2.0 / ((1.0 - u * u) * dp * dp);
    const double s = std::sqrt(1.0 - u * u);
    for (unsigned j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      out.push_back({e1 * (s * std::cos(phi)) + e2 * (s * std::sin(phi)) + e3 * u, wu * dphi});
    }
  }
  return out;
}

std::vector<double> ModeGrid::detuning_grid(double half_width, std::size_t points) {
  if (!(half_width > 0.0) || points < 2) throw InvalidArgument("detuning grid needs a width and >= 2 points");
  std::vector<double> x(points);
  const double step = 2.0 * half_width / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double mirrored = static_cast<double>(i) - 0.5 * static_cast<double>(points - 1);
    x[i] = mirrored * step;
  }
  return x;
}

std::vector<double> ModeGrid::trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  if (x.size() == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

ModeGrid ModeGrid::with_default_detunings(std::vector<Direction> directions, cplx gamma_n,
                                          radiative::DipoleAxis axis) {
  require_decaying(gamma_n);
  auto det = detuning_grid(20.0 * gamma_n.real(), 512);
  auto w = trapezoid_weights(det);
  return ModeGrid(std::move(directions), std::move(det), std::move(w), axis);
}

double ModeGrid::direction_measure(std::size_t d) const {
  const double c = dot(axis_.direction(), directions_[d].k);
  return 3.0 / (8.0 * pi) * (1.0 - c * c) * directions_[d].weight;
}

double ModeGrid::measure(std::size_t d, std::size_t j) const {
  return direction_measure(d) * detuning_weights_[j] / (2.0 * pi);
}

std::vector<cplx> ground_couplings(const AtomicEnsemble& e, const WaveVector& k0p,
                                   const ModeGrid& grid, unsigned threads) {
  const dicke::Couplings c(e, k0p);
  std::vector<cplx> v(grid.directions().size());
  parallel_for(v.size(), workers(threads),
               [&](std::size_t d) { v[d] = c.v_ground(0, WaveVector(grid.directions()[d].k)); });
  return v;
}

std::vector<SpectrumSample> emission_spectrum(const AtomicEnsemble& e, const WaveVector& k0p,
                                              cplx gamma_n, const ModeGrid& grid, double t,
                                              bool normalize_peak, unsigned threads) {
  require_decaying(gamma_n);
  const auto v = ground_couplings(e, k0p, grid, threads);
  const std::size_t nd = grid.detunings().size();
  std::vector<SpectrumSample> out(grid.size());
  double peak = 0.0;
  for (std::size_t d = 0; d < v.size(); ++d)
    for (std::size_t j = 0; j < nd; ++j) {
      const double det = grid.detunings()[j];
      const double I = std::norm(mode_amplitude(gamma_n, v[d], det, t));
      out[d * nd + j] = {det, grid.directions()[d].k, I};
      peak = std::max(peak, I);
    }
  if (normalize_peak && peak > 0.0)
    for (auto& s : out) s.intensity /= peak;
  return out;
}

std::vector<cplx> phase_matched_weights(const AtomicEnsemble& e, const WaveVector& k0p,
                                        cplx gamma_n, const ModeGrid& grid, unsigned threads) {
  require_decaying(gamma_n);
  const auto v = ground_couplings(e, k0p, grid, threads);
  const std::size_t nd = grid.detunings().size();
  std::vector<cplx> w(grid.size());
  double norm2 = 0.0;
  for (std::size_t d = 0; d < v.size(); ++d)
    for (std::size_t j = 0; j < nd; ++j) {
      const cplx x = v[d] / (0.5 * gamma_n + cplx{0.0, grid.detunings()[j]});
      w[d * nd + j] = x;
      norm2 += std::norm(x) * grid.measure(d, j);
    }
  if (!(norm2 > 0.0)) throw InvalidArgument("phase-matched weights vanish on this grid");
  const double s = 1.0 / std::sqrt(norm2);
  for (auto& x : w) x *= s;
  return w;
}

Bookkeeping photon_bookkeeping(const AtomicEnsemble& e, const WaveVector& k0p, cplx gamma_n,
                               const ModeGrid& grid, double t, unsigned threads) {
  require_decaying(gamma_n);
  const auto v = ground_couplings(e, k0p, grid, threads);
  std::vector<double> angular(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) angular[d] = std::norm(v[d]) * grid.direction_measure(d);
  std::vector<double> spectral(grid.detunings().size());
  for (std::size_t j = 0; j < spectral.size(); ++j)
    spectral[j] = (t == 0.0 ? 0.0 : std::norm(lorentz_factor(gamma_n, grid.detunings()[j], t))) *
                  grid.detuning_weights()[j] / (2.0 * pi);
  return {std::exp(-gamma_n.real() * t),
          simd::pairwise_sum(angular) * simd::pairwise_sum(spectral)};
}

CascadeResult cascade_two_photon(const AtomicEnsemble& e, const WaveVector& k0p, cplx gamma_n,
                                 const ModeGrid& grid, const std::vector<double>& t,
                                 unsigned threads) {
  require_decaying(gamma_n);
  if (e.size() < 2) throw InvalidArgument("a double spin wave needs N >= 2");
  if (grid.size() > kCascadeMaxModes)
    throw InvalidArgument("cascade grid has " + std::to_string(grid.size()) + " modes, limit " +
                          std::to_string(kCascadeMaxModes));
  const dicke::Couplings c(e, k0p);
  const std::size_t ndir = grid.directions().size();
  const std::size_t nd = grid.detunings().size();

  CascadeResult out;
  out.v12.resize(ndir);
  out.vg0.resize(ndir);
  parallel_for(ndir, workers(threads), [&](std::size_t d) {
    const WaveVector k(grid.directions()[d].k);
    out.v12[d] = c.v_down(2, 0, 0, k);
    out.vg0[d] = std::conj(c.v_ground(0, k));
  });

  out.e02.t = t;
  for (double ti : t) out.e02.value.push_back(std::exp(-gamma_n * ti));

  out.ephi0.resize(grid.size());
  for (std::size_t d = 0; d < ndir; ++d)
    for (std::size_t j = 0; j < nd; ++j) {
      const cplx z = 0.5 * gamma_n + cplx{0.0, grid.detunings()[j]};
      auto& tr = out.ephi0[d * nd + j];
      tr.t = t;
      tr.value.reserve(t.size());
      for (double ti : t)
        tr.value.push_back(out.v12[d] * (std::exp(-(gamma_n + cplx{0.0, grid.detunings()[j]}) * ti) -
                                         std::exp(-0.5 * gamma_n * ti)) /
                           z);
    }

  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXcd first(m), second(m);
  for (std::size_t d = 0; d < ndir; ++d)
    for (std::size_t j = 0; j < nd; ++j) {
      const cplx z = 0.5 * gamma_n + cplx{0.0, grid.detunings()[j]};
      const auto i = static_cast<Eigen::Index>(d * nd + j);
      first(i) = out.v12[d] / z;
      second(i) = out.vg0[d] / z;
    }
  out.g_asymptotic = first * second.transpose();
  out.g_asymptotic.diagonal() /= std::sqrt(2.0);
  return out;
}

OdeResult single_exc_ode_oracle(const AtomicEnsemble& e, const WaveVector& k0p,
                                const radiative::DipoleAxis& axis,
                                const std::optional<PulseProfile>& pulse,
                                const std::vector<double>& t, const OdeOptions& options) {
  namespace odeint = boost::numeric::odeint;
  const std::size_t n = e.size();
  if (n > kOdeMaxAtoms)
    throw InvalidArgument("ODE oracle is limited to N <= " + std::to_string(kOdeMaxAtoms));
  if (t.empty() || t.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidArgument("time grid must be strictly increasing");

  const Eigen::MatrixXcd M = radiative::decay_matrix(e, axis, options.mode, options.threads);
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXcd sym(N);
  for (Eigen::Index i = 0; i < N; ++i)
    sym(i) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), dot(k0p, e[static_cast<std::size_t>(i)]));

  // State: E (first N) and, with a pulse, R (next N).
  using State = std::vector<cplx>;
  const bool driven = pulse.has_value();
  State y(driven ? 2 * n : n, cplx{});
  for (Eigen::Index i = 0; i < N; ++i) y[static_cast<std::size_t>(driven ? N + i : i)] = sym(i);

  auto rhs = [&](const State& s, State& ds, double time) {
    Eigen::Map<const Eigen::VectorXcd> E(s.data(), N);
    Eigen::Map<Eigen::VectorXcd> dE(ds.data(), N);
    dE.noalias() = -M * E;
    if (driven) {
      Eigen::Map<const Eigen::VectorXcd> R(s.data() + n, N);
      Eigen::Map<Eigen::VectorXcd> dR(ds.data() + n, N);
      const double half = 0.5 * pulse->rabi(time);
      dE += half * R;
      dR = -half * E;
    }
  };

  OdeResult out;
  {
    State d0(y.size());
    rhs(y, d0, 0.0);
    out.initial_slope = sym.dot(Eigen::Map<const Eigen::VectorXcd>(d0.data(), N));
  }
  auto observe = [&](const State& s, double time) {
    Eigen::Map<const Eigen::VectorXcd> E(s.data(), N);
    const cplx p = sym.dot(E);
    const double nn = E.squaredNorm();
    if (!std::isfinite(nn)) throw NumericError("ODE state became non-finite");
    out.t.push_back(time);
    out.symmetric.push_back(p);
    out.norm2.push_back(nn);
    out.leakage.push_back(nn > 0.0 ? 1.0 - std::norm(p) / nn : 0.0);
    if (options.keep_states) out.states.emplace_back(E);
  };

  if (t.size() == 1) {
    observe(y, 0.0);
    return out;
  }
  auto stepper = odeint::make_controlled(options.atol, options.rtol,
                                         odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min(1e-3, 0.1 * (t[1] - t[0]));
  try {
    odeint::integrate_times(stepper, rhs, y, t.begin(), t.end(), dt0, observe,
                            odeint::max_step_checker(100000));
  } catch (const odeint::odeint_error& err) {
    throw NumericError(std::string("ODE step control failed: ") + err.what());
  }
  return out;
}

namespace {

struct LorentzFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>& x;
  const std::vector<double>& y;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = 2.0 * (x[i] - p(1)) / p(2);
      f(static_cast<Eigen::Index>(i)) = p(0) / (1.0 + u * u) - y[i];
    }
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const double u = 2.0 * (x[i] - p(1)) / p(2);
      const double den = 1.0 + u * u;
      J(r, 0) = 1.0 / den;
      // d/du [a / (1 + u^2)] = -2 a u / den^2
      const double dfu = -2.0 * p(0) * u / (den * den);
      J(r, 1) = dfu * (-2.0 / p(2));
      J(r, 2) = dfu * (-u / p(2));
    }
    return 0;
  }
};

}  // namespace

LorentzianFit fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) throw InvalidArgument("fit needs >= 4 paired samples");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double a0 = y[peak];
  if (!(a0 > 0.0)) throw InvalidArgument("fit needs a positive peak");

  // half-maximum crossings on either side for the starting width
  auto crossing = [&](int dir) {
    std::size_t i = peak;
    while (true) {
      const std::size_t next = dir > 0 ? i + 1 : i - 1;
      if ((dir > 0 && next >= x.size()) || (dir < 0 && i == 0)) return x[i];
      if (y[next] < 0.5 * a0) {
        const double f = (y[i] - 0.5 * a0) / (y[i] - y[next]);
        return x[i] + f * (x[next] - x[i]);
      }
      i = next;
    }
  };
  double w0 = crossing(+1) - crossing(-1);
  if (!(w0 > 0.0)) w0 = (x.back() - x.front()) / 10.0;

  Eigen::VectorXd p(3);
  p << a0, x[peak], w0;
  LorentzFunctor fn{x, y};
  Eigen::LevenbergMarquardt<LorentzFunctor> lm(fn);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
    throw NumericError("Lorentzian fit: improper input");
  Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
  fn(p, r);
  return {p(0), p(1), std::abs(p(2)), std::sqrt(r.squaredNorm() / static_cast<double>(x.size()))};
}

}  // namespace spinwave::dynamics

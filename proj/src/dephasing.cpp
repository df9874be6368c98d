#include "spinwave/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "spinwave/dicke.hpp"
#include "spinwave/error.hpp"
#include "spinwave/simd/kernels.hpp"

namespace spinwave::dephasing {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

cplx expi(double x) { return {std::cos(x), std::sin(x)}; }

// Σ_μν e^{iΦ_μν} with the diagonal contributing N.
cplx full_sum(const PhaseMatrix& phi) {
  const std::size_t n = phi.size();
  std::vector<double> re(n), im(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    cplx row{};
    for (std::size_t nu = 0; nu < n; ++nu) row += expi(phi(mu, nu));
    re[mu] = row.real();
    im[mu] = row.imag();
  }
  return {simd::pairwise_sum(re), simd::pairwise_sum(im)};
}

}  // namespace

void validate(const InteractionModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, VanDerWaals>) {
          if (!(m.c6 >= 0.0) || !std::isfinite(m.c6)) throw InvalidArgument("C6 must be >= 0");
        } else if constexpr (std::is_same_v<T, Dipolar>) {
          if (!(m.c3 >= 0.0) || !std::isfinite(m.c3)) throw InvalidArgument("C3 must be >= 0");
        } else if constexpr (std::is_same_v<T, IidUniform>) {
          if (!(m.width >= 0.0 && m.width <= two_pi))
            throw InvalidArgument("phase width must lie in [0, 2 pi]");
        }
      },
      model);
}

std::string describe(const InteractionModel& model) {
  std::ostringstream s;
  s.precision(17);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, VanDerWaals>)
          s << "vdw:c6=" << m.c6;
        else if constexpr (std::is_same_v<T, Dipolar>)
          s << "dipolar:c3=" << m.c3;
        else if constexpr (std::is_same_v<T, IidUniform>)
          s << "iid_uniform:width=" << m.width;
        else
          s << "none";
      },
      model);
  return s.str();
}

PhaseMatrix::PhaseMatrix(Eigen::MatrixXd phases) : phi_(std::move(phases)) {
  if (phi_.rows() != phi_.cols() || phi_.rows() == 0) throw InvalidArgument("phase matrix must be square and nonempty");
  for (Eigen::Index i = 0; i < phi_.rows(); ++i) {
    if (phi_(i, i) != 0.0) throw InvalidArgument("phase matrix needs a zero diagonal");
    for (Eigen::Index j = i + 1; j < phi_.cols(); ++j) {
      if (phi_(i, j) != phi_(j, i)) throw InvalidArgument("phase matrix must be symmetric");
      if (!std::isfinite(phi_(i, j))) throw InvalidArgument("non-finite phase");
    }
  }
}

PhaseMatrix phase_matrix(const AtomicEnsemble& e, const InteractionModel& model, double T,
                         std::uint64_t seed) {
  validate(model);
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("storage time must be >= 0");
  const auto n = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
  if (T == 0.0 || std::holds_alternative<NoInteraction>(model)) return PhaseMatrix(std::move(phi));

  if (const auto* iid = std::get_if<IidUniform>(&model)) {
    for (Eigen::Index mu = 0; mu < n; ++mu) {
      std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(mu)));
      for (Eigen::Index nu = mu + 1; nu < n; ++nu) phi(mu, nu) = phi(nu, mu) = iid->width * uniform01(engine);
    }
    return PhaseMatrix(std::move(phi));
  }

  const bool vdw = std::holds_alternative<VanDerWaals>(model);
  const double coeff = vdw ? std::get<VanDerWaals>(model).c6 : std::get<Dipolar>(model).c3;
  for (Eigen::Index mu = 0; mu < n; ++mu)
    for (Eigen::Index nu = mu + 1; nu < n; ++nu) {
      const double r = norm(e[static_cast<std::size_t>(mu)] - e[static_cast<std::size_t>(nu)]);
      if (r == 0.0) throw InvalidArgument("divergent phase: coincident atoms " + std::to_string(mu) + " and " + std::to_string(nu));
      const double r3 = r * r * r;
      phi(mu, nu) = phi(nu, mu) = coeff * T / (vdw ? r3 * r3 : r3);
    }
  return PhaseMatrix(std::move(phi));
}

StateAmplitudes::StateAmplitudes(cplx a0, cplx a1, cplx a2) : c0(a0), c1(a1), c2(a2) {
  if (std::norm(c0) + std::norm(c1) + std::norm(c2) > 1.0 + 1e-12)
    throw InvalidArgument("state amplitudes exceed unit norm");
}

StateAmplitudes StateAmplitudes::truncated_coherent() {
  const double s = 1.0 / std::sqrt(std::numbers::e);
  return {s, s, s / std::sqrt(2.0)};
}

double g2_zero(const StateAmplitudes& c) {
  const double den = std::norm(c.c1) + 2.0 * std::norm(c.c2);
  if (den == 0.0) throw InvalidArgument("g2 undefined without excitations");
  return 2.0 * std::norm(c.c2) / (den * den);
}

double g2_of_T(const StateAmplitudes& c, const PhaseMatrix& phi) {
  const std::size_t n = phi.size();
  if (n < 2) throw InvalidArgument("g2 needs N >= 2");
  const double N = static_cast<double>(n);
  std::vector<double> rows(n);
  std::vector<double> re(n), im(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    cplx row{};
    for (std::size_t nu = 0; nu < n; ++nu) row += expi(phi(mu, nu));
    rows[mu] = std::norm(row);
    re[mu] = row.real();
    im[mu] = row.imag();
  }
  const cplx total{simd::pairwise_sum(re), simd::pairwise_sum(im)};
  const double num = std::norm(c.c2) * std::norm(std::sqrt(2.0) / (N * N) * total);
  const double den = std::norm(c.c1) + std::norm(c.c2) * 2.0 / (N * N * N) * simd::pairwise_sum(rows);
  if (den == 0.0) throw InvalidArgument("g2 undefined without excitations");
  return num / (den * den);
}

double g2_asymptotic(const StateAmplitudes& c, const PhaseMatrix& phi) {
  const double N = static_cast<double>(phi.size());
  if (phi.size() < 2) throw InvalidArgument("g2 needs N >= 2");
  const double c1 = std::norm(c.c1);
  if (c1 == 0.0) throw InvalidArgument("long-time g2 form needs c1 != 0");
  return 2.0 * std::norm(c.c2) / (c1 * c1) * std::norm(full_sum(phi) / (N * N));
}

Overlap overlap_symmetric(const PhaseMatrix& phi, unsigned n, const OverlapOptions& options) {
  const std::size_t N = phi.size();
  if (n > N) throw InvalidArgument("overlap needs n <= N");
  if (n < 2) throw InvalidArgument("overlap needs n >= 2");

  if (n <= 3 && !options.force_monte_carlo) {
    cplx s{};
    if (n == 2) {
      for (std::size_t a = 1; a < N; ++a)
        for (std::size_t b = 0; b < a; ++b) s += expi(phi(a, b));
    } else {
      for (std::size_t a = 2; a < N; ++a)
        for (std::size_t b = 1; b < a; ++b)
          for (std::size_t c = 0; c < b; ++c) s += expi(phi(a, b) + phi(a, c) + phi(b, c));
    }
    return {s / static_cast<double>(dicke::binomial(N, n)), 0.0, true, dicke::binomial(N, n)};
  }

  if (options.samples < 2) throw InvalidArgument("Monte Carlo overlap needs >= 2 samples");
  std::vector<std::uint32_t> atoms(N);
  std::iota(atoms.begin(), atoms.end(), 0u);
  std::vector<std::uint32_t> pick(n);
  std::mt19937_64 engine(derive_seed(options.seed, n));
  double sr = 0, si = 0, qr = 0, qi = 0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    std::sample(atoms.begin(), atoms.end(), pick.begin(), n, engine);
    double phase = 0.0;
    for (unsigned l = 0; l < n; ++l)
      for (unsigned j = l + 1; j < n; ++j) phase += phi(pick[l], pick[j]);
    const double c = std::cos(phase), sn = std::sin(phase);
    sr += c;
    si += sn;
    qr += c * c;
    qi += sn * sn;
  }
  const double m = static_cast<double>(options.samples);
  const cplx mean{sr / m, si / m};
  const double vr = (qr - m * mean.real() * mean.real()) / (m - 1.0);
  const double vi = (qi - m * mean.imag() * mean.imag()) / (m - 1.0);
  return {mean, {std::sqrt(std::max(0.0, vr) / m), std::sqrt(std::max(0.0, vi) / m)}, false,
          options.samples};
}

cplx overlap_nonsymmetric_2(const PhaseMatrix& phi, std::uint64_t ell) {
  const std::size_t N = phi.size();
  if (N < 2) throw InvalidArgument("n = 2 overlaps need N >= 2");
  const std::uint64_t dim = dicke::binomial(N, 2);
  if (ell == 0 || ell >= dim) throw InvalidArgument("ell out of range [1, binom(N,2) - 1]");
  dicke::Tuple t{0, 1};
  cplx below{};
  for (std::uint64_t j = 0; j < ell; ++j) {
    below += expi(phi(t[0], t[1]));
    dicke::next_tuple(t, N);
  }
  const double L = static_cast<double>(ell) * static_cast<double>(ell + 1);
  return (below - static_cast<double>(ell) * expi(phi(t[0], t[1]))) /
         std::sqrt(L * static_cast<double>(dim));
}

std::vector<cplx> overlaps_2(const PhaseMatrix& phi) {
  const std::size_t N = phi.size();
  if (N < 2) throw InvalidArgument("n = 2 overlaps need N >= 2");
  const std::uint64_t dim = dicke::binomial(N, 2);
  std::vector<cplx> out(dim);
  dicke::Tuple t{0, 1};
  cplx prefix{};
  const double sd = std::sqrt(static_cast<double>(dim));
  for (std::uint64_t l = 0; l < dim; ++l) {
    const cplx x = expi(phi(t[0], t[1]));
    if (l > 0) {
      const double L = static_cast<double>(l) * static_cast<double>(l + 1);
      out[l] = (prefix - static_cast<double>(l) * x) / (std::sqrt(L) * sd);
    }
    prefix += x;
    dicke::next_tuple(t, N);
  }
  out[0] = prefix / static_cast<double>(dim);
  return out;
}

}  // namespace spinwave::dephasing

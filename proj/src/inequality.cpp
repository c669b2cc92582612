#include "fpml/inequality.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fpml/rng.hpp"

namespace fpml {

EnsembleSpec::Kind ensemble_kind_from_string(const std::string& s) {
  if (s == "band-limited") return EnsembleSpec::Kind::BandLimited;
  if (s == "bumps") return EnsembleSpec::Kind::Bumps;
  if (s == "signed-rough") return EnsembleSpec::Kind::SignedRough;
  throw std::invalid_argument("unknown ensemble kind: " + s);
}

namespace {

Field band_limited(const Grid& g, Rng& rng) {
  int kc = std::min(g.points_per_dim() / 8, g.dim() == 1 ? 12 : 4);
  double base = std::numbers::pi / g.half_length();
  Field u(g);
  double xy[2];
  if (g.dim() == 1) {
    for (int k = 1; k <= kc; ++k) {
      double a = rng.normal() / std::sqrt(static_cast<double>(k));
      double b = rng.normal() / std::sqrt(static_cast<double>(k));
      double w = base * k;
      for (std::size_t i = 0; i < u.size(); ++i) {
        node_coords(g, i, xy);
        u[i] += a * std::cos(w * xy[0]) + b * std::sin(w * xy[0]);
      }
    }
  } else {
    for (int k0 = 0; k0 <= kc; ++k0) {
      for (int k1 = 0; k1 <= kc; ++k1) {
        if (k0 == 0 && k1 == 0) continue;
        double decay = 1.0 / std::sqrt(static_cast<double>(k0 + k1));
        double a = rng.normal() * decay, b = rng.normal() * decay;
        double w0 = base * k0, w1 = base * k1;
        for (std::size_t i = 0; i < u.size(); ++i) {
          node_coords(g, i, xy);
          double phase = w0 * xy[0] + w1 * xy[1];
          u[i] += a * std::cos(phase) + b * std::sin(phase);
        }
      }
    }
  }
  return u;
}

Field bumps(const Grid& g, Rng& rng) {
  Field u(g);
  int nb = rng.uniform_int(1, 3);
  double l = g.half_length();
  double xy[2];
  for (int b = 0; b < nb; ++b) {
    double c0 = rng.uniform(-0.5 * l, 0.5 * l);
    double c1 = g.dim() == 2 ? rng.uniform(-0.5 * l, 0.5 * l) : 0.0;
    double width = rng.uniform(0.05 * l, 0.2 * l);
    double amp = rng.uniform(0.2, 1.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      node_coords(g, i, xy);
      double r2 = (xy[0] - c0) * (xy[0] - c0);
      if (g.dim() == 2) r2 += (xy[1] - c1) * (xy[1] - c1);
      u[i] += amp * std::exp(-r2 / (2.0 * width * width));
    }
  }
  return u;
}

Field signed_rough(const Grid& g, Rng& rng) {
  Field u(g);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.normal();
  return u;
}

}  // namespace

std::vector<Field> make_ensemble(const Grid& g, const EnsembleSpec& spec) {
  Rng rng(spec.seed);
  std::vector<Field> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    Field u;
    switch (spec.kind) {
      case EnsembleSpec::Kind::BandLimited: u = band_limited(g, rng); break;
      case EnsembleSpec::Kind::Bumps: u = bumps(g, rng); break;
      case EnsembleSpec::Kind::SignedRough: u = signed_rough(g, rng); break;
    }
    if (spec.zero_mean) {
      double mean = mass(u) / g.domain_volume();
      for (std::size_t j = 0; j < u.size(); ++j) u[j] -= mean;
    }
    out.push_back(std::move(u));
  }
  return out;
}

double sv_margin(const FracOperator& kernel_op, const Field& v, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("sv_margin needs q > 1");
  const std::size_t n = v.size();
  Field av = kernel_op.apply(v);
  Field z(v.grid());
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lhs += pow_signed(v[i], q - 1.0) * av[i];  // |v|^{q-2} v
    z[i] = std::pow(std::abs(v[i]), 0.5 * q);
  }
  lhs *= v.grid().cell_volume();
  double rhs = (4.0 * (q - 1.0) / (q * q)) * kernel_op.quad_form(z);
  return lhs - rhs;
}

double generalized_sv_margin(const FracOperator& kernel_op, const Field& v,
                             const std::function<double(double)>& psi,
                             const std::function<double(double)>& Psi) {
  const std::size_t n = v.size();
  Field av = kernel_op.apply(v);
  Field z(v.grid());
  double lhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lhs += psi(v[i]) * av[i];
    z[i] = Psi(v[i]);
  }
  lhs *= v.grid().cell_volume();
  return lhs - kernel_op.quad_form(z);
}

FunctionPair sign_approx_pair(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sign_approx_pair needs eps > 0");
  FunctionPair p;
  p.psi = [eps](double s) { return s <= 0.0 ? 0.0 : (s >= eps ? 1.0 : s / eps); };
  double sq = std::sqrt(eps);
  p.Psi = [eps, sq](double s) { return s <= 0.0 ? 0.0 : (s >= eps ? sq : s / sq); };
  return p;
}

NgnExponents ngn_exponents(int dim, double r, double p, double gamma) {
  if (!(p >= 1.0 && r > 1.0)) throw std::invalid_argument("ngn needs p >= 1, r > 1");
  if (!(gamma > 0.0 && gamma < std::min(static_cast<double>(dim), 2.0)))
    throw std::invalid_argument("ngn needs 0 < gamma < min(N, 2)");
  double n = dim;
  return NgnExponents{n * (r * p + r - p) / (r * (n - gamma)), p * (r - 1.0) / r};
}

double hls_conjugate(int dim, double r, double gamma) {
  if (!(r > 1.0)) throw std::invalid_argument("hls needs r > 1");
  double n = dim;
  if (!(n > gamma * r))
    throw std::invalid_argument("hls needs N > gamma r; got N = " +
                                std::to_string(dim));
  return n * r / (n - gamma * r);
}

double ngn_ratio(const Field& v, double p, double r, double gamma) {
  NgnExponents e = ngn_exponents(v.grid().dim(), r, p, gamma);
  Field av = apply_symbol(v, gamma);
  double denom = norm_lp(av, r) * std::pow(norm_lp(v, p), e.alpha);
  if (denom == 0.0) throw std::invalid_argument("ngn_ratio: zero denominator");
  return std::pow(norm_lp(v, e.r2), e.alpha + 1.0) / denom;
}

double hls_ratio(const Field& v, double r, double gamma) {
  double r1 = hls_conjugate(v.grid().dim(), r, gamma);
  Field av = apply_symbol(v, gamma);
  double denom = norm_lp(av, r);
  if (denom == 0.0) throw std::invalid_argument("hls_ratio: zero denominator");
  return norm_lp(v, r1) / denom;
}

Verdict check_energy_identity(const Trajectory& traj, double rel_tol) {
  Verdict v;
  v.name = "energy-identity";
  v.claim = "energy-identity";
  double mp1 = traj.params.m + 1.0;
  double rhs = std::pow(norm_lp(traj.initial(), mp1), mp1) / mp1;
  double lhs = traj.energy.back() +
               std::pow(norm_lp(traj.final_state(), mp1), mp1) / mp1;
  double scale = std::max(rhs, 1e-300);
  v.measured = std::abs(lhs - rhs) / scale;
  v.tolerance = rel_tol;
  v.pass = v.measured <= rel_tol;
  return v;
}

}  // namespace fpml

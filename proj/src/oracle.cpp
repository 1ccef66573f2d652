#include "slider/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "slider/errors.hpp"

namespace slider {

namespace {

constexpr double kPi = std::numbers::pi;

// sum over odd n >= N of 1 / n^3 is at most 1 / (4 (N - 1)^2) for N >= 3.
double odd_cubic_tail(std::size_t first_odd) {
  const double n = static_cast<double>(first_odd);
  return 1.0 / (4.0 * (n - 1.0) * (n - 1.0));
}

}  // namespace

FourierConstant flat_C_omega(const DomainRect& domain, std::size_t cutoff) {
  domain.validate();
  if (cutoff < 1) {
    throw Error(ErrorCode::InvalidArgument, "Fourier cutoff must be >= 1");
  }
  const double L1 = domain.length1();
  const double L2 = domain.length2();
  const double pi6 = std::pow(kPi, 6);
  const double scale = 64.0 * std::pow(L1 * L2, 3) / pi6;

  FourierConstant out;
  out.cutoff = cutoff;
  // Sum the smallest terms first.
  const std::size_t last_odd = cutoff % 2 == 1 ? cutoff : cutoff - 1;
  const auto last = static_cast<long>(last_odd);
  double sum = 0.0;
  for (long m = last; m >= 1; m -= 2) {
    const double md = static_cast<double>(m);
    for (long n = last; n >= 1; n -= 2) {
      const double nd = static_cast<double>(n);
      sum += 1.0 / (md * md * nd * nd * (md * md * L2 * L2 + nd * nd * L1 * L1));
    }
  }
  out.value = scale * sum;

  // Omitted terms have m > K or n > K. Using m^2 L2^2 + n^2 L1^2 >= 2 m n L1 L2,
  // each is at most scale / (2 L1 L2 m^3 n^3); the two strips share the corner.
  const double zeta_odd3 = 7.0 / 8.0 * 1.2020569031595942;  // sum over odd n of 1/n^3
  out.tail_bound = 2.0 * scale / (2.0 * L1 * L2) * zeta_odd3 * odd_cubic_tail(last_odd + 2);
  return out;
}

FlatModel make_flat_model(double C, double F, double eta0, double eta1) {
  if (!(C > 0.0) || !(F > 0.0) || !(eta0 > 0.0) || !std::isfinite(eta1)) {
    throw Error(ErrorCode::InvalidArgument, "flat model needs C > 0, F > 0, eta0 > 0 and finite eta1");
  }
  FlatModel m;
  m.C = C;
  m.F = F;
  m.eta0 = eta0;
  m.eta1 = eta1;
  if (eta1 > 0.0) {
    m.t0 = eta1 / F;
    m.eta_hat0 = eta0 + eta1 * eta1 / (2.0 * F);
    m.a = std::sqrt(C / (2.0 * F));
    m.b = C / (2.0 * m.eta_hat0 * m.eta_hat0 * F) - m.t0;
  } else {
    m.t0 = 0.0;
    m.eta_hat0 = eta0;
    m.a = std::sqrt(C / (2.0 * F));
    m.b = (C - 2.0 * eta0 * eta0 * eta1) / (2.0 * eta0 * eta0 * F);
  }
  return m;
}

double flat_lower_envelope(const FlatModel& m, double t) {
  if (m.eta1 > 0.0 && t <= m.t0) {
    return m.eta0 + m.eta1 * t - 0.5 * m.F * t * t;
  }
  return m.a / std::sqrt(t + m.b);
}

double flat_upper_envelope(const FlatModel& m) { return m.eta_hat0; }

Trajectory flat_reference_trajectory(const FlatModel& m, double t_end, double fine_tol) {
  if (!(t_end > 0.0) || !(fine_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "reference trajectory needs t_end > 0 and fine_tol > 0");
  }
  Trajectory traj;
  traj.F = m.F;
  traj.c1 = 0.0;

  auto push = [&](double t, double eta, double eta_dot) {
    const double G = m.C * std::max(-eta_dot, 0.0) / (eta * eta * eta) - m.F;
    const Energies e = energies(eta, eta_dot, 0.0, m.F);
    traj.samples.push_back({t, eta, eta_dot, G, G + m.F, e.E1, e.E2, 0});
  };

  double t_start = 0.0;
  if (m.eta1 > 0.0) {
    const double t_arc = std::min(m.t0, t_end);
    constexpr int arc_samples = 64;
    for (int k = 0; k < arc_samples; ++k) {
      const double t = t_arc * k / arc_samples;
      push(t, m.eta0 + m.eta1 * t - 0.5 * m.F * t * t, m.eta1 - m.F * t);
    }
    t_start = t_arc;
  }

  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  State y = t_start > 0.0
                ? State{m.eta0 + m.eta1 * t_start - 0.5 * m.F * t_start * t_start, m.eta1 - m.F * t_start}
                : State{m.eta0, m.eta1};
  if (t_start >= t_end) {
    push(t_start, y[0], y[1]);
  } else {
    auto rhs = [&](const State& s, State& dsdt, double) {
      dsdt[0] = s[1];
      dsdt[1] = m.C * std::max(-s[1], 0.0) / (s[0] * s[0] * s[0]) - m.F;
    };
    auto observer = [&](const State& s, double t) { push(t, s[0], s[1]); };
    auto stepper = odeint::make_controlled(fine_tol * 1e-3, fine_tol,
                                           odeint::runge_kutta_fehlberg78<State>());
    const double dt0 = std::min(1e-3, (t_end - t_start) * 1e-3);
    odeint::integrate_adaptive(stepper, rhs, y, t_start, t_end, dt0, observer);
  }
  traj.termination = Termination::ReachedHorizon;
  traj.termination_time = traj.samples.back().t;
  traj.termination_reason = "reached t_end";
  traj.monitor = monitor_energies(traj);
  return traj;
}

namespace {

double cubic_hermite(double y0, double d0, double y1, double d1, double h, double u) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * d1;
}

// Returns the sample interval [lo, hi] holding t and the local coordinate.
std::pair<std::size_t, double> locate(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  if (s.empty() || t < s.front().t || t > s.back().t) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("t = {} outside the sampled interval", t));
  }
  if (s.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double value, const TrajectorySample& x) { return value < x.t; });
  std::size_t hi = static_cast<std::size_t>(it - s.begin());
  hi = std::clamp<std::size_t>(hi, 1, s.size() - 1);
  const double h = s[hi].t - s[hi - 1].t;
  return {hi - 1, h > 0.0 ? (t - s[hi - 1].t) / h : 1.0};
}

}  // namespace

double interpolate_eta(const Trajectory& traj, double t) {
  const auto [k, u] = locate(traj, t);
  const auto& s = traj.samples;
  if (s.size() == 1) return s[0].eta;
  const double h = s[k + 1].t - s[k].t;
  return cubic_hermite(s[k].eta, s[k].eta_dot, s[k + 1].eta, s[k + 1].eta_dot, h, u);
}

double interpolate_eta_dot(const Trajectory& traj, double t) {
  const auto [k, u] = locate(traj, t);
  const auto& s = traj.samples;
  if (s.size() == 1) return s[0].eta_dot;
  const double h = s[k + 1].t - s[k].t;
  return cubic_hermite(s[k].eta_dot, s[k].G, s[k + 1].eta_dot, s[k + 1].G, h, u);
}

PressureField lcp_enumerate(const DiscreteSystem& system) {
  const std::size_t n = system.size();
  if (n > 16) {
    throw Error(ErrorCode::TooLarge, fmt::format("enumeration limited to 16 unknowns, got {}", n));
  }
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  for (std::size_t r = 0; r < n; ++r) {
    b(static_cast<Eigen::Index>(r)) = system.b[r];
    for (std::size_t c = 0; c < n; ++c) {
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = system.off_diagonal(r, c);
    }
  }
  const double scale = std::max({1.0, A.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  const double accept = 1e-12 * scale;

  std::vector<Eigen::Index> free_nodes;
  free_nodes.reserve(n);
  const std::uint32_t subsets = 1u << n;
  for (std::uint32_t free_set = 0; free_set < subsets; ++free_set) {
    free_nodes.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (free_set & (1u << k)) {
        free_nodes.push_back(static_cast<Eigen::Index>(k));
      }
    }
    const auto m = static_cast<Eigen::Index>(free_nodes.size());
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (m > 0) {
      Eigen::MatrixXd sub(m, m);
      Eigen::VectorXd rhs(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        rhs(r) = b(free_nodes[r]);
        for (Eigen::Index c = 0; c < m; ++c) {
          sub(r, c) = A(free_nodes[r], free_nodes[c]);
        }
      }
      const Eigen::LLT<Eigen::MatrixXd> llt(sub);
      if (llt.info() != Eigen::Success) {
        continue;
      }
      const Eigen::VectorXd x = llt.solve(rhs);
      if ((x.array() < -accept).any()) {
        continue;
      }
      for (Eigen::Index r = 0; r < m; ++r) {
        p(free_nodes[r]) = x(r);
      }
    }
    const Eigen::VectorXd w = A * p - b;
    if ((w.array() < -accept).any()) {
      continue;
    }
    PressureField out;
    out.values.assign(p.data(), p.data() + p.size());
    double comp = 0.0;
    double feas = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      comp = std::max(comp, std::abs(std::min(p(k), w(k))));
      feas = std::max({feas, -p(k), -w(k)});
    }
    out.residual_comp = comp;
    out.residual_lin = feas;
    out.iterations = free_set + 1;
    return out;
  }
  throw Error(ErrorCode::NoSolution, "no active set satisfies the complementarity conditions");
}

std::vector<unsigned char> node_mask(const Grid& grid, const NodeRange& range) {
  if (range.i0 > range.i1 || range.j0 > range.j1 || range.i1 >= grid.nx() || range.j1 >= grid.ny()) {
    throw Error(ErrorCode::OutOfDomain,
                fmt::format("node range [{}, {}] x [{}, {}] outside the {} x {} interior", range.i0, range.i1,
                            range.j0, range.j1, grid.nx(), grid.ny()));
  }
  std::vector<unsigned char> mask(grid.size(), 0);
  for (std::size_t j = range.j0; j <= range.j1; ++j) {
    for (std::size_t i = range.i0; i <= range.i1; ++i) {
      mask[grid.index(i, j)] = 1;
    }
  }
  return mask;
}

std::vector<unsigned char> node_mask(const Grid& grid, const ContactBox& box) {
  std::vector<unsigned char> mask(grid.size(), 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    mask[k] = box.contains(grid.node(k)) ? 1 : 0;
  }
  return mask;
}

ComparisonVerdict comparison_check(const Problem& problem, double beta, double gamma,
                                   const std::vector<unsigned char>& mask) {
  const Grid& grid = problem.grid;
  if (mask.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "mask size does not match the grid");
  }
  const DiscreteSystem system = assemble_system(grid, problem.shape, beta, gamma);
  // The stopping rule bounds the last update, not the error, so q is solved
  // 100x tighter than the slack allowed in the comparison.
  PsorOptions psor = problem.solver.psor;
  psor.tol = std::max(1e-15, 1e-2 * psor.tol);
  const PressureField q = solve_vi_psor(system, psor);
  const PressureField r =
      solve_linear(system, std::nullopt, 1e-13, 0, std::span<const unsigned char>(mask));

  ComparisonVerdict out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) {
      ++out.nodes;
      out.worst_margin = std::min(out.worst_margin, q.values[k] - r.values[k]);
    }
  }
  if (out.nodes == 0) {
    throw Error(ErrorCode::BoxUnresolved, "comparison sub-domain contains no grid node");
  }
  double q_max = 0.0;
  for (double v : q.values) {
    q_max = std::max(q_max, v);
  }
  out.pass = out.worst_margin >= -10.0 * problem.solver.psor.tol * std::max(1.0, q_max);
  return out;
}

}  // namespace slider

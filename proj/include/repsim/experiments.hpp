#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "repsim/compiler.hpp"
#include "repsim/linalg.hpp"
#include "repsim/observables.hpp"
#include "repsim/trajectory.hpp"
#include "repsim/version.hpp"

namespace repsim {

// ---------------------------------------------------------------------------
// shared plumbing

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Deterministic chunked parallel map: results are produced per index and
// merged in index order, so the outcome is independent of the thread count.
template <typename T>
std::vector<T> parallel_map(long n, int threads, const std::function<T(long)>& fn) {
  std::vector<T> out(static_cast<size_t>(n));
  if (threads <= 1 || n < 64) {
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fn(i);
    return out;
  }
  long chunk = (n + threads - 1) / threads;
  std::vector<std::future<void>> futs;
  for (int t = 0; t < threads; ++t) {
    long lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [&, lo, hi]() {
      for (long i = lo; i < hi; ++i) out[static_cast<size_t>(i)] = fn(i);
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

struct RunStamp {
  uint64_t seed = 0;
  uint64_t config_hash = 0;
  std::string header_comment(const std::string& extra = "") const {
    std::ostringstream os;
    os << "# repsim " << kVersion << " config_hash=" << config_hash << " seed=" << seed;
    if (!extra.empty()) os << " " << extra;
    os << "\n";
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// benchmark: X/CNOT layers, fidelity of returning to |00>

struct BenchmarkConfig {
  Variant variant = Variant::Bare;
  int depth = 1;
  double p = 1e-3;
  long shots = 100000;
  PostselectRule rule = PostselectRule::DiscardQ1Signature;
  int threads = 1;
};

struct BenchmarkResult {
  double fidelity = 0;
  double stderr_ = 0;
  long shots = 0;
};

// One benchmark layer as drawn: X(q1), CNOT(1->2), X(q2), CNOT(2->1),
// X(q1), CNOT(1->2). The composite is an involution fixing |00>, so the
// noiseless circuit returns |00> at every depth.
inline void append_benchmark_layer(LogicalCompiler& lc) {
  lc.x(0);
  lc.cnot(0, 1);
  lc.x(1);
  lc.cnot(1, 0);
  lc.x(0);
  lc.cnot(0, 1);
}

inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, uint64_t seed) {
  Circuit c;
  LogicalCompiler lc(c, 2, cfg.variant, cfg.rule, false);
  c.mark_body_begin();
  for (int layer = 0; layer < cfg.depth; ++layer) {
    append_benchmark_layer(lc);
    if (cfg.variant == Variant::EncodedEc) {
      lc.ec(0);
      lc.ec(1);
    }
  }

  long shots = cfg.p == 0 ? 1 : cfg.shots;  // noiseless trajectories are identical
  NoiseSpec noise(cfg.p);
  auto per_shot = parallel_map<double>(shots, cfg.threads, [&](long i) {
    TrajectoryRunner run(c, noise, mix_seed(seed, static_cast<uint64_t>(i)));
    auto st = run.run_all();
    if (!st.accepted) throw std::logic_error("benchmark circuits never postselect");
    return lc.decoded_distribution(run.state())[0];
  });

  double sum = 0, sum2 = 0;
  for (double f : per_shot) {
    sum += f;
    sum2 += f * f;
  }
  BenchmarkResult res;
  res.shots = shots;
  res.fidelity = sum / shots;
  double var = std::max(0.0, sum2 / shots - res.fidelity * res.fidelity);
  res.stderr_ = std::sqrt(var / shots);
  return res;
}

// ---------------------------------------------------------------------------
// transverse-field Ising dynamics

struct IsingConfig {
  Variant variant = Variant::Bare;
  int n_sites = 2;
  double h = 1.0;
  double delta = 0.1;
  int n_steps = 50;
  long shots = 10000;
  double p = 1e-3;
  PostselectRule rule = PostselectRule::DiscardQ1Signature;
  int threads = 1;
};

struct IsingPoint {
  int step = 0;
  double t = 0;
  double m = 0;
  double m_stderr = 0;
  double discard_rate = 0;
  long alive = 0;
};

struct IsingResult {
  std::vector<IsingPoint> points;  // one per Trotter step
  long raw_shots = 0;
};

// One first-order Trotter step as drawn: ZZ block on the pair, Rx on qubit 1,
// ZZ block again (the periodic N=2 chain has the bond twice), Rx on qubit 2.
inline void append_trotter_step(LogicalCompiler& lc, double delta, double h) {
  lc.cnot(0, 1);
  lc.rz(1, 2 * delta);
  lc.cnot(0, 1);
  lc.rx(0, 2 * h * delta);
  lc.cnot(1, 0);
  lc.rz(0, 2 * delta);
  lc.cnot(1, 0);
  lc.rx(1, 2 * h * delta);
}

inline IsingResult run_ising(const IsingConfig& cfg, uint64_t seed) {
  if (cfg.n_sites != 2) throw std::invalid_argument("encoded Ising supports 2 sites");
  Circuit c;
  LogicalCompiler lc(c, 2, cfg.variant, cfg.rule, cfg.variant == Variant::EncodedEc);
  c.mark_body_begin();
  std::vector<size_t> step_end;
  for (int s = 0; s < cfg.n_steps; ++s) {
    append_trotter_step(lc, cfg.delta, cfg.h);
    step_end.push_back(c.size());
  }

  struct Track {
    std::vector<double> m;  // magnetization while alive
    int died_at = -1;       // step index of the discard, -1 if completed
  };

  long shots = cfg.p == 0 ? 1 : cfg.shots;
  NoiseSpec noise(cfg.p);
  auto tracks = parallel_map<Track>(shots, cfg.threads, [&](long i) {
    Track tr;
    TrajectoryRunner run(c, noise, mix_seed(seed, static_cast<uint64_t>(i)));
    size_t from = 0;
    for (int s = 0; s < cfg.n_steps; ++s) {
      auto st = run.run_range(from, step_end[s]);
      from = step_end[s];
      if (!st.accepted) {
        tr.died_at = s;
        break;
      }
      tr.m.push_back(lc.decoded_magnetization(run.state()));
    }
    return tr;
  });

  IsingResult res;
  res.raw_shots = shots;
  for (int s = 0; s < cfg.n_steps; ++s) {
    IsingPoint pt;
    pt.step = s + 1;
    pt.t = (s + 1) * cfg.delta;
    double sum = 0, sum2 = 0;
    long alive = 0, dead = 0;
    for (const auto& tr : tracks) {
      if (tr.died_at >= 0 && tr.died_at <= s) {
        ++dead;
        continue;
      }
      ++alive;
      double v = tr.m[static_cast<size_t>(s)];
      sum += v;
      sum2 += v * v;
    }
    pt.alive = alive;
    pt.discard_rate = static_cast<double>(dead) / shots;
    if (alive > 0) {
      pt.m = sum / alive;
      double var = std::max(0.0, sum2 / alive - pt.m * pt.m);
      pt.m_stderr = std::sqrt(var / alive);
    }
    res.points.push_back(pt);
  }
  return res;
}

// Dense 4x4 oracle for the N=2 Trotterized evolution.
inline std::vector<double> trotter_oracle_magnetization(double h, double delta, int n_steps) {
  Matrix zz = pauli_matrix(PauliString::parse("Z0Z1"), 2);
  Matrix x0 = pauli_matrix(PauliString::x(0), 2);
  Matrix x1 = pauli_matrix(PauliString::x(1), 2);
  Matrix uzz = hermitian_propagator(zz, delta);
  Matrix ux0 = hermitian_propagator(x0, h * delta);
  Matrix ux1 = hermitian_propagator(x1, h * delta);
  Matrix step = ux1 * uzz * ux0 * uzz;

  Matrix m_op = pauli_matrix(PauliString::z(0), 2);
  m_op.add_scaled(pauli_matrix(PauliString::z(1), 2), 1.0);

  std::vector<cplx> psi = {1, 0, 0, 0};
  std::vector<double> series;
  for (int s = 0; s < n_steps; ++s) {
    psi = step.apply(psi);
    auto mp = m_op.apply(psi);
    cplx acc{0, 0};
    for (size_t i = 0; i < 4; ++i) acc += std::conj(psi[i]) * mp[i];
    series.push_back(acc.real());
  }
  return series;
}

// Exact evolution magnetization under H = 2 Z0Z1 + h(X0 + X1).
inline std::vector<double> exact_evolution_magnetization(double h, double delta, int n_steps) {
  Matrix ham = pauli_matrix(PauliString::parse("Z0Z1"), 2);
  Matrix tmp = ham;
  ham.add_scaled(tmp, 1.0);  // the N=2 periodic chain counts the bond twice
  ham.add_scaled(pauli_matrix(PauliString::x(0), 2), h);
  ham.add_scaled(pauli_matrix(PauliString::x(1), 2), h);
  Matrix m_op = pauli_matrix(PauliString::z(0), 2);
  m_op.add_scaled(pauli_matrix(PauliString::z(1), 2), 1.0);

  std::vector<double> series;
  for (int s = 1; s <= n_steps; ++s) {
    Matrix u = hermitian_propagator(ham, s * delta);
    std::vector<cplx> psi = {1, 0, 0, 0};
    psi = u.apply(psi);
    auto mp = m_op.apply(psi);
    cplx acc{0, 0};
    for (size_t i = 0; i < 4; ++i) acc += std::conj(psi[i]) * mp[i];
    series.push_back(acc.real());
  }
  return series;
}

// E = (1/N) sum |M_ideal - M_noisy| over the first n_trot steps.
inline double integrated_error(const std::vector<double>& ideal, const std::vector<double>& noisy,
                               int n_trot) {
  if (static_cast<int>(ideal.size()) < n_trot || static_cast<int>(noisy.size()) < n_trot)
    throw std::invalid_argument("series shorter than n_trot");
  double e = 0;
  for (int i = 0; i < n_trot; ++i) e += std::abs(ideal[i] - noisy[i]);
  return e / n_trot;
}

struct FitResult {
  double a = 0;
  double residual = 0;
};

// Least-squares fit of 1 - exp(-a t) to a discard-rate series.
inline FitResult discard_rate_fit(const std::vector<std::pair<double, double>>& series) {
  if (series.empty()) throw std::invalid_argument("empty series");
  bool all_zero = true;
  for (const auto& [t, d] : series) {
    if (d < 0 || d > 1) throw std::invalid_argument("discard fraction out of [0,1]");
    if (d != 0) all_zero = false;
  }
  if (all_zero) throw std::invalid_argument("degenerate series (all zeros)");

  auto sse = [&](double a) {
    double s = 0;
    for (const auto& [t, d] : series) {
      double r = d - (1.0 - std::exp(-a * t));
      s += r * r;
    }
    return s;
  };
  double best_a = 0, best = sse(0);
  for (double a = 0.001; a <= 20.0; a *= 1.02) {
    double v = sse(a);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  // golden-section refinement around the best grid point
  double lo = best_a / 1.05, hi = best_a * 1.05;
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (sse(m1) < sse(m2)) hi = m2; else lo = m1;
  }
  FitResult fr;
  fr.a = 0.5 * (lo + hi);
  fr.residual = sse(fr.a);
  return fr;
}

// ---------------------------------------------------------------------------
// VQE on the caffeine Hamiltonian

struct VqeConfig {
  Variant variant = Variant::Bare;
  double p = 1e-3;
  double epsilon = 0.0;
  long shots_per_group = 100000;
  long trajectories_per_group = 2000;  // noise realizations; shots are
                                       // stratified uniformly across them
  PostselectRule rule = PostselectRule::DiscardQ1Signature;
  int threads = 1;
  std::array<double, 4> theta = {0, 0, 0, 0};
};

struct VqeResult {
  double energy = 0;
  double stderr_ = 0;
  long accepted_shots = 0;
  long raw_shots = 0;
};

inline void append_vqe_ansatz(LogicalCompiler& lc, const std::array<double, 4>& th) {
  lc.ry(0, th[0]);
  lc.ry(1, th[1]);
  lc.cz(0, 1);
  lc.ry(0, th[2]);
  lc.ry(1, th[3]);
}

// Exact noiseless ansatz energy (statevector, no sampling).
inline double vqe_exact_energy(const ObservableSpec& ham, const std::array<double, 4>& th) {
  StateVector s(2);
  s.apply_gate(Gate::ry(0, th[0]));
  s.apply_gate(Gate::ry(1, th[1]));
  s.apply_cz(0, 1);
  s.apply_gate(Gate::ry(0, th[2]));
  s.apply_gate(Gate::ry(1, th[3]));
  double e = ham.identity_coeff;
  for (const auto& t : ham.terms) e += t.coeff * s.expectation_pauli(t.op);
  return e;
}

// Sampled energy estimate. Each measurement group runs its own circuit
// (ansatz plus basis rotations); accepted trajectories are accumulated until
// trajectories_per_group is reached and the group's shot budget is split
// evenly across them, with multinomial sampling of decoded outcomes within
// each trajectory. Discarded trajectories count toward raw_shots only.
inline VqeResult vqe_energy(const ObservableSpec& ham, const VqeConfig& cfg, uint64_t seed) {
  VqeResult res;
  double energy = ham.identity_coeff;
  double var_total = 0;
  NoiseSpec noise(cfg.p, cfg.epsilon);

  for (size_t g = 0; g < ham.groups.size(); ++g) {
    const auto& group = ham.groups[g];
    Circuit c;
    LogicalCompiler lc(c, 2, cfg.variant, cfg.rule, cfg.variant == Variant::EncodedEc);
    c.mark_body_begin();
    append_vqe_ansatz(lc, cfg.theta);
    for (int q = 0; q < 2; ++q) lc.basis_rotation(q, group.basis[q]);

    long n_traj = cfg.p == 0 ? 1 : cfg.trajectories_per_group;
    long shots_per_traj = std::max<long>(1, cfg.shots_per_group / n_traj);
    long group_shots = shots_per_traj * n_traj;

    struct TrajOut {
      std::array<double, 4> dist;
      long raw = 0;
    };
    auto outs = parallel_map<TrajOut>(n_traj, cfg.threads, [&](long i) {
      TrajOut to;
      // redraw until an accepted trajectory is found
      for (long attempt = 0;; ++attempt) {
        uint64_t s = mix_seed(seed + 1000003 * (g + 1), static_cast<uint64_t>(i * 131 + attempt));
        TrajectoryRunner run(c, noise, s);
        auto st = run.run_all();
        ++to.raw;
        if (st.accepted) {
          auto d = lc.decoded_distribution(run.state());
          for (int o = 0; o < 4; ++o) to.dist[o] = d[o];
          return to;
        }
        if (attempt > 10000) throw std::runtime_error("acceptance rate too low");
      }
    });

    // stratified multinomial sampling of decoded outcomes
    std::array<long, 4> counts = {0, 0, 0, 0};
    std::mt19937_64 rng(mix_seed(seed ^ 0xabcdef, g));
    for (const auto& to : outs) {
      res.raw_shots += to.raw * shots_per_traj;
      double rest = 1.0;
      long left = shots_per_traj;
      for (int o = 0; o < 3 && left > 0; ++o) {
        double pr = rest > 0 ? std::clamp(to.dist[o] / rest, 0.0, 1.0) : 0.0;
        long k = std::binomial_distribution<long>(left, pr)(rng);
        counts[o] += k;
        left -= k;
        rest -= to.dist[o];
      }
      counts[3] += left;
    }
    res.accepted_shots += group_shots;

    // group energy contribution and its sampling variance
    double mean = 0, mean2 = 0;
    for (int o = 0; o < 4; ++o) {
      double val = 0;
      std::vector<int> bits = {o & 1, (o >> 1) & 1};
      for (int ti : group.term_indices) val += ham.terms[ti].coeff * term_sign(ham.terms[ti].op, bits);
      double w = static_cast<double>(counts[o]) / group_shots;
      mean += w * val;
      mean2 += w * val * val;
    }
    energy += mean;
    var_total += std::max(0.0, mean2 - mean * mean) / group_shots;
  }
  res.energy = energy;
  res.stderr_ = std::sqrt(var_total);
  return res;
}

// Derivative-free Nelder-Mead minimization of the noiseless exact energy.
struct OptimizeResult {
  std::array<double, 4> theta;
  double energy = 0;
  int evals = 0;
};

inline OptimizeResult optimize_ansatz(const ObservableSpec& ham,
                                      const std::array<double, 4>& init, double tol = 1e-12,
                                      int max_evals = 20000) {
  auto f = [&](const std::array<double, 4>& th) { return vqe_exact_energy(ham, th); };
  const int n = 4;
  std::vector<std::array<double, 4>> simplex(n + 1, init);
  for (int i = 0; i < n; ++i) simplex[i + 1][i] += 0.35;
  std::vector<double> fv(n + 1);
  int evals = 0;
  for (int i = 0; i <= n; ++i) fv[i] = (++evals, f(simplex[i]));

  auto order = [&]() {
    std::vector<int> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::vector<std::array<double, 4>> s2;
    std::vector<double> f2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = s2;
    fv = f2;
  };

  while (evals < max_evals) {
    order();
    if (std::abs(fv[n] - fv[0]) < tol) break;
    std::array<double, 4> centroid = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 4; ++k) centroid[k] += simplex[i][k] / n;
    auto point = [&](double coef) {
      std::array<double, 4> p;
      for (int k = 0; k < 4; ++k) p[k] = centroid[k] + coef * (simplex[n][k] - centroid[k]);
      return p;
    };
    auto xr = point(-1.0);
    double fr = (++evals, f(xr));
    if (fr < fv[0]) {
      auto xe = point(-2.0);
      double fe = (++evals, f(xe));
      if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
      else { simplex[n] = xr; fv[n] = fr; }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      auto xc = point(0.5);
      double fc = (++evals, f(xc));
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int k = 0; k < 4; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
          fv[i] = (++evals, f(simplex[i]));
        }
      }
    }
  }
  order();
  return {simplex[0], fv[0], evals};
}

inline OptimizeResult optimize_ansatz_multistart(const ObservableSpec& ham, int starts = 5,
                                                 uint64_t seed = 1234) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  OptimizeResult best;
  best.energy = 1e300;
  for (int s = 0; s < starts; ++s) {
    std::array<double, 4> init;
    for (auto& v : init) v = s == 0 ? 0.0 : u(rng);
    auto r = optimize_ansatz(ham, init);
    if (r.energy < best.energy) best = r;
  }
  return best;
}

}  // namespace repsim

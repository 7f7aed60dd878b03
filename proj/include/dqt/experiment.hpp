#ifndef DQT_EXPERIMENT_HPP
#define DQT_EXPERIMENT_HPP

// File-driven experiments behind the `dqtime` CLI. Each experiment takes a
// JSON parameter object, validates every key before computing, and writes
// deterministic CSV/JSON artifacts into an output directory.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dqt/acceptance.hpp"
#include "dqt/classical.hpp"
#include "dqt/cutoff.hpp"
#include "dqt/serialize.hpp"
#include "dqt/steady_state.hpp"
#include "dqt/transfer.hpp"

namespace dqt::experiment {

using nlohmann::json;

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Formatting.
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form, independent of the global locale.
inline std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("table row width differs from header");
    rows.push_back(std::move(row));
  }
  void add(const std::vector<double>& row) {
    std::vector<std::string> s;
    for (double v : row) s.push_back(fmt(v));
    add(std::move(s));
  }

  std::string csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Parameters.
// ---------------------------------------------------------------------------

/// Typed access to a parameter object; keys not read by the experiment are
/// rejected by finish().
class Params {
 public:
  explicit Params(json j) : j_(j.is_null() ? json::object() : std::move(j)) {
    if (!j_.is_object()) throw config_error("parameters must be a JSON object");
  }

  double real(const std::string& key, double def) { return get<double>(key, def); }

  double positive(const std::string& key, double def) {
    const double v = real(key, def);
    if (!(v > 0)) throw config_error("parameter '" + key + "' must be positive");
    return v;
  }

  std::size_t count(const std::string& key, std::size_t def, std::size_t min = 0) {
    const auto v = get<long long>(key, static_cast<long long>(def));
    if (v < static_cast<long long>(min)) throw config_error("parameter '" + key + "' must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& def) { return get<std::string>(key, def); }

  /// A grid given as "lo:hi:step" or as an explicit array.
  std::vector<double> grid(const std::string& key, const std::string& def) {
    used_.insert(key);
    if (j_.contains(key) && j_[key].is_array()) {
      try {
        return j_[key].get<std::vector<double>>();
      } catch (const json::exception&) {
        throw config_error("parameter '" + key + "' must be a numeric array");
      }
    }
    const std::string s = j_.contains(key) ? j_[key].get<std::string>() : def;
    return parse_grid(s, key);
  }

  std::vector<std::size_t> counts(const std::string& key, const std::vector<std::size_t>& def, std::size_t min = 0) {
    used_.insert(key);
    std::vector<std::size_t> out = def;
    if (j_.contains(key)) {
      out.clear();
      std::vector<double> raw;
      if (j_[key].is_string())
        raw = parse_list(j_[key].get<std::string>(), key);
      else
        try {
          raw = j_[key].get<std::vector<double>>();
        } catch (const json::exception&) {
          throw config_error("parameter '" + key + "' must be a list of integers");
        }
      for (double v : raw) {
        if (v != std::floor(v) || v < static_cast<double>(min))
          throw config_error("parameter '" + key + "' entries must be integers >= " + std::to_string(min));
        out.push_back(static_cast<std::size_t>(v));
      }
    }
    return out;
  }

  std::vector<double> reals(const std::string& key, const std::vector<double>& def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    if (j_[key].is_string()) return parse_list(j_[key].get<std::string>(), key);
    try {
      return j_[key].get<std::vector<double>>();
    } catch (const json::exception&) {
      throw config_error("parameter '" + key + "' must be a list of numbers");
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw config_error("unknown parameter '" + k + "'");
  }

 private:
  template <class T>
  T get(const std::string& key, T def) {
    used_.insert(key);
    if (!j_.contains(key)) return def;
    try {
      if constexpr (std::is_arithmetic_v<T>) {
        if (j_[key].is_string()) return parse_number<T>(j_[key].get<std::string>(), key);
      }
      return j_[key].get<T>();
    } catch (const json::exception&) {
      throw config_error("parameter '" + key + "' has the wrong type");
    }
  }

  template <class T>
  static T parse_number(const std::string& s, const std::string& key) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw config_error("parameter '" + key + "' is not a number: " + s);
    return v;
  }

  static std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(item, key));
    if (out.empty()) throw config_error("parameter '" + key + "' is empty");
    return out;
  }

  static std::vector<double> parse_grid(const std::string& s, const std::string& key) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw config_error("grid '" + key + "' must look like lo:hi:step");
    try {
      return linear_grid(parse_number<double>(parts[0], key), parse_number<double>(parts[1], key),
                         parse_number<double>(parts[2], key));
    } catch (const std::invalid_argument& e) {
      throw config_error("grid '" + key + "': " + e.what());
    }
  }

  json j_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Running.
// ---------------------------------------------------------------------------

struct Context {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

struct Outcome {
  json summary = json::object();
  std::vector<std::string> files;
  bool ok = true;  // false if an oracle comparison inside the experiment failed
};

namespace detail {

inline void write_file(const Context& ctx, Outcome& out, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  const auto path = ctx.out_dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + path.string());
  out.files.push_back(path.string());
}

/// f(i) for i in [0, n) on up to `threads` workers; results keep index order.
template <class F>
auto parallel_map(std::size_t n, unsigned threads, F f) -> std::vector<decltype(f(std::size_t{}))> {
  std::vector<decltype(f(std::size_t{}))> out(n);
  const unsigned w = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> err(w);
  for (unsigned k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) out[i] = f(i);
      } catch (...) {
        err[k] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace detail

/// Initializer: classical-chain central population over a time grid and the
/// closed-form overlap per excitation count.
inline Outcome initializer(Params p, const Context& ctx) {
  const auto M = p.count("M", 100, 1);
  const double omega = p.positive("omega", 1.0), Gamma = p.positive("Gamma", 1.0);
  const auto ts = p.grid("t-grid", "0:10:0.5");
  const double delta = p.real("delta", 0.5), c = p.real("c", 0.5);
  const auto kmax = p.count("k-max", 20);
  p.finish();
  const InitializerConfig cfg{M, omega, Gamma};
  cfg.validate();
  const auto m_c = static_cast<std::size_t>(std::llround(c * static_cast<double>(M)));
  std::vector<double> q(M, 0.0);
  for (std::size_t j = 0; j < std::min(m_c, M); ++j) q[j] = delta;
  const auto gen = initializer_generator(M, omega, Gamma);
  auto s0 = product_input(q);
  Table t{{"t", "central_one", "overlap_phi10", "certificate_bound", "mu"}, {}};
  for (double time : ts) {
    if (time < 0) throw config_error("t-grid must be non-negative");
    const auto s = evolve_classical(gen, s0, time);
    const auto cert = theorem1_certificate(cfg, delta, c, time);
    t.add(std::vector<double>{time, s.central(1), s(1, 0), cert.bound, cert.mu});
  }
  Table k{{"k", "t", "overlap"}, {}};
  for (std::size_t kk = 0; kk <= kmax; ++kk)
    for (double time : ts) k.add(std::vector<double>{static_cast<double>(kk), time, overlap_formula(kk, time, omega, Gamma)});
  Outcome out;
  detail::write_file(ctx, out, "initializer.csv", t.csv());
  detail::write_file(ctx, out, "initializer_overlap.csv", k.csv());
  out.summary = {{"M", M}, {"mu", theorem1_certificate(cfg, delta, c, 0).mu}};
  return out;
}

/// Timer: deviation profile on an x grid for one N.
inline Outcome timer(Params p, const Context& ctx) {
  const auto N = p.count("N", 256, 2);
  const double gamma = p.positive("gamma", 1.0);
  const auto xs = p.grid("x-grid", "-3:3:0.25");
  p.finish();
  const auto prof = cutoff_profile(N, gamma, xs);
  Table t{{"x", "deviation", "one_minus_Phi", "remainder"}, {}};
  for (const auto& s : prof.samples) t.add(std::vector<double>{s.x, s.deviation, s.gaussian, s.remainder});
  Outcome out;
  detail::write_file(ctx, out, "timer.csv", t.csv());
  out.summary = {{"N", N}, {"sup_remainder", prof.sup_remainder}, {"sqrtN_sup_remainder", prof.scaled_remainder}};
  return out;
}

/// Cutoff profiles for several N and the N -> 4N remainder ratios.
inline Outcome cutoff_profile_experiment(Params p, const Context& ctx) {
  const auto Ns = p.counts("N-list", {64, 256, 1024}, 2);
  const double gamma = p.positive("gamma", 1.0);
  const auto xs = p.grid("x-grid", "-3:3:0.01");
  p.finish();
  const auto profs = detail::parallel_map(Ns.size(), ctx.threads, [&](std::size_t i) { return cutoff_profile(Ns[i], gamma, xs); });
  Table t{{"N", "x", "t", "deviation", "one_minus_Phi", "remainder"}, {}};
  json sups = json::array();
  for (const auto& pr : profs) {
    for (const auto& s : pr.samples)
      t.add(std::vector<double>{static_cast<double>(pr.N), s.x, s.t, s.deviation, s.gaussian, s.remainder});
    sups.push_back({{"N", pr.N}, {"sup_remainder", pr.sup_remainder}, {"sqrtN_sup_remainder", pr.scaled_remainder}});
  }
  Outcome out;
  detail::write_file(ctx, out, "cutoff_profile.csv", t.csv());
  out.summary = {{"profiles", sups}};
  return out;
}

inline Outcome sharp_threshold_experiment(Params p, const Context& ctx) {
  const auto cs = p.reals("c-list", {0.5, 0.8, 0.9, 1.0, 1.1, 1.25, 2.0});
  const auto Ns = p.counts("N-list", {64, 256, 1024, 4096}, 2);
  const double gamma = p.positive("gamma", 1.0);
  p.finish();
  for (double c : cs)
    if (!(c > 0)) throw config_error("c-list entries must be positive");
  Table t{{"c", "N", "occupation"}, {}};
  for (double c : cs)
    for (auto N : Ns) t.add(std::vector<double>{c, static_cast<double>(N), sharp_threshold(c, N, gamma)});
  Outcome out;
  detail::write_file(ctx, out, "sharp_threshold.csv", t.csv());
  return out;
}

inline Outcome concat_error(Params p, const Context& ctx) {
  const auto L = p.count("L", 10, 1);
  const auto Ns = p.counts("N-list", {100, 400, 1600}, 2);
  const double gamma = p.positive("gamma", 1.0);
  const auto total_N = p.count("total-N", 10000, 2);
  p.finish();
  Table t{{"N", "l", "early", "late", "alpha", "beta", "early_degree", "late_degree"}, {}};
  bool certified = true;
  for (auto N : Ns)
    for (std::size_t l = 1; l <= L; ++l) {
      const auto e = concatenation_error(l, N, gamma);
      certified = certified && e.early_degree >= 0 && e.late_degree >= 0;
      t.add(std::vector<double>{static_cast<double>(N), static_cast<double>(l), e.early, e.late, e.alpha, e.beta,
                                static_cast<double>(e.early_degree), static_cast<double>(e.late_degree)});
    }
  Outcome out;
  detail::write_file(ctx, out, "concat_error.csv", t.csv());
  out.summary = {{"certified", certified}, {"total_mistrigger", total_mistrigger({L, total_N, gamma})}, {"L", L}, {"N", total_N}};
  return out;
}

inline Outcome trunc_normal(Params p, const Context& ctx) {
  const auto alphas = p.reals("alpha-list", {0.25, 0.5, 0.75});
  const auto betas = p.reals("beta-list", {0.1, 0.5});
  const auto Ns = p.counts("N-list", {50, 100, 200}, 1);
  const double omega = p.positive("omega", 1.0), Gamma = p.positive("Gamma", std::expm1(16.0));
  p.finish();
  Table t{{"alpha", "beta", "N", "log_numeric", "log_bound", "z1", "z2", "regime"}, {}};
  bool ok = true;
  for (double a : alphas)
    for (double b : betas)
      for (auto N : Ns) {
        const auto r = truncated_normal_overlap(N, a, b, omega, Gamma);
        ok = ok && r.log_numeric <= r.log_bound;
        t.add({fmt(a), fmt(b), std::to_string(N), fmt(r.log_numeric), fmt(r.log_bound), fmt(r.z1), fmt(r.z2), r.regime});
      }
  Outcome out;
  detail::write_file(ctx, out, "trunc_normal.csv", t.csv());
  out.summary = {{"numeric_below_bound", ok}};
  out.ok = ok;
  return out;
}

inline Outcome imperfect_init(Params p, const Context& ctx) {
  const auto N = p.count("N", 8, 2);
  const auto eps = p.reals("eps-list", {1e-2, 1e-3, 1e-4});
  const double tg = p.real("t-gamma", 8.0), gamma = p.positive("gamma", 1.0);
  p.finish();
  if (N > 16) throw config_error("imperfect-init enumerates 2^N states; N must be <= 16");
  if (tg < 0) throw config_error("t-gamma must be non-negative");
  Table t{{"eps", "baseline", "perturbed", "shift", "first_order_N_eps", "derivative", "residual", "bound"}, {}};
  bool ok = true;
  const double n = static_cast<double>(N);
  for (double e : eps) {
    const auto s = imperfect_init_shift(N, e, tg / gamma, gamma);
    const double bound = n * e + 10 * e * e * n * n;
    ok = ok && std::abs(s.shift) <= bound;
    t.add(std::vector<double>{e, s.baseline, s.perturbed, s.shift, s.first_order, s.derivative, s.residual, bound});
  }
  Outcome out;
  detail::write_file(ctx, out, "imperfect_init.csv", t.csv());
  out.summary = {{"shift_within_bound", ok}};
  out.ok = ok;
  return out;
}

/// State transfer runs. "input" gives Bloch angles "theta,phi"; otherwise
/// `seeds` random Haar inputs starting at the context seed.
inline Outcome transfer(Params p, const Context& ctx) {
  const auto n = p.count("n", 3, 3);
  const double omega = p.positive("omega", 1.0);
  const auto input = p.reals("input", {});
  const auto seeds = p.count("seeds", 1, 1);
  const double eq_tol = p.positive("eq-tol", 1e-9);
  const auto layout = p.text("layout", n == 3 ? "three-qubit" : "compressed");
  p.finish();
  if (n % 2 == 0) throw config_error("n must be odd");
  if (!input.empty() && input.size() != 2) throw config_error("input must be 'theta,phi'");
  if (layout != "three-qubit" && layout != "chain" && layout != "compressed") throw config_error("unknown layout '" + layout + "'");
  if (layout == "three-qubit" && n != 3) throw config_error("layout three-qubit requires n = 3");

  const std::size_t runs = input.empty() ? seeds : 1;
  StageOptions opt;
  opt.eq_tol = eq_tol;
  auto one = [&](std::size_t i) {
    Vector phi;
    if (input.empty()) {
      std::mt19937_64 rng(ctx.seed + i);
      phi = acceptance::detail::random_qubit(rng);
    } else {
      phi = bloch_state(input[0], input[1]);
    }
    json rep;
    TransferRun run = layout == "three-qubit" ? run_transfer_3qubit(phi, omega, opt)
                      : layout == "chain"     ? run_transfer(build_transfer_nqubit(n, omega), phi, opt)
                                              : run_transfer(build_transfer_compressed(n, omega), phi, opt);
    if (layout == "three-qubit") {
      // Registry populations after stage A: the four measurement branches.
      const auto t3 = build_transfer_3qubit(omega);
      Vector psi = kron(prepare_cluster(phi, 3), qubit::basis_vector(2, 0));
      const auto afterA = run_sequential({t3.A}, DensityMatrix::pure(t3.reg, psi), opt).rho;
      const auto reg = partial_trace(afterA, {"r4", "r5"});
      rep["branch_populations"] = {reg.population(0), reg.population(1), reg.population(2), reg.population(3)};
    }
    rep["seed"] = input.empty() ? json(ctx.seed + i) : json(nullptr);
    rep["phi_in"] = {{phi(0).real(), phi(0).imag()}, {phi(1).real(), phi(1).imag()}};
    rep["stages"] = run.stage_names;
    rep["stage_times"] = run.stage_times;
    rep["fidelity"] = run.fidelity;
    return rep;
  };
  const auto reps = detail::parallel_map(runs, ctx.threads, one);
  double mn = 1, mean = 0;
  for (const auto& r : reps) {
    mn = std::min(mn, r["fidelity"].get<double>());
    mean += r["fidelity"].get<double>() / static_cast<double>(reps.size());
  }
  Outcome out;
  json doc = {{"n", n}, {"layout", layout}, {"omega", omega}, {"eq_tol", eq_tol}, {"runs", reps},
              {"min_fidelity", mn}, {"mean_fidelity", mean}};
  detail::write_file(ctx, out, "transfer.json", doc.dump(2) + "\n");
  out.summary = {{"min_fidelity", mn}, {"mean_fidelity", mean}, {"runs", reps.size()}};
  return out;
}

// ---------------------------------------------------------------------------
// Oracle suite: every quantum-vs-reduced comparison that fits max-qubits.
// ---------------------------------------------------------------------------

struct OracleCheck {
  std::string name;
  std::size_t qubits;
  std::function<std::pair<double, double>()> run;  // (error, limit)
};

inline std::vector<OracleCheck> oracle_checks(std::size_t max_qubits) {
  std::vector<OracleCheck> out;
  for (std::size_t M = 1; M + 1 <= max_qubits && M <= 4; ++M)
    out.push_back({"symmetrized initializer vs classical chain, M=" + std::to_string(M), M + 1, [M] {
                     const auto L = build_initializer({M, 1.0, 2.0});
                     const auto gen = initializer_generator(M, 1.0, 2.0);
                     const auto rho0 = DensityMatrix::maximally_mixed(initializer_register(M));
                     double worst = 0;
                     for (double t : {0.1, 1.0, 10.0})
                       worst = std::max(worst, total_variation(symmetrize(evolve(L, rho0, t)).p,
                                                               evolve_classical(gen, symmetrize(rho0), t).p));
                     return std::pair{worst, 1e-8};
                   }});
  for (std::size_t k = 1; k + 1 <= max_qubits && k <= 3; ++k)
    out.push_back({"overlap formula vs dense evolution, k=" + std::to_string(k), k + 1, [k] {
                     const auto L = build_initializer({k, 1.0, 2.0});
                     std::vector<int> bits(k + 1, 1);
                     const auto rho0 = DensityMatrix::basis(initializer_register(k), bits);
                     double worst = 0;
                     for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                       const double f = overlap_formula(k, t, 1.0, 2.0);
                       worst = std::max(worst, std::abs(evolve(L, rho0, t).population(std::size_t{1} << k) - f) / f);
                     }
                     return std::pair{worst, 1e-8};
                   }});
  for (std::size_t N = 2; N <= max_qubits && N <= 6; ++N)
    out.push_back({"timer occupation vs quantum evolution, N=" + std::to_string(N), N, [N] {
                     const auto L = build_timer({N, 1.0});
                     const std::vector<std::string> keep{"t" + std::to_string(N)};
                     double worst = 0;
                     for (double t : {0.5, 1.0, 2.0, 4.0})
                       worst = std::max(worst, std::abs(partial_trace(evolve(L, timer_initial_state(N), t), keep).population(0) -
                                                        timer_occupation(N, t, 1.0)));
                     return std::pair{worst, 1e-10};
                   }});
  if (max_qubits >= 4)
    out.push_back({"timer distribution vs quantum diagonal, N=4", 4, [] {
                     const auto rho = evolve(build_timer({4, 1.0}), timer_initial_state(4), 1.7);
                     const auto w = timer_distribution(4, 1.7, 1.0);
                     // phi_k has the first k+1 bits zero: index 2^{N-1-k} - 1.
                     double worst = 0;
                     for (std::size_t k = 0; k + 1 < 4; ++k)
                       worst = std::max(worst, std::abs(rho.population((std::size_t{1} << (3 - k)) - 1) - w[k]));
                     worst = std::max(worst, std::abs(rho.population(0) - w[3]));
                     return std::pair{worst, 1e-10};
                   }});
  if (max_qubits >= 3)
    out.push_back({"timer-conditioned damping suppressed before 1/gamma", 3, [] {
                     QubitRegister reg({"p"});
                     Liouvillian d(reg);
                     d.add({reg, {"p"}, qubit::flip(0, 1), "damp"});
                     const auto rho0 = DensityMatrix::basis(reg, std::vector<int>{1});
                     const double t = 0.05;  // gamma = 1/50
                     const double cond = trace_distance(run_timer_triggered({{"damp", d}}, {2}, 0.02, rho0, t), rho0);
                     const double free = trace_distance(evolve(d, rho0, t), rho0);
                     return std::pair{cond / free, 0.01};
                   }});
  if (max_qubits >= 5)
    out.push_back({"three-qubit transfer fidelity", 5, [] {
                     return std::pair{1.0 - run_transfer_3qubit(bloch_state(1.0, 0.4)).fidelity, 1e-6};
                   }});
  return out;
}

inline Outcome oracle_suite(Params p, const Context& ctx) {
  const auto maxq = p.count("max-qubits", 5, 1);
  p.finish();
  Table t{{"check", "qubits", "error", "limit", "verdict"}, {}};
  bool ok = true;
  const auto checks = oracle_checks(maxq);
  const auto results = detail::parallel_map(checks.size(), ctx.threads, [&](std::size_t i) { return checks[i].run(); });
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const bool pass = results[i].first <= results[i].second;
    ok = ok && pass;
    t.add({checks[i].name, std::to_string(checks[i].qubits), fmt(results[i].first), fmt(results[i].second), detail::pass_fail(pass)});
  }
  Outcome out;
  detail::write_file(ctx, out, "oracle_suite.csv", t.csv());
  out.summary = {{"checks", checks.size()}, {"all_passed", ok}};
  out.ok = ok;
  return out;
}

// ---------------------------------------------------------------------------
// Registry.
// ---------------------------------------------------------------------------

using Runner = std::function<Outcome(Params, const Context&)>;

inline const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"initializer", initializer},
      {"timer", timer},
      {"cutoff-profile", cutoff_profile_experiment},
      {"sharp-threshold", sharp_threshold_experiment},
      {"concat-error", concat_error},
      {"trunc-normal", trunc_normal},
      {"imperfect-init", imperfect_init},
      {"transfer", transfer},
      {"oracle-suite", oracle_suite},
  };
  return r;
}

inline Outcome run_experiment(const std::string& name, const json& params, const Context& ctx) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw config_error("unknown experiment '" + name + "'");
  return it->second(Params(params), ctx);
}

/// Config file: {"experiment": name, "params": {...}, "seed": k, "out_dir": path}.
struct ExperimentConfig {
  std::string experiment;
  json params = json::object();
  std::uint64_t seed = 0;
  std::string out_dir;
};

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw config_error("config must be a JSON object");
  static const std::set<std::string> known{"experiment", "params", "seed", "out_dir"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw config_error("unknown config key '" + k + "'");
  ExperimentConfig c;
  try {
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("params")) c.params = j["params"];
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw config_error(std::string("invalid config: ") + e.what());
  }
  if (!registry().count(c.experiment)) throw config_error("unknown experiment '" + c.experiment + "'");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Named generators for `dqtime build`.
// ---------------------------------------------------------------------------

inline json build_named(const std::string& name, Params p) {
  if (name == "initializer") {
    const auto M = p.count("M", 2, 1);
    const double omega = p.positive("omega", 1.0), Gamma = p.positive("Gamma", 1.0);
    p.finish();
    return to_json(build_initializer({M, omega, Gamma}));
  }
  if (name == "timer") {
    const auto N = p.count("N", 3, 2);
    const double gamma = p.positive("gamma", 1.0);
    p.finish();
    return to_json(build_timer({N, gamma}));
  }
  if (name == "transfer-3") {
    const double omega = p.positive("omega", 1.0);
    p.finish();
    const auto t = build_transfer_3qubit(omega);
    return {{"A", to_json(t.A.generator)}, {"B", to_json(t.B.generator)}};
  }
  if (name == "transfer-n" || name == "transfer-compressed") {
    const auto n = p.count("n", 3, 3);
    const double omega = p.positive("omega", 1.0);
    p.finish();
    const auto t = name == "transfer-n" ? build_transfer_nqubit(n, omega) : build_transfer_compressed(n, omega);
    json stages = json::array();
    for (const auto& s : t.stages) stages.push_back({{"name", s.name}, {"generator", to_json(s.generator)}});
    return {{"n", n}, {"output", t.output}, {"stages", stages}};
  }
  throw config_error("unknown generator '" + name + "' (initializer, timer, transfer-3, transfer-n, transfer-compressed)");
}

}  // namespace dqt::experiment

#endif  // DQT_EXPERIMENT_HPP

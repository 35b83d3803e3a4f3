// repsim command-line interface: gadget verification, the three experiments,
// the epsilon sweep, and the decode-table dump.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "repsim/experiments.hpp"
#include "repsim/verify.hpp"

using namespace repsim;
using nlohmann::json;

namespace {

struct CliOptions {
  double p = 1e-3;
  double epsilon = 0.0;
  std::vector<double> epsilons;
  long shots = 100000;
  std::vector<int> depths;
  uint64_t seed = 1;
  std::vector<std::string> variants;
  std::string out;
  std::string format = "csv";
  std::string config_file;
  std::string postselect = "q1";
  int threads = 0;
  long trajectories = 2000;
};

int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

PostselectRule parse_rule(const std::string& s) {
  if (s == "any") return PostselectRule::DiscardAny;
  if (s == "q1") return PostselectRule::DiscardQ1Signature;
  throw CLI::ValidationError("postselect must be 'any' or 'q1'");
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names,
                                    std::vector<Variant> fallback) {
  if (names.empty()) return fallback;
  std::vector<Variant> out;
  for (const auto& n : names) {
    auto v = parse_variant(n);
    if (!v) throw CLI::ValidationError("unknown variant: " + n);
    out.push_back(*v);
  }
  return out;
}

// key = value configuration file; flags given on the command line win.
void load_config_file(const std::string& path, CliOptions& opt,
                      const std::map<std::string, bool>& flag_seen) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw CLI::ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r\n");
      auto e = s.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto seen = [&](const std::string& k) {
      auto it = flag_seen.find(k);
      return it != flag_seen.end() && it->second;
    };
    try {
      if (key == "p") { if (!seen("p")) opt.p = std::stod(val); }
      else if (key == "epsilon") { if (!seen("epsilon")) opt.epsilon = std::stod(val); }
      else if (key == "shots") { if (!seen("shots")) opt.shots = std::stol(val); }
      else if (key == "seed") { if (!seen("seed")) opt.seed = std::stoull(val); }
      else if (key == "threads") { if (!seen("threads")) opt.threads = std::stoi(val); }
      else if (key == "trajectories") { if (!seen("trajectories")) opt.trajectories = std::stol(val); }
      else if (key == "postselect") { if (!seen("postselect")) opt.postselect = val; }
      else if (key == "format") { if (!seen("format")) opt.format = val; }
      else if (key == "out") { if (!seen("out")) opt.out = val; }
      else if (key == "depth") {
        if (!seen("depth")) {
          opt.depths.clear();
          std::stringstream ss(val);
          std::string tok;
          while (std::getline(ss, tok, ',')) opt.depths.push_back(std::stoi(tok));
        }
      } else if (key == "variant") {
        if (!seen("variant")) {
          opt.variants.clear();
          std::stringstream ss(val);
          std::string tok;
          while (std::getline(ss, tok, ',')) opt.variants.push_back(tok);
        }
      } else {
        throw CLI::ValidationError("config line " + std::to_string(lineno) + ": unknown key '" +
                                   key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("config line " + std::to_string(lineno) + ": bad value for '" +
                                 key + "'");
    }
  }
  if (opt.postselect != "any" && opt.postselect != "q1")
    throw CLI::ValidationError("config: postselect must be 'any' or 'q1'");
  if (opt.format != "csv" && opt.format != "json")
    throw CLI::ValidationError("config: format must be 'csv' or 'json'");
}

uint64_t hash_options(const std::string& cmd, const CliOptions& o) {
  std::ostringstream os;
  os << cmd << "|p=" << fmt_double(o.p) << "|eps=" << fmt_double(o.epsilon) << "|shots=" << o.shots
     << "|traj=" << o.trajectories << "|postselect=" << o.postselect;
  for (int d : o.depths) os << "|d=" << d;
  for (const auto& v : o.variants) os << "|v=" << v;
  for (double e : o.epsilons) os << "|e=" << fmt_double(e);
  return fnv1a64(os.str());
}

void write_output(const std::string& out_path, const std::string& body) {
  if (out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot write " + out_path);
  f << body;
}

int cmd_verify_gadgets(const CliOptions& opt) {
  PostselectRule rule = parse_rule(opt.postselect);
  auto rep = run_verification(rule, opt.seed);
  auto cat = gadget_catalog(rule);

  json j;
  j["tool"] = "repsim";
  j["version"] = kVersion;
  j["seed"] = opt.seed;
  j["config_hash"] = hash_options("verify-gadgets", opt);
  j["postselect_rule"] = opt.postselect;
  j["rows"] = json::array();
  for (const auto& row : rep.rows) {
    json r;
    r["gadget"] = row.gadget;
    r["outcome"] = row.outcome_key;
    r["convention"] = row.convention;
    r["expected_deficit"] = row.expected_deficit;
    r["derived_deficit"] = row.derived_deficit;
    r["fault_sites"] = row.n_sites;
    r["violations"] = row.violations;
    r["pass"] = row.pass;
    if (!row.mismatches.empty()) {
      r["mismatches"] = json::array();
      for (const auto& m : row.mismatches)
        r["mismatches"].push_back(
            {{"block", m.block}, {"qubit", m.j}, {"expected", m.expected}, {"derived", m.derived}});
    }
    if (!row.site_classes.empty()) {
      r["site_classifications"] = json::array();
      for (const auto& [site, cls] : row.site_classes)
        r["site_classifications"].push_back({{"site", site}, {"classes", cls}});
    }
    j["rows"].push_back(r);
  }
  j["control_case"] = {{"gadget", "naive_transversal_s"},
                       {"violations", rep.control_violations},
                       {"detector_fired", rep.control_ok}};
  j["catalog"] = json::array();
  for (const auto& e : cat)
    j["catalog"].push_back(
        {{"name", e.name}, {"qubits", e.n_qubits}, {"fault_sites", e.n_fault_sites}});
  j["all_pass"] = rep.all_pass;

  write_output(opt.out, j.dump(2) + "\n");
  return rep.all_pass ? 0 : 1;
}

int cmd_tables(const CliOptions& opt) {
  std::ostringstream os;
  os << "# repsim " << kVersion << " decode tables\n";
  os << "table,z1z2,z2z3,feedback\n";
  for (int a : {1, -1})
    for (int b : {1, -1}) {
      auto fb = decode_single({a, b});
      os << "single," << a << "," << b << "," << (fb ? "X" + std::to_string(*fb + 1) : "I") << "\n";
    }
  os << "table,location,z1z2_r0,z2z3_r0,z1z2_r1,z2z3_r1,feedback\n";
  struct Row { int loc, a, b, c, d; };
  const std::vector<Row> locs = {
      {1, -1, 1, -1, 1},  {2, -1, -1, -1, -1}, {3, 1, -1, 1, -1}, {4, 1, 1, -1, 1},
      {5, 1, -1, -1, -1}, {6, 1, 1, -1, -1},   {7, 1, 1, 1, -1},  {8, -1, 1, 1, 1},
      {9, -1, 1, 1, 1},   {10, 1, -1, 1, 1},   {11, 1, -1, 1, 1}, {12, 1, 1, 1, 1},
      {13, 1, 1, 1, -1},  {14, 1, 1, 1, 1},    {15, 1, 1, 1, 1},  {16, 1, 1, -1, 1},
      {17, 1, 1, -1, 1},  {18, 1, 1, 1, -1},   {19, 1, 1, 1, -1},
  };
  for (const auto& r : locs) {
    auto fb = decode_double({r.a, r.b}, {r.c, r.d});
    os << "double," << r.loc << "," << r.a << "," << r.b << "," << r.c << "," << r.d << ","
       << (fb ? "X" + std::to_string(*fb + 1) : "I") << "\n";
  }
  write_output(opt.out, os.str());
  return 0;
}

int cmd_benchmark(const CliOptions& opt) {
  PostselectRule rule = parse_rule(opt.postselect);
  auto variants =
      parse_variants(opt.variants, {Variant::Bare, Variant::Encoded, Variant::EncodedEc});
  std::vector<int> depths = opt.depths.empty() ? std::vector<int>{8} : opt.depths;
  RunStamp stamp{opt.seed, hash_options("benchmark", opt)};

  json jrows = json::array();
  std::ostringstream os;
  os << stamp.header_comment();
  os << "variant,d,p,shots,F,stderr\n";
  for (Variant v : variants) {
    for (int d : depths) {
      BenchmarkConfig cfg;
      cfg.variant = v;
      cfg.depth = d;
      cfg.p = opt.p;
      cfg.shots = opt.shots;
      cfg.rule = rule;
      cfg.threads = effective_threads(opt.threads);
      auto res = run_benchmark(cfg, opt.seed);
      os << variant_name(v) << "," << d << "," << fmt_double(opt.p) << "," << res.shots << ","
         << fmt_double(res.fidelity) << "," << fmt_double(res.stderr_) << "\n";
      jrows.push_back({{"variant", variant_name(v)},
                       {"d", d},
                       {"p", opt.p},
                       {"shots", res.shots},
                       {"F", res.fidelity},
                       {"stderr", res.stderr_}});
    }
  }
  if (opt.format == "json") {
    json j = {{"tool", "repsim"}, {"version", kVersion}, {"seed", opt.seed},
              {"config_hash", stamp.config_hash}, {"rows", jrows}};
    write_output(opt.out, j.dump(2) + "\n");
  } else {
    write_output(opt.out, os.str());
  }
  return 0;
}

int cmd_ising(const CliOptions& opt) {
  PostselectRule rule = parse_rule(opt.postselect);
  auto variants =
      parse_variants(opt.variants, {Variant::Bare, Variant::Encoded, Variant::EncodedEc});
  RunStamp stamp{opt.seed, hash_options("ising", opt)};
  int steps = opt.depths.empty() ? 50 : opt.depths[0];

  json jrows = json::array();
  std::ostringstream os;
  os << stamp.header_comment("h=1 delta=0.1 raw_shots_per_variant=" + std::to_string(opt.shots));
  os << "variant,step,t,M,M_stderr,discard_rate\n";
  for (Variant v : variants) {
    IsingConfig cfg;
    cfg.variant = v;
    cfg.p = opt.p;
    cfg.shots = opt.shots;
    cfg.n_steps = steps;
    cfg.rule = rule;
    cfg.threads = effective_threads(opt.threads);
    auto res = run_ising(cfg, opt.seed);
    for (const auto& pt : res.points) {
      os << variant_name(v) << "," << pt.step << "," << fmt_double(pt.t) << "," << fmt_double(pt.m)
         << "," << fmt_double(pt.m_stderr) << "," << fmt_double(pt.discard_rate) << "\n";
      jrows.push_back({{"variant", variant_name(v)}, {"step", pt.step}, {"t", pt.t}, {"M", pt.m},
                       {"M_stderr", pt.m_stderr}, {"discard_rate", pt.discard_rate}});
    }
  }
  if (opt.format == "json") {
    json j = {{"tool", "repsim"}, {"version", kVersion}, {"seed", opt.seed},
              {"config_hash", stamp.config_hash}, {"rows", jrows}};
    write_output(opt.out, j.dump(2) + "\n");
  } else {
    write_output(opt.out, os.str());
  }
  return 0;
}

int run_vqe_like(const CliOptions& opt, const std::vector<double>& eps_list,
                 const std::string& cmd_name) {
  PostselectRule rule = parse_rule(opt.postselect);
  auto variants =
      parse_variants(opt.variants, {Variant::Bare, Variant::Encoded, Variant::EncodedEc});
  RunStamp stamp{opt.seed, hash_options(cmd_name, opt)};

  auto ham = caffeine_hamiltonian();
  double e_exact = ham.ground_energy();
  auto best = optimize_ansatz_multistart(ham);

  json jrows = json::array();
  std::ostringstream os;
  os << stamp.header_comment("exact_energy=" + fmt_double(e_exact) +
                             " optimized_energy=" + fmt_double(best.energy));
  os << "variant,epsilon,energy,stderr,abs_error,accepted_shots,raw_shots\n";
  for (Variant v : variants) {
    for (double eps : eps_list) {
      VqeConfig cfg;
      cfg.variant = v;
      cfg.p = opt.p;
      cfg.epsilon = eps;
      cfg.shots_per_group = opt.shots;
      cfg.trajectories_per_group = opt.trajectories;
      cfg.rule = rule;
      cfg.threads = effective_threads(opt.threads);
      cfg.theta = best.theta;
      auto res = vqe_energy(ham, cfg, opt.seed);
      os << variant_name(v) << "," << fmt_double(eps) << "," << fmt_double(res.energy) << ","
         << fmt_double(res.stderr_) << "," << fmt_double(std::abs(res.energy - e_exact)) << ","
         << res.accepted_shots << "," << res.raw_shots << "\n";
      jrows.push_back({{"variant", variant_name(v)}, {"epsilon", eps}, {"energy", res.energy},
                       {"stderr", res.stderr_}, {"abs_error", std::abs(res.energy - e_exact)},
                       {"accepted_shots", res.accepted_shots}, {"raw_shots", res.raw_shots}});
    }
  }
  if (opt.format == "json") {
    json j = {{"tool", "repsim"}, {"version", kVersion}, {"seed", opt.seed},
              {"config_hash", stamp.config_hash}, {"exact_energy", e_exact}, {"rows", jrows}};
    write_output(opt.out, j.dump(2) + "\n");
  } else {
    write_output(opt.out, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repsim: bias-preserving computation with the distance-3 bit-flip code"};
  app.require_subcommand(1);

  CliOptions opt;
  std::map<std::string, CLI::Option*> flags;

  auto add_common = [&](CLI::App* sub) {
    auto tag = [&](const char* k) { return std::string(k) + ":" + sub->get_name(); };
    flags[tag("p")] = sub->add_option("--p", opt.p, "bit-flip probability per gate wire");
    flags[tag("epsilon")] = sub->add_option("--epsilon", opt.epsilon, "bias-leak fraction");
    flags[tag("shots")] = sub->add_option("--shots", opt.shots, "shots per point");
    flags[tag("depth")] = sub->add_option("--depth", opt.depths, "circuit depth (repeatable)");
    flags[tag("seed")] = sub->add_option("--seed", opt.seed, "master seed");
    flags[tag("variant")] =
        sub->add_option("--variant", opt.variants, "bare|encoded|encoded_ec (repeatable)");
    flags[tag("out")] = sub->add_option("--out", opt.out, "output path (default stdout)");
    flags[tag("format")] =
        sub->add_option("--format", opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    flags[tag("threads")] = sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
    flags[tag("postselect")] =
        sub->add_option("--postselect", opt.postselect, "gadget postselection rule: any|q1")
            ->check(CLI::IsMember({"any", "q1"}));
    flags[tag("trajectories")] = sub->add_option("--trajectories", opt.trajectories,
                                                 "noise trajectories per measurement group");
    sub->add_option("--config", opt.config_file, "key=value config file (flags win)");
  };

  auto* verify = app.add_subcommand("verify-gadgets", "derive and check all reference expansions");
  auto* bench = app.add_subcommand("benchmark", "fidelity-vs-depth benchmark");
  auto* ising = app.add_subcommand("ising", "Trotterized transverse-field Ising dynamics");
  auto* vqe = app.add_subcommand("vqe", "VQE on the caffeine Hamiltonian");
  auto* sweep = app.add_subcommand("epsilon-sweep", "VQE accuracy vs bias-leak epsilon");
  auto* tables = app.add_subcommand("tables", "print the decode lookup tables as CSV");
  for (auto* sub : {verify, bench, ising, vqe, sweep, tables}) add_common(sub);
  auto* eps_opt = sweep->add_option("--epsilons", opt.epsilons, "epsilon values (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!opt.config_file.empty()) {
      std::map<std::string, bool> seen;
      for (const char* key : {"p", "epsilon", "shots", "depth", "seed", "variant", "out", "format",
                              "threads", "postselect", "trajectories"}) {
        auto it = flags.find(std::string(key) + ":" + sub->get_name());
        seen[key] = it != flags.end() && it->second->count() > 0;
      }
      load_config_file(opt.config_file, opt, seen);
    }

    if (sub == verify) return cmd_verify_gadgets(opt);
    if (sub == tables) return cmd_tables(opt);
    if (sub == bench) return cmd_benchmark(opt);
    if (sub == ising) return cmd_ising(opt);
    if (sub == vqe) return run_vqe_like(opt, {opt.epsilon}, "vqe");
    if (sub == sweep) {
      std::vector<double> eps = opt.epsilons;
      if (eps.empty() && eps_opt->count() == 0) eps = {1e-4, 1e-3, 1e-2, 1e-1};
      return run_vqe_like(opt, eps, "epsilon-sweep");
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

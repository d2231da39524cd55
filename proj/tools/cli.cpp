#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wiretap/report.hpp"

namespace wiretap {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<Rational> rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_rational(t));
  if (out.empty()) throw ParseError("empty list: '" + s + "'");
  return out;
}

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || t.empty()) throw ParseError("not an integer: '" + t + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty list: '" + s + "'");
  return out;
}

BoundMode parse_mode(const std::string& m) {
  if (m == "zero") return BoundMode::ZeroError;
  if (m == "asymptotic") return BoundMode::Asymptotic;
  throw ParseError("mode must be zero or asymptotic");
}

struct Global {
  unsigned jobs = 1;
  bool timing = false;
};

class Manifest {
 public:
  explicit Manifest(std::string command) { j_["command"] = std::move(command); j_["tool_version"] = WIRETAP_VERSION; }
  void input(const std::string& role, const std::string& path) {
    inputs_.push_back({{"role", role}, {"path", path}, {"sha256", sha256_file(path)}});
  }
  Json& seeds() { return seeds_; }
  Json& params() { return params_; }
  Json finish(const Global& g, double wall) {
    Json m = j_;
    m["inputs"] = inputs_;
    m["seeds"] = seeds_;
    m["parameters"] = params_;
    if (g.timing) {
      m["jobs"] = g.jobs;
      m["wall_time_s"] = wall;
    }
    return m;
  }

 private:
  Json j_ = Json::object();
  Json inputs_ = Json::array();
  Json seeds_ = Json::object();
  Json params_ = Json::object();
};

void emit(const Json& report, const std::string& out_path, std::ostream& out) {
  std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ParseError("cannot write " + out_path);
  f << text;
}

Json finish_report(Manifest& m, const Global& g, std::chrono::steady_clock::time_point t0, Json result) {
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json r;
  r["manifest"] = m.finish(g, wall);
  r["result"] = std::move(result);
  return r;
}

Network load_network(const std::string& path) {
  Network net = parse_network(read_file(path));
  auto rep = validate(net);
  if (!rep.ok) {
    std::string msg = "invalid network:";
    for (const auto& v : rep.violations) msg += " " + v.detail + ";";
    msg.pop_back();
    throw ValidationError(msg);
  }
  return net;
}

// --- outer ---
struct OuterArgs {
  std::string network, mode = "zero", relax, out;
  std::vector<std::string> weights;
  bool witness = false;
};

Json cmd_outer(const OuterArgs& a, const Global& g, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  Manifest man("outer");
  man.input("network", a.network);
  Network net = load_network(a.network);
  BoundMode mode = parse_mode(a.mode);
  std::optional<Relax> relax;
  if (!a.relax.empty()) {
    if (mode != BoundMode::Asymptotic) throw ParseError("--relax applies to asymptotic mode only");
    auto r = rational_list(a.relax);
    if (r.size() != 2) throw ParseError("--relax takes e4,e6");
    relax = Relax{r[0], r[1]};
  }
  std::vector<std::vector<Rational>> weights;
  for (const auto& w : a.weights) weights.push_back(rational_list(w));
  if (weights.empty()) weights.push_back(std::vector<Rational>(net.sources().size(), Rational(1)));
  man.params()["mode"] = a.mode;
  Json wj = Json::array();
  for (const auto& w : weights) wj.push_back(rationals_json(w));
  man.params()["weights"] = wj;
  man.params()["relax"] = relax ? Json(rationals_json({relax->eps4, relax->eps6})) : Json(nullptr);
  man.params()["witness"] = a.witness;
  auto sweep = outer_bound_sweep(net, weights, mode, relax, g.jobs);
  Json res;
  res["ground_set"] = GroundSet(net).labels();
  Json bounds = Json::array();
  for (const auto& e : sweep) bounds.push_back(outer_bound_json(net, e.result, a.witness));
  res["bounds"] = bounds;
  Json report = finish_report(man, g, t0, res);
  emit(report, a.out, out);
  return report;
}

// --- check-code ---
struct CheckArgs {
  std::string network, code, mode = "zero", scale = "1", outer_report, out;
};

Json cmd_check_code(const CheckArgs& a, const Global& g, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  Manifest man("check-code");
  man.input("network", a.network);
  man.input("code", a.code);
  if (!a.outer_report.empty()) man.input("outer_report", a.outer_report);
  Network net = load_network(a.network);
  CodeSpec code = parse_code_spec(read_file(a.code), net);
  BoundMode mode = parse_mode(a.mode);
  Rational scale = parse_rational(a.scale);
  man.params()["mode"] = a.mode;
  man.params()["scale"] = exact_json(scale);
  auto ev = evaluate_code(net, code);
  if (!ev.entropy) throw CapExceeded("ground set too large for an entropy certificate");
  auto cert = inner_certificate(*ev.entropy, net, mode, scale);
  Json res;
  res["evaluation"] = code_evaluation_json(ev);
  res["certificate"] = certificate_json(cert);
  res["certified_rate"] = cert.ok ? rationals_json(cert.rate) : Json(nullptr);
  if (!a.outer_report.empty()) {
    Json cached = Json::parse(read_file(a.outer_report));
    Json sandwich = Json::array();
    for (const auto& b : cached.at("result").at("bounds")) {
      if (b.at("mode") != mode_name(mode) || b.at("value").is_null()) continue;
      Rational inner = 0;
      const auto& w = b.at("weights");
      if (w.size() != cert.rate.size()) continue;
      for (std::size_t s = 0; s < w.size(); ++s) inner += parse_rational(w[s].get<std::string>()) * cert.rate[s];
      Rational outer = parse_rational(b.at("value").get<std::string>());
      sandwich.push_back({{"weights", w},
                          {"outer", exact_json(outer)},
                          {"inner", exact_json(inner)},
                          {"closed", cert.ok && inner == outer}});
    }
    res["sandwich"] = sandwich;
  }
  Json report = finish_report(man, g, t0, res);
  emit(report, a.out, out);
  return report;
}

// --- simulate ---
struct SimArgs {
  std::string rv, mode = "zero", nt = "4", eps, out;
  std::uint64_t trials = 0;
  std::optional<std::uint64_t> seed;
};

Json cmd_simulate(const SimArgs& a, const Global& g, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  if (a.trials > 0 && !a.seed) throw ParseError("--trials requires --seed");
  Manifest man("simulate");
  man.input("rv", a.rv);
  RvSystem rv = parse_rv_system(read_file(a.rv));
  BoundMode mode = parse_mode(a.mode);
  Rational eps = a.eps.empty() ? (mode == BoundMode::ZeroError ? Rational(1, 10) : Rational(1, 2)) : parse_rational(a.eps);
  auto nts = int_list(a.nt);
  man.params()["mode"] = a.mode;
  man.params()["nt"] = nts;
  man.params()["eps"] = exact_json(eps);
  man.params()["trials"] = a.trials;
  if (a.seed) man.seeds()["seed"] = *a.seed;
  Json runs = Json::array(), trend = Json::array();
  for (int nt : nts) {
    SimCode sim = build_sim(rv, mode, nt, eps);
    SimOptions so;
    so.trials = a.trials;
    so.seed = a.seed.value_or(0);
    so.jobs = g.jobs;
    auto m = run_sim(sim, so);
    runs.push_back(sim_json(sim, m));
    Rational worst = 0;
    for (const auto& e : m.errors) worst = std::max(worst, e.probability);
    trend.push_back({{"nt", nt}, {"n", sim.n}, {"max_error", exact_json(worst)}});
  }
  bool mono = true;
  for (std::size_t i = 1; i < trend.size(); ++i)
    mono = mono && parse_rational(trend[i]["max_error"].get<std::string>()) <=
                       parse_rational(trend[i - 1]["max_error"].get<std::string>());
  Json res;
  res["runs"] = runs;
  res["trend"] = trend;
  res["error_non_increasing"] = mono;
  Json report = finish_report(man, g, t0, res);
  emit(report, a.out, out);
  return report;
}

// --- amplify ---
struct AmpArgs {
  std::string weak, L = "1", delta1 = "1/10", delta2 = "1/5", eps2 = "1/10", lambda = "auto", side = "entropy",
              mode = "exhaustive", adversary_side = "yes", hash = "identity", out;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

Json cmd_amplify(const AmpArgs& a, const Global& g, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  Manifest man("amplify");
  man.input("weak", a.weak);
  WeakCode weak = parse_weak_code(read_file(a.weak));
  auto ver = verify_weak_code(weak);
  AmplifyOptions ao;
  ao.delta1 = parse_rational(a.delta1);
  ao.delta2 = parse_rational(a.delta2);
  ao.eps2 = parse_rational(a.eps2);
  ao.lambda = parse_lambda(a.lambda);
  if (a.side == "entropy") ao.side = SidePolicy::Entropy;
  else if (a.side == "budget") ao.side = SidePolicy::Budget;
  else throw ParseError("--side must be entropy or budget");
  if (a.hash == "identity") ao.hash = HashLayout::IdentityToeplitz;
  else if (a.hash == "toeplitz") ao.hash = HashLayout::Toeplitz;
  else throw ParseError("--hash must be identity or toeplitz");
  ao.seed = a.seed;
  AmplifyEvalOptions eo;
  if (a.mode == "montecarlo") eo.montecarlo = true;
  else if (a.mode != "exhaustive") throw ParseError("--mode must be exhaustive or montecarlo");
  if (eo.montecarlo && a.trials == 0) throw ParseError("montecarlo mode needs --trials");
  if (a.adversary_side != "yes" && a.adversary_side != "no") throw ParseError("--adversary-side must be yes or no");
  eo.view_includes_side = a.adversary_side == "yes";
  eo.trials = a.trials;
  eo.seed = a.seed;
  eo.jobs = g.jobs;
  auto Ls = int_list(a.L);
  man.params()["L"] = Ls;
  man.params()["delta1"] = exact_json(ao.delta1);
  man.params()["delta2"] = exact_json(ao.delta2);
  man.params()["eps2"] = exact_json(ao.eps2);
  man.params()["lambda"] = a.lambda;
  man.params()["side"] = a.side;
  man.params()["hash"] = a.hash;
  man.params()["mode"] = a.mode;
  man.params()["adversary_side"] = a.adversary_side;
  man.params()["trials"] = a.trials;
  man.seeds()["seed"] = a.seed;
  Json runs = Json::array(), trend = Json::array();
  for (int L : Ls) {
    ao.L = L;
    auto code = amplify(weak, ao);
    auto ev = evaluate_amplified(code, eo);
    runs.push_back({{"L", L}, {"code", amplified_code_json(code)}, {"evaluation", amplified_evaluation_json(ev)}});
    Json row = {{"L", L}};
    Json lk = Json::array();
    for (const auto& l : ev.leakage) lk.push_back(l.exact ? exact_json(*l.exact) : approx_json(l.bits, l.ci95 ? *l.ci95 : 1e-9L));
    row["leakage"] = lk;
    trend.push_back(row);
  }
  Json res;
  res["weak"] = weak_verification_json(ver);
  res["runs"] = runs;
  res["trend"] = trend;
  Json report = finish_report(man, g, t0, res);
  emit(report, a.out, out);
  return report;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::string data = read_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity-region toolkit for wiretap networks", "wiretap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WIRETAP_VERSION);
  Global g;
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--timing", g.timing, "record jobs and wall time in the manifest");

  OuterArgs oa;
  auto* outer = app.add_subcommand("outer", "Shannon outer bound on the weighted sum rate");
  outer->add_option("--network", oa.network, "network JSON")->required();
  outer->add_option("--mode", oa.mode, "zero or asymptotic");
  outer->add_option("--weights", oa.weights, "comma separated weights; repeat for a sweep")->take_all();
  outer->add_option("--relax", oa.relax, "e4,e6 for the asymptotic relaxation");
  outer->add_option("--out", oa.out, "report path (stdout when omitted)");
  outer->add_flag("--witness", oa.witness, "include the optimal entropy vector");

  CheckArgs ca;
  auto* check = app.add_subcommand("check-code", "evaluate a code and certify its rate");
  check->add_option("--network", ca.network)->required();
  check->add_option("--code", ca.code)->required();
  check->add_option("--mode", ca.mode);
  check->add_option("--scale", ca.scale, "capacity scale a in (0, 1]");
  check->add_option("--outer-report", ca.outer_report, "cached outer report for the sandwich check");
  check->add_option("--out", ca.out);

  SimArgs sa;
  auto* sim = app.add_subcommand("simulate", "random-code constructions at desk scale");
  sim->add_option("--rv", sa.rv)->required();
  sim->add_option("--mode", sa.mode);
  sim->add_option("--nt", sa.nt, "comma separated n_t values");
  sim->add_option("--eps", sa.eps, "typicality slack");
  sim->add_option("--trials", sa.trials, "Monte Carlo trials (0 enumerates)");
  sim->add_option("--seed", sa.seed);
  sim->add_option("--out", sa.out);

  AmpArgs aa;
  auto* amp = app.add_subcommand("amplify", "weak to strong secrecy conversion");
  amp->add_option("--weak", aa.weak)->required();
  amp->add_option("--L", aa.L, "comma separated repetition counts");
  amp->add_option("--delta1", aa.delta1);
  amp->add_option("--delta2", aa.delta2);
  amp->add_option("--eps2", aa.eps2);
  amp->add_option("--lambda", aa.lambda, "full, auto, fixed:K");
  amp->add_option("--side", aa.side, "entropy or budget side-message sizing");
  amp->add_option("--mode", aa.mode, "exhaustive or montecarlo");
  amp->add_option("--hash", aa.hash, "identity ([I | T], full rank) or toeplitz");
  amp->add_option("--adversary-side", aa.adversary_side, "yes when the eavesdropper sees the side messages");
  amp->add_option("--trials", aa.trials);
  amp->add_option("--seed", aa.seed);
  amp->add_option("--out", aa.out);

  std::vector<std::string> argv_s{"wiretap"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (*outer) cmd_outer(oa, g, out);
    else if (*check) cmd_check_code(ca, g, out);
    else if (*sim) cmd_simulate(sa, g, out);
    else if (*amp) cmd_amplify(aa, g, out);
  } catch (const CapExceeded& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const SizingError& e) {
    err << "sizing error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace wiretap

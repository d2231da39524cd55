#include "wiretap/report.hpp"

namespace wiretap {

Json exact_json(const Rational& q) { return to_string(q); }

Json approx_json(long double v, long double tol) {
  Json j;
  j["value"] = static_cast<double>(v);
  j["approx"] = true;
  j["tol"] = static_cast<double>(tol);
  return j;
}

Json entropy_json(const EntropyValue& e, long double tol) {
  if (e.exact) return exact_json(*e.exact);
  return approx_json(e.approx, tol);
}

Json rationals_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(exact_json(q));
  return a;
}

namespace {

Json membership_json(const MembershipReport& r) {
  Json j;
  j["ok"] = r.ok;
  j["rows"] = r.checks.size();
  Json v = Json::array();
  for (const auto& c : r.violations()) {
    Json x;
    x["row"] = c.row;
    x["constraint"] = c.provenance;
    x["slack"] = exact_json(c.slack);
    v.push_back(x);
  }
  j["violations"] = v;
  return j;
}

Json optional_rational(const std::optional<Rational>& q) { return q ? exact_json(*q) : Json(nullptr); }

}  // namespace

Json outer_bound_json(const Network& net, const OuterBound& ob, bool with_witness) {
  Json j;
  j["mode"] = mode_name(ob.mode);
  j["weights"] = rationals_json(ob.weights);
  j["status"] = status_name(ob.lp.status);
  j["value"] = ob.lp.status == LpStatus::Optimal ? exact_json(ob.lp.value) : Json(nullptr);
  j["relaxation"] = ob.relaxation;
  j["rows"] = {{"full", ob.rows_full}, {"reduced", ob.rows_reduced}};
  j["coordinates_reduced"] = ob.coords_reduced;
  j["pivots"] = ob.lp.pivots;
  j["certificate_rows"] = ob.lp.certificate.size();
  j["certificate_verified"] = ob.lp.certificate_verified;
  j["witness_verified"] = ob.witness_verified;
  if (with_witness && ob.lp.status == LpStatus::Optimal) {
    GroundSet g(net);
    Json w = Json::object();
    for (std::size_t a = 1; a < ob.lp.witness.coords.size(); ++a)
      if (sgn(ob.lp.witness.coords[a]) != 0) w[g.describe(static_cast<Subset>(a))] = exact_json(ob.lp.witness.coords[a]);
    j["witness"] = w;
    j["rate"] = rationals_json(project_sources(ob.lp.witness, net));
  }
  return j;
}

Json certificate_json(const CertificateReport& c) {
  Json j;
  j["ok"] = c.ok;
  j["mode"] = mode_name(c.mode);
  j["scale"] = exact_json(c.scale);
  j["rate"] = rationals_json(c.rate);
  Json f = Json::object();
  for (const auto& [k, r] : c.families) f["gamma" + std::to_string(k)] = membership_json(r);
  j["families"] = f;
  return j;
}

Json code_evaluation_json(const CodeEvaluation& ev) {
  Json j;
  Json errs = Json::array();
  for (const auto& e : ev.errors) errs.push_back({{"sink", e.sink}, {"source", e.source}, {"probability", exact_json(e.probability)}});
  j["errors"] = errs;
  Json leaks = Json::array();
  for (const auto& l : ev.leakage)
    leaks.push_back({{"alpha", l.alpha}, {"bits", entropy_json(l.bits)}, {"factorizes", l.factorizes}});
  j["leakage"] = leaks;
  Json rv = Json::array(), rf = Json::array();
  for (const auto& h : ev.rate_variable) rv.push_back(entropy_json(h));
  for (auto h : ev.rate_fixed) rf.push_back(approx_json(h));
  j["edge_entropy"] = rv;
  j["edge_log_alphabet"] = rf;
  j["support"] = ev.joint.support.size();
  return j;
}

Json sim_json(const SimCode& sim, const SimMetrics& m) {
  Json j;
  j["mode"] = mode_name(sim.mode);
  j["nt"] = sim.nt;
  j["eps"] = exact_json(sim.eps);
  j["n"] = sim.n;
  j["delta"] = approx_json(sim.delta);
  Json cb = Json::array();
  for (std::size_t s = 0; s < sim.messages.size(); ++s)
    cb.push_back({{"source", sim.rv.net.sources()[s].node},
                  {"messages", sim.messages[s].size()},
                  {"keys", sim.keys[s].size()},
                  {"rate", approx_json(sim.rate[s])},
                  {"rate_bound", approx_json(sim.rate_bound[s])}});
  j["codebooks"] = cb;
  j["decoders_unique"] = sim.decoders_unique;
  j["exhaustive"] = m.exhaustive;
  j["samples"] = m.samples;
  Json errs = Json::array();
  for (const auto& e : m.errors)
    errs.push_back({{"sink", e.sink}, {"source", e.source}, {"count", e.count}, {"probability", exact_json(e.probability)}});
  j["errors"] = errs;
  Json edges = Json::array();
  for (std::size_t e = 0; e < m.edges.size(); ++e) {
    const auto& c = m.edges[e];
    Json x;
    x["id"] = c.id;
    x["entropy"] = entropy_json(c.entropy);
    x["capacity_bits"] = exact_json(c.capacity_bits);
    x["within_capacity"] = c.within_capacity;
    if (sim.mode == BoundMode::ZeroError) {
      x["entropy_bound"] = approx_json(c.entropy_bound);
      x["p_atypical_iid"] = exact_json(sim.edges[e].p_atypical);
      x["p_atypical_bounded"] = sim.edges[e].p_atypical_bounded;
    } else {
      x["fixed_length_ok"] = c.fixed_length_ok;
    }
    x["typical_size"] = sim.edges[e].typical_size.get_str();
    x["p_atypical_measured"] = exact_json(c.p_atypical_measured);
    edges.push_back(x);
  }
  j["edges"] = edges;
  Json leaks = Json::array();
  for (const auto& l : m.leakage) {
    Json x;
    x["alpha"] = l.alpha;
    x["bits"] = entropy_json(l.bits);
    x["factorizes"] = l.factorizes;
    x["per_symbol"] = approx_json(l.per_symbol);
    if (sim.mode == BoundMode::ZeroError) {
      x["rhs"] = approx_json(l.rhs);
      x["rhs_reversed"] = approx_json(l.rhs_reversed);
    } else {
      x["raw_bits"] = entropy_json(l.raw_bits);
      x["erasure_bound"] = approx_json(l.erasure_bound);
      x["erasure_bound_log"] = approx_json(l.erasure_bound_log);
    }
    leaks.push_back(x);
  }
  j["leakage"] = leaks;
  return j;
}

Json weak_verification_json(const WeakVerification& v) {
  Json j;
  Json leaks = Json::array();
  for (const auto& l : v.leakage) {
    Json x;
    x["name"] = l.name;
    x["bits"] = entropy_json(l.bits);
    x["per_use"] = l.per_use_exact ? exact_json(*l.per_use_exact) : approx_json(l.per_use);
    x["equals_declared"] = l.equals_declared;
    leaks.push_back(x);
  }
  j["leakage"] = leaks;
  Json errs = Json::array();
  for (const auto& e : v.errors) errs.push_back({{"sink", e.sink}, {"source", e.source}, {"probability", exact_json(e.probability)}});
  j["errors"] = errs;
  return j;
}

Json amplified_code_json(const AmplifiedCode& code) {
  Json j;
  const auto& o = code.options;
  j["L"] = o.L;
  j["blocklength"] = code.weak.blocklength;
  j["eps"] = exact_json(code.weak.eps());
  j["delta1"] = exact_json(o.delta1);
  j["delta2"] = exact_json(o.delta2);
  j["eps2"] = exact_json(o.eps2);
  j["lambda"] = code.lambda;
  j["side_policy"] = o.side == SidePolicy::Entropy ? "entropy" : "budget";
  j["hash"] = layout_name(o.hash);
  Json srcs = Json::array();
  for (const auto& sp : code.sources) {
    Json x;
    x["node"] = sp.node;
    x["rate"] = exact_json(sp.rate);
    x["n1"] = sp.n1;
    x["n2"] = sp.extractor.n2;
    x["n3"] = sp.extractor.n3;
    x["n3_target"] = exact_json(sp.n3_target);
    x["eps3"] = exact_json(sp.eps3);
    x["implied_extractor_eps"] = approx_json(sp.implied_eps);
    x["side_bits"] = sp.side_bits;
    x["side_budget"] = exact_json(sp.side_budget);
    x["side_within_budget"] = sp.side_within;
    Json syn = Json::array();
    for (auto r : sp.syndrome) syn.push_back(std::to_string(r));
    x["syndrome_rows"] = syn;
    x["sample_seed"] = sp.sample_seed;
    x["demands"] = sp.demands;
    srcs.push_back(x);
  }
  j["sources"] = srcs;
  const auto& inf = code.inflation;
  Json fi;
  fi["extra_uses"] = optional_rational(inf.extra_uses);
  fi["formula_uses"] = optional_rational(inf.formula_uses);
  fi["block_uses"] = inf.block_uses;
  fi["target"] = exact_json(inf.target);
  fi["within"] = inf.within;
  fi["note"] = inf.note;
  j["inflation"] = fi;
  return j;
}

Json amplified_evaluation_json(const AmplifiedEvaluation& ev) {
  Json j;
  j["method"] = ev.method;
  Json leaks = Json::array();
  for (const auto& l : ev.leakage) {
    Json x;
    x["name"] = l.name;
    x["bits"] = l.exact ? exact_json(*l.exact) : approx_json(l.bits, l.ci95 ? *l.ci95 : 1e-9L);
    x["given_seed"] = l.given_seed_exact ? exact_json(*l.given_seed_exact) : approx_json(l.given_seed);
    x["seed_only"] = approx_json(l.seed_only);
    x["method"] = l.method;
    if (l.ci95) x["ci95"] = static_cast<double>(*l.ci95);
    leaks.push_back(x);
  }
  j["leakage"] = leaks;
  Json srcs = Json::array();
  for (const auto& s : ev.sources) {
    Json x;
    x["node"] = s.node;
    x["dtv"] = optional_rational(s.dtv);
    x["entropy"] = approx_json(s.entropy);
    x["divergence_bits"] = approx_json(s.divergence);
    x["divergence_nats_lower"] = approx_json(s.divergence_lower, 0);
    x["pinsker_holds"] = s.pinsker_holds;
    Json e2e = Json::array();
    for (const auto& e : s.end_to_end)
      e2e.push_back({{"sink", e.sink}, {"error", optional_rational(e.error)}, {"decoding_exact", e.decoding_exact}});
    x["end_to_end"] = e2e;
    srcs.push_back(x);
  }
  j["sources"] = srcs;
  Json b = Json::array();
  for (const auto& e : ev.event_b)
    b.push_back({{"name", e.name},
                 {"typical_probability", exact_json(e.typical_probability)},
                 {"gamma", exact_json(e.gamma)},
                 {"eta", approx_json(e.eta)},
                 {"union_exponent_bound", approx_json(e.union_exponent_bound)},
                 {"hoeffding", approx_json(e.hoeffding)},
                 {"union_exponent_bound_holds", e.union_exponent_bound_holds}});
  j["event_b"] = b;
  return j;
}

}  // namespace wiretap

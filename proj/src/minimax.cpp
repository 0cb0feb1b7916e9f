#include "stablesel/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "stablesel/equivalence.hpp"
#include "stablesel/error.hpp"

namespace stablesel {

namespace {

void decode(std::size_t flat, const std::vector<int>& radices, std::vector<int>& out) {
  for (std::size_t i = radices.size(); i-- > 0;) {
    out[i] = static_cast<int>(flat % static_cast<std::size_t>(radices[i]));
    flat /= static_cast<std::size_t>(radices[i]);
  }
}

std::vector<std::size_t> strides_of(const std::vector<int>& radices) {
  std::vector<std::size_t> s(radices.size(), 1);
  for (std::size_t i = radices.size(); i-- > 1;)
    s[i - 1] = s[i] * static_cast<std::size_t>(radices[i]);
  return s;
}

}  // namespace

WorstCaseResult worst_case_risk(const DiscreteScm& scm, const std::set<std::string>& s,
                                double cap, int jobs) {
  if (jobs < 1) throw InputError("jobs must be positive");
  const ValueTable f = stable_predictor(scm, s);
  const PolicyEvaluator eval(scm, f);

  long double count_ld = 1.0L;
  for (int r : eval.digit_radices()) count_ld *= r;
  if (count_ld > static_cast<long double>(cap) || count_ld > 4.0e18L) {
    std::ostringstream msg;
    msg << "policy enumeration infeasible: " << static_cast<double>(count_ld)
        << " deterministic kernels exceed the cap of " << cap;
    throw CapError(msg.str());
  }
  unsigned long long total = 1;
  for (int r : eval.digit_radices()) total *= static_cast<unsigned long long>(r);

  struct Best {
    double risk = -1.0;
    unsigned long long idx = 0;
  };
  auto scan = [&](unsigned long long lo, unsigned long long hi) {
    Best best;
    std::vector<int> digits(eval.digit_count(), 0);
    decode(lo, eval.digit_radices(), digits);
    for (unsigned long long i = lo; i < hi; ++i) {
      const double r = eval.risk(digits);
      if (r > best.risk) {
        best.risk = r;
        best.idx = i;
      }
      // odometer step, least significant digit last
      for (std::size_t d = digits.size(); d-- > 0;) {
        if (++digits[d] < eval.digit_radices()[d]) break;
        digits[d] = 0;
      }
    }
    return best;
  };

  Best overall;
  const unsigned long long n_workers =
      std::min<unsigned long long>(static_cast<unsigned long long>(jobs), total);
  if (n_workers <= 1) {
    overall = scan(0, total);
  } else {
    std::vector<Best> results(n_workers);
    std::vector<std::thread> workers;
    for (unsigned long long w = 0; w < n_workers; ++w) {
      unsigned long long lo = total * w / n_workers;
      unsigned long long hi = total * (w + 1) / n_workers;
      workers.emplace_back([&, lo, hi, w] { results[w] = scan(lo, hi); });
    }
    for (auto& t : workers) t.join();
    overall = results[0];
    for (unsigned long long w = 1; w < n_workers; ++w)
      if (results[w].risk > overall.risk ||
          (results[w].risk == overall.risk && results[w].idx < overall.idx))
        overall = results[w];
  }

  std::vector<int> digits(eval.digit_count(), 0);
  decode(overall.idx, eval.digit_radices(), digits);
  WorstCaseResult out;
  out.risk = overall.risk;
  out.argmax = eval.unflatten(digits);
  out.policy_count = static_cast<double>(count_ld);
  return out;
}

GraphicalCondition graphical_condition(const MixedGraph& g, const ProblemSpec& spec) {
  if (g.kind() != GraphKind::dag) throw InputError("graphical condition requires a dag");
  validate_spec(g, spec);
  GraphicalCondition out;
  const auto ch_y = g.children(spec.target);
  for (const auto& m : spec.mutable_vars)
    if (ch_y.count(m)) out.xm0.insert(m);
  const auto de_incl = g.descendants(out.xm0);
  for (const auto& v : de_incl)
    if (!out.xm0.count(v)) out.w.insert(v);
  for (const auto& v : g.vertex_ids())
    if (v != spec.target && !de_incl.count(v)) out.w2.insert(v);

  bool no_child_in_w = true, no_adjacent_w = true;
  for (const auto& v : out.w) {
    if (ch_y.count(v)) no_child_in_w = false;
    if (g.adjacent(spec.target, v)) no_adjacent_w = false;
  }
  if (no_child_in_w != no_adjacent_w)
    throw InvariantError("edge and adjacency forms of the condition disagree");
  out.holds = no_adjacent_w;

  // Cross-check: intervening on xm0 and its non-child descendants leaves
  // exactly the stable children of the target inside de_incl regenerated.
  std::set<std::string> x_do = out.xm0;
  for (const auto& v : de_incl)
    if (!ch_y.count(v)) x_do.insert(v);
  const MixedGraph cut = mutilate(g, x_do);
  std::set<std::string> regen;
  for (const auto& v : cut.descendants(x_do))
    if (!x_do.count(v)) regen.insert(v);
  std::set<std::string> expected;
  for (const auto& v : de_incl)
    if (spec.stable.count(v) && ch_y.count(v)) expected.insert(v);
  if (regen != expected)
    throw InvariantError("regenerated set mismatch after cutting the descendant closure");
  return out;
}

DegenerationReport check_degeneration(const DiscreteScm& scm, double tol) {
  DegenerationReport rep;
  if (scm.spec.mutable_vars.empty()) return rep;
  const GraphicalCondition cond = graphical_condition(scm.graph, scm.spec);

  const std::vector<std::string> mvars(scm.spec.mutable_vars.begin(),
                                       scm.spec.mutable_vars.end());
  std::vector<std::string> sm;
  std::merge(scm.spec.stable.begin(), scm.spec.stable.end(), mvars.begin(), mvars.end(),
             std::back_inserter(sm));
  std::vector<int> sm_radices;
  for (const auto& v : sm) sm_radices.push_back(scm.domain(v));
  std::size_t sm_total = 1;
  for (int r : sm_radices) sm_total *= static_cast<std::size_t>(r);

  std::vector<int> m_radices;
  for (const auto& v : mvars) m_radices.push_back(scm.domain(v));
  std::size_t n_do = 1;
  for (int r : m_radices) n_do *= static_cast<std::size_t>(r);

  std::vector<ValueTable> do_tables;
  do_tables.reserve(n_do);
  {
    std::vector<int> m_config(mvars.size(), 0);
    for (std::size_t mf = 0; mf < n_do; ++mf) {
      decode(mf, m_radices, m_config);
      std::map<std::string, int> do_values;
      for (std::size_t i = 0; i < mvars.size(); ++i) do_values[mvars[i]] = m_config[i];
      do_tables.push_back(interventional_distribution(scm, do_values));
    }
  }
  // vars of every do table: sorted(stable + target)
  const auto& jd_vars = do_tables[0].vars;
  const auto jd_strides = strides_of(do_tables[0].radices);
  std::size_t y_stride = 0;
  std::vector<std::pair<std::size_t, std::size_t>> jd_from_sm;  // (sm position, stride)
  for (std::size_t i = 0; i < jd_vars.size(); ++i) {
    if (jd_vars[i] == scm.spec.target) {
      y_stride = jd_strides[i];
    } else {
      auto it = std::lower_bound(sm.begin(), sm.end(), jd_vars[i]);
      jd_from_sm.emplace_back(static_cast<std::size_t>(it - sm.begin()), jd_strides[i]);
    }
  }
  const int y_dom = scm.domain(scm.spec.target);

  std::vector<std::string> w2y(cond.w2.begin(), cond.w2.end());
  w2y.push_back(scm.spec.target);
  std::sort(w2y.begin(), w2y.end());
  std::vector<int> w2y_radices;
  for (const auto& v : w2y) w2y_radices.push_back(scm.domain(v));
  const auto w2y_strides = strides_of(w2y_radices);
  std::size_t w2y_total = 1;
  for (int r : w2y_radices) w2y_total *= static_cast<std::size_t>(r);
  std::size_t w2y_y_stride = 0;
  std::vector<std::pair<std::size_t, std::size_t>> w2y_from_sm;
  for (std::size_t i = 0; i < w2y.size(); ++i) {
    if (w2y[i] == scm.spec.target) {
      w2y_y_stride = w2y_strides[i];
    } else {
      auto it = std::lower_bound(sm.begin(), sm.end(), w2y[i]);
      w2y_from_sm.emplace_back(static_cast<std::size_t>(it - sm.begin()), w2y_strides[i]);
    }
  }

  // positions of the mutable block within sm, to pick the right do table
  std::vector<std::size_t> m_pos;
  for (const auto& v : mvars)
    m_pos.push_back(static_cast<std::size_t>(
        std::lower_bound(sm.begin(), sm.end(), v) - sm.begin()));

  for (const auto& env : scm.environments) {
    const ValueTable obs = observational_distribution(scm, env);
    std::vector<double> p_w2y(w2y_total, 0.0);
    {
      const auto obs_strides = strides_of(obs.radices);
      std::vector<std::pair<std::size_t, std::size_t>> pos;  // (obs position, w2y stride)
      for (std::size_t i = 0; i < w2y.size(); ++i) {
        auto it = std::lower_bound(obs.vars.begin(), obs.vars.end(), w2y[i]);
        pos.emplace_back(static_cast<std::size_t>(it - obs.vars.begin()), w2y_strides[i]);
      }
      std::vector<int> cfg(obs.vars.size(), 0);
      for (std::size_t flat = 0; flat < obs.values.size(); ++flat) {
        if (obs.values[flat] == 0.0) continue;
        decode(flat, obs.radices, cfg);
        std::size_t k = 0;
        for (const auto& [p, stride] : pos) k += static_cast<std::size_t>(cfg[p]) * stride;
        p_w2y[k] += obs.values[flat];
      }
    }

    std::vector<int> sm_config(sm.size(), 0);
    for (std::size_t flat = 0; flat < sm_total; ++flat) {
      decode(flat, sm_radices, sm_config);
      std::size_t mf = 0;
      for (std::size_t i = 0; i < m_pos.size(); ++i)
        mf = mf * static_cast<std::size_t>(m_radices[i]) +
             static_cast<std::size_t>(sm_config[m_pos[i]]);
      const ValueTable& jd = do_tables[mf];

      std::size_t jd_base = 0;
      for (const auto& [p, stride] : jd_from_sm)
        jd_base += static_cast<std::size_t>(sm_config[p]) * stride;
      double p_s = 0.0;
      for (int y = 0; y < y_dom; ++y)
        p_s += jd.values[jd_base + static_cast<std::size_t>(y) * y_stride];
      if (p_s == 0.0) continue;

      std::size_t w2_base = 0;
      for (const auto& [p, stride] : w2y_from_sm)
        w2_base += static_cast<std::size_t>(sm_config[p]) * stride;
      double p_w2 = 0.0;
      for (int y = 0; y < y_dom; ++y)
        p_w2 += p_w2y[w2_base + static_cast<std::size_t>(y) * w2y_y_stride];
      if (p_w2 == 0.0) continue;

      ++rep.checked;
      for (int y = 0; y < y_dom; ++y) {
        const double lhs = jd.values[jd_base + static_cast<std::size_t>(y) * y_stride] / p_s;
        const double rhs =
            p_w2y[w2_base + static_cast<std::size_t>(y) * w2y_y_stride] / p_w2;
        if (std::abs(lhs - rhs) > tol) {
          DegenerationWitness wit;
          wit.env = env;
          for (std::size_t i = 0; i < sm.size(); ++i) wit.config[sm[i]] = sm_config[i];
          wit.y = y;
          wit.interventional = lhs;
          wit.observational = rhs;
          rep.holds = false;
          rep.witness = std::move(wit);
          return rep;
        }
      }
    }
  }
  return rep;
}

SubsetSelection select_optimal_subset(const DiscreteScm& scm, double cap, int jobs) {
  SubsetSelection out;
  out.condition = graphical_condition(scm.graph, scm.spec);
  if (out.condition.holds) {
    out.chosen = scm.spec.stable;
    out.reason = "graphical-condition";
    out.risks_computed = false;
    return out;
  }
  const Partition part = recover_classes(scm.graph, scm.spec);
  for (const auto& c : part.classes)
    out.ranking.push_back(
        RankedRisk{c.representative, worst_case_risk(scm, c.representative, cap, jobs).risk});
  std::sort(out.ranking.begin(), out.ranking.end(),
            [](const RankedRisk& a, const RankedRisk& b) {
              if (a.risk != b.risk) return a.risk < b.risk;
              if (a.representative.size() != b.representative.size())
                return a.representative.size() < b.representative.size();
              return a.representative < b.representative;
            });
  out.chosen = out.ranking.front().representative;
  out.reason = "risk-minimization";
  out.risks_computed = true;
  return out;
}

DiscreteScm counterexample_scm() {
  MixedGraph g = MixedGraph::dag({"X_m", "X_s", "Y"},
                                 {{"Y", "X_m"}, {"Y", "X_s"}, {"X_m", "X_s"}});
  ProblemSpec spec{"Y", {"X_s"}, {"X_m"}};
  std::map<std::string, int> domains{{"X_m", 2}, {"X_s", 2}, {"Y", 2}};
  std::vector<double> y_values{0.0, 1.0};
  std::map<std::string, std::vector<std::vector<double>>> cpt;
  cpt["Y"] = {{0.999, 0.001}};
  // rows over (X_m, Y): a rare class flips X_s into a near-deterministic copy
  cpt["X_s"] = {{0.5, 0.5}, {0.5, 0.5}, {0.999, 0.001}, {0.001, 0.999}};
  std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> mcpt;
  mcpt["X_m"]["e1"] = {{0.9, 0.1}, {0.1, 0.9}};
  mcpt["X_m"]["e2"] = {{0.4, 0.6}, {0.8, 0.2}};
  return DiscreteScm(std::move(g), std::move(spec), std::move(domains), std::move(y_values),
                     std::move(cpt), std::move(mcpt), {"e1", "e2"});
}

}  // namespace stablesel

#include "stablesel/scm.hpp"

#include <algorithm>
#include <cmath>

#include "stablesel/error.hpp"

namespace stablesel {

namespace {

constexpr std::size_t k_max_table = std::size_t{1} << 26;

std::size_t table_size(const std::vector<int>& radices) {
  std::size_t n = 1;
  for (int r : radices) {
    if (n > k_max_table / static_cast<std::size_t>(r))
      throw CapError("joint table too large to enumerate");
    n *= static_cast<std::size_t>(r);
  }
  return n;
}

void decode(std::size_t flat, const std::vector<int>& radices, std::vector<int>& out) {
  for (std::size_t i = radices.size(); i-- > 0;) {
    out[i] = static_cast<int>(flat % static_cast<std::size_t>(radices[i]));
    flat /= static_cast<std::size_t>(radices[i]);
  }
}

// Per-variable view used by the enumeration loops: vertex index, domain,
// and sorted parent indices with their domains.
struct VarInfo {
  int idx = 0;
  int dom = 0;
  std::vector<int> parent_idx;
  std::vector<int> parent_dom;
};

VarInfo info_for(const DiscreteScm& scm, const std::string& v) {
  VarInfo vi;
  vi.idx = scm.graph.index_of(v);
  vi.dom = scm.domain(v);
  for (const auto& p : scm.sorted_parents(v)) {
    vi.parent_idx.push_back(scm.graph.index_of(p));
    vi.parent_dom.push_back(scm.domain(p));
  }
  return vi;
}

std::size_t row_of(const VarInfo& vi, const std::vector<int>& assign) {
  std::size_t r = 0;
  for (std::size_t i = 0; i < vi.parent_idx.size(); ++i)
    r = r * static_cast<std::size_t>(vi.parent_dom[i]) +
        static_cast<std::size_t>(assign[vi.parent_idx[i]]);
  return r;
}

}  // namespace

std::size_t ValueTable::index_of(const std::vector<int>& config) const {
  if (config.size() != vars.size()) throw InputError("configuration length mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (config[i] < 0 || config[i] >= radices[i])
      throw InputError("value out of domain for " + vars[i]);
    idx = idx * static_cast<std::size_t>(radices[i]) + static_cast<std::size_t>(config[i]);
  }
  return idx;
}

double ValueTable::at(const std::vector<int>& config) const { return values[index_of(config)]; }

DiscreteScm::DiscreteScm(
    MixedGraph graph_in, ProblemSpec spec_in, std::map<std::string, int> domains_in,
    std::vector<double> y_values_in, std::map<std::string, std::vector<std::vector<double>>> cpt_in,
    std::map<std::string, std::map<std::string, std::vector<std::vector<double>>>> mutable_cpt_in,
    std::vector<std::string> environments_in)
    : graph(std::move(graph_in)),
      spec(std::move(spec_in)),
      domains(std::move(domains_in)),
      y_values(std::move(y_values_in)),
      cpt(std::move(cpt_in)),
      mutable_cpt(std::move(mutable_cpt_in)),
      environments(std::move(environments_in)) {
  if (graph.kind() != GraphKind::dag) throw InputError("model graph must be a dag");
  validate_spec(graph, spec);
  for (const auto& v : graph.vertex_ids()) {
    auto it = domains.find(v);
    if (it == domains.end()) throw InputError("missing domain for " + v);
    if (it->second < 2) throw InputError("domain of " + v + " needs at least two values");
  }
  if (domains.size() != graph.vertex_count()) throw InputError("domain listed for a non-vertex");
  if (y_values.size() != static_cast<std::size_t>(domain(spec.target)))
    throw InputError("y_values length must match the target domain");
  if (environments.empty()) throw InputError("at least one environment is required");
  if (std::set<std::string>(environments.begin(), environments.end()).size() !=
      environments.size())
    throw InputError("duplicate environment name");

  std::set<std::string> fixed = spec.stable;
  fixed.insert(spec.target);
  for (const auto& [v, table] : cpt) {
    (void)table;
    if (!fixed.count(v)) throw InputError("shared table given for mutable variable " + v);
  }
  for (const auto& v : fixed)
    if (!cpt.count(v)) throw InputError("missing table for " + v);
  for (const auto& [v, envs] : mutable_cpt) {
    (void)envs;
    if (!spec.mutable_vars.count(v))
      throw InputError("per-environment table given for non-mutable variable " + v);
  }
  for (const auto& v : spec.mutable_vars)
    if (!mutable_cpt.count(v)) throw InputError("missing environment tables for " + v);

  auto check = [&](const std::string& v, std::vector<std::vector<double>>& table) {
    if (table.size() != parent_config_count(v))
      throw InputError("table for " + v + " must have one row per parent configuration");
    for (auto& row : table) {
      if (row.size() != static_cast<std::size_t>(domain(v)))
        throw InputError("row width mismatch for " + v);
      double sum = 0;
      for (double p : row) {
        if (p < 0) throw InputError("negative probability for " + v);
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw InputError("a row of " + v + " does not sum to one");
      for (double& p : row) p /= sum;
    }
  };
  for (auto& [v, table] : cpt) check(v, table);
  const std::set<std::string> want(environments.begin(), environments.end());
  for (auto& [v, envs] : mutable_cpt) {
    std::set<std::string> given;
    for (auto& [e, table] : envs) {
      given.insert(e);
      check(v, table);
    }
    if (given != want)
      throw InputError("environment tables for " + v + " do not match the environment list");
  }
}

int DiscreteScm::domain(const std::string& v) const {
  auto it = domains.find(v);
  if (it == domains.end()) throw InputError("unknown vertex: " + v);
  return it->second;
}

std::vector<std::string> DiscreteScm::sorted_parents(const std::string& v) const {
  auto ps = graph.parents(v);
  return {ps.begin(), ps.end()};
}

std::size_t DiscreteScm::parent_config_count(const std::string& v) const {
  std::size_t n = 1;
  for (const auto& p : graph.parents(v)) n *= static_cast<std::size_t>(domain(p));
  return n;
}

ValueTable interventional_distribution(const DiscreteScm& scm,
                                       const std::map<std::string, int>& do_values) {
  for (const auto& [v, x] : do_values) {
    if (!scm.spec.mutable_vars.count(v)) throw InputError("do value for non-mutable " + v);
    if (x < 0 || x >= scm.domain(v)) throw InputError("do value out of domain for " + v);
  }
  for (const auto& v : scm.spec.mutable_vars)
    if (!do_values.count(v)) throw InputError("do assignment must cover " + v);

  ValueTable out;
  for (const auto& v : scm.graph.vertex_ids())
    if (!scm.spec.mutable_vars.count(v)) {
      out.vars.push_back(v);
      out.radices.push_back(scm.domain(v));
    }
  const std::size_t total = table_size(out.radices);
  out.values.assign(total, 0.0);

  std::vector<VarInfo> infos;
  for (const auto& v : out.vars) infos.push_back(info_for(scm, v));
  std::vector<int> assign(scm.graph.vertex_count(), 0);
  for (const auto& [v, x] : do_values) assign[scm.graph.index_of(v)] = x;

  std::vector<int> config(out.vars.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    decode(flat, out.radices, config);
    for (std::size_t i = 0; i < infos.size(); ++i) assign[infos[i].idx] = config[i];
    double p = 1.0;
    for (std::size_t i = 0; i < infos.size(); ++i) {
      p *= scm.cpt.at(out.vars[i])[row_of(infos[i], assign)][config[i]];
      if (p == 0.0) break;
    }
    out.values[flat] = p;
  }
  return out;
}

ValueTable observational_distribution(const DiscreteScm& scm, const std::string& env) {
  if (std::find(scm.environments.begin(), scm.environments.end(), env) ==
      scm.environments.end())
    throw InputError("unknown environment: " + env);

  ValueTable out;
  for (const auto& v : scm.graph.vertex_ids()) {
    out.vars.push_back(v);
    out.radices.push_back(scm.domain(v));
  }
  const std::size_t total = table_size(out.radices);
  out.values.assign(total, 0.0);

  std::vector<VarInfo> infos;
  std::vector<const std::vector<std::vector<double>>*> tables;
  for (const auto& v : out.vars) {
    infos.push_back(info_for(scm, v));
    tables.push_back(scm.spec.mutable_vars.count(v) ? &scm.mutable_cpt.at(v).at(env)
                                                    : &scm.cpt.at(v));
  }
  std::vector<int> assign(scm.graph.vertex_count(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    decode(flat, out.radices, assign);
    double p = 1.0;
    for (std::size_t i = 0; i < infos.size(); ++i) {
      p *= (*tables[i])[row_of(infos[i], assign)][assign[i]];
      if (p == 0.0) break;
    }
    out.values[flat] = p;
  }
  return out;
}

ValueTable stable_predictor(const DiscreteScm& scm, const std::set<std::string>& s) {
  for (const auto& v : s)
    if (!scm.spec.stable.count(v)) throw InputError("predictor feature is not stable: " + v);

  ValueTable out;
  std::set<std::string> feat = s;
  feat.insert(scm.spec.mutable_vars.begin(), scm.spec.mutable_vars.end());
  for (const auto& v : feat) {
    out.vars.push_back(v);
    out.radices.push_back(scm.domain(v));
  }
  out.values.assign(table_size(out.radices), 0.0);

  std::vector<std::string> mut(scm.spec.mutable_vars.begin(), scm.spec.mutable_vars.end());
  std::vector<int> mut_radices;
  for (const auto& v : mut) mut_radices.push_back(scm.domain(v));
  const std::size_t n_do = table_size(mut_radices);

  std::vector<int> do_config(mut.size(), 0);
  for (std::size_t do_flat = 0; do_flat < n_do; ++do_flat) {
    decode(do_flat, mut_radices, do_config);
    std::map<std::string, int> do_values;
    for (std::size_t i = 0; i < mut.size(); ++i) do_values[mut[i]] = do_config[i];
    ValueTable joint = interventional_distribution(scm, do_values);

    std::vector<std::size_t> s_pos;
    std::vector<int> s_radices;
    int y_pos = -1;
    for (std::size_t i = 0; i < joint.vars.size(); ++i) {
      if (s.count(joint.vars[i])) {
        s_pos.push_back(i);
        s_radices.push_back(joint.radices[i]);
      }
      if (joint.vars[i] == scm.spec.target) y_pos = static_cast<int>(i);
    }
    const std::size_t n_s = table_size(s_radices);
    std::vector<double> num(n_s, 0.0), den(n_s, 0.0);
    double mean_num = 0.0, mean_den = 0.0;

    std::vector<int> config(joint.vars.size(), 0);
    for (std::size_t flat = 0; flat < joint.values.size(); ++flat) {
      const double p = joint.values[flat];
      if (p == 0.0) continue;
      decode(flat, joint.radices, config);
      std::size_t si = 0;
      for (std::size_t i = 0; i < s_pos.size(); ++i)
        si = si * static_cast<std::size_t>(s_radices[i]) +
             static_cast<std::size_t>(config[s_pos[i]]);
      const double yv = scm.y_values[config[y_pos]];
      num[si] += p * yv;
      den[si] += p;
      mean_num += p * yv;
      mean_den += p;
    }
    const double fallback = mean_den > 0.0 ? mean_num / mean_den : 0.0;

    std::vector<std::string> s_sorted(s.begin(), s.end());
    std::vector<int> s_config(s_sorted.size(), 0);
    std::vector<int> f_config(out.vars.size(), 0);
    for (std::size_t si = 0; si < n_s; ++si) {
      decode(si, s_radices, s_config);
      for (std::size_t i = 0; i < out.vars.size(); ++i) {
        auto sit = std::find(s_sorted.begin(), s_sorted.end(), out.vars[i]);
        if (sit != s_sorted.end()) {
          f_config[i] = s_config[sit - s_sorted.begin()];
        } else {
          auto mit = std::find(mut.begin(), mut.end(), out.vars[i]);
          f_config[i] = do_config[mit - mut.begin()];
        }
      }
      out.values[out.index_of(f_config)] = den[si] > 0.0 ? num[si] / den[si] : fallback;
    }
  }
  return out;
}

double policy_risk(const DiscreteScm& scm, const ValueTable& f, const Policy& policy) {
  PolicyEvaluator eval(scm, f);
  return eval.risk(eval.flatten(policy));
}

namespace {

std::size_t parent_row(const std::vector<int>& parent_idx, const std::vector<int>& parent_dom,
                       const std::vector<int>& assign) {
  std::size_t r = 0;
  for (std::size_t i = 0; i < parent_idx.size(); ++i)
    r = r * static_cast<std::size_t>(parent_dom[i]) +
        static_cast<std::size_t>(assign[parent_idx[i]]);
  return r;
}

}  // namespace

PolicyEvaluator::PolicyEvaluator(const DiscreteScm& scm, const ValueTable& f)
    : scm_(&scm), f_(&f) {
  n_vars_ = static_cast<int>(scm.graph.vertex_count());
  for (const auto& v : topological_order(scm.graph)) {
    if (!scm.spec.mutable_vars.count(v)) continue;
    const VarInfo vi = info_for(scm, v);
    mutable_names_.push_back(v);
    mutable_idx_.push_back(vi.idx);
    mutable_dom_.push_back(vi.dom);
    mutable_offset_.push_back(static_cast<int>(digit_radices_.size()));
    mutable_parent_idx_.push_back(vi.parent_idx);
    mutable_parent_dom_.push_back(vi.parent_dom);
    for (std::size_t r = 0; r < scm.parent_config_count(v); ++r)
      digit_radices_.push_back(vi.dom);
  }
  for (const auto& v : scm.graph.vertex_ids()) {
    if (scm.spec.mutable_vars.count(v)) continue;
    const VarInfo vi = info_for(scm, v);
    enum_idx_.push_back(vi.idx);
    enum_radices_.push_back(vi.dom);
    enum_tables_.push_back(&scm.cpt.at(v));
    enum_parent_idx_.push_back(vi.parent_idx);
    enum_parent_dom_.push_back(vi.parent_dom);
  }
  enum_total_ = table_size(enum_radices_);

  std::size_t expect = 1;
  for (const auto& v : f.vars) expect *= static_cast<std::size_t>(scm.domain(v));
  if (f.values.size() != expect || f.radices.size() != f.vars.size())
    throw InputError("predictor table shape mismatch");
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    f_pos_.push_back(scm.graph.index_of(f.vars[i]));
    f_radices_.push_back(f.radices[i]);
  }
  y_idx_ = scm.graph.index_of(scm.spec.target);
}

std::vector<int> PolicyEvaluator::flatten(const Policy& policy) const {
  for (const auto& [v, vals] : policy) {
    (void)vals;
    if (!scm_->spec.mutable_vars.count(v))
      throw InputError("policy entry for non-mutable variable " + v);
  }
  std::vector<int> digits(digit_radices_.size(), 0);
  for (std::size_t i = 0; i < mutable_names_.size(); ++i) {
    auto it = policy.find(mutable_names_[i]);
    if (it == policy.end()) throw InputError("policy missing for " + mutable_names_[i]);
    const std::size_t rows = scm_->parent_config_count(mutable_names_[i]);
    if (it->second.size() != rows)
      throw InputError("policy for " + mutable_names_[i] +
                       " needs one value per parent configuration");
    for (std::size_t r = 0; r < rows; ++r) {
      int x = it->second[r];
      if (x < 0 || x >= mutable_dom_[i])
        throw InputError("policy value out of domain for " + mutable_names_[i]);
      digits[mutable_offset_[i] + r] = x;
    }
  }
  return digits;
}

Policy PolicyEvaluator::unflatten(const std::vector<int>& digits) const {
  if (digits.size() != digit_radices_.size()) throw InputError("policy digit length mismatch");
  Policy out;
  for (std::size_t i = 0; i < mutable_names_.size(); ++i) {
    const std::size_t rows = scm_->parent_config_count(mutable_names_[i]);
    out[mutable_names_[i]] = std::vector<int>(digits.begin() + mutable_offset_[i],
                                              digits.begin() + mutable_offset_[i] + rows);
  }
  return out;
}

double PolicyEvaluator::risk(const std::vector<int>& digits) const {
  if (digits.size() != digit_radices_.size()) throw InputError("policy digit length mismatch");
  std::vector<int> assign(n_vars_, 0);
  std::vector<int> config(enum_radices_.size(), 0);
  double total = 0.0;
  for (std::size_t flat = 0; flat < enum_total_; ++flat) {
    decode(flat, enum_radices_, config);
    for (std::size_t i = 0; i < enum_idx_.size(); ++i) assign[enum_idx_[i]] = config[i];
    for (std::size_t i = 0; i < mutable_idx_.size(); ++i)
      assign[mutable_idx_[i]] =
          digits[mutable_offset_[i] +
                 static_cast<int>(parent_row(mutable_parent_idx_[i], mutable_parent_dom_[i],
                                             assign))];
    double p = 1.0;
    for (std::size_t i = 0; i < enum_idx_.size(); ++i) {
      p *= (*enum_tables_[i])[parent_row(enum_parent_idx_[i], enum_parent_dom_[i], assign)]
                             [config[i]];
      if (p == 0.0) break;
    }
    if (p == 0.0) continue;
    std::size_t fi = 0;
    for (std::size_t i = 0; i < f_pos_.size(); ++i)
      fi = fi * static_cast<std::size_t>(f_radices_[i]) +
           static_cast<std::size_t>(assign[f_pos_[i]]);
    const double d = scm_->y_values[assign[y_idx_]] - f_->values[fi];
    total += p * d * d;
  }
  return total;
}

}  // namespace stablesel

#include "qsde/cli/config.hpp"

#include <array>
#include <cmath>
#include <set>

#include <json.hpp>

#include "qsde/slh.hpp"

namespace qsde::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 7> kModes{{
    {Mode::Belavkin, "belavkin"},
    {Mode::Gisin, "gisin"},
    {Mode::CanonicalPair, "canonical-pair"},
    {Mode::Feedback, "feedback"},
    {Mode::Lindblad, "lindblad"},
    {Mode::DetuningSweep, "detuning-sweep"},
    {Mode::Prop2Check, "prop2-check"},
}};

std::string idx(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }
std::string key(const std::string& field, std::string_view k) {
  return field.empty() ? std::string(k) : field + "." + std::string(k);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& field) {
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError(key(field, k), "unknown key");
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  return j.get<std::int64_t>();
}

Complex parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {get_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], idx(field, 0)), get_number(j[1], idx(field, 1))};
  throw ConfigError(field, "expected a number or a [re, im] pair");
}

json complex_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

Operator parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of rows");
  const auto n = static_cast<Index>(j.size());
  Operator m(n, n);
  for (Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rf = idx(field, static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw ConfigError(rf, "matrix must be square (" + std::to_string(n) + " entries per row)");
    }
    for (Index c = 0; c < n; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], idx(rf, static_cast<std::size_t>(c)));
  }
  return m;
}

json matrix_json(const Operator& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexVector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = parse_complex(j[i], idx(field, i));
  return v;
}

json vector_json(const ComplexVector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v[i]));
  return a;
}

std::vector<Operator> parse_matrix_list(const json& j, const std::string& field, Index dim) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty list of matrices");
  std::vector<Operator> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = idx(field, i);
    out.push_back(j[i].is_string() ? named_operator(j[i].get<std::string>(), dim, f) : parse_matrix(j[i], f));
    if (out.back().rows() != dim) throw ConfigError(f, "dimension differs from the Hamiltonian");
  }
  return out;
}

void require_hermitian(const Operator& h, const std::string& field) {
  if (!is_hermitian(h)) throw ConfigError(field, "declared Hamiltonian is not hermitian");
}

StateVector parse_state(const json& j, Index dim, const std::string& field) {
  StateVector psi;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "ground") {
      psi = StateVector::Zero(dim);
      psi[0] = 1.0;
    } else if (s == "excited" && dim == 2) {
      psi = qubit::excited();
    } else if (s == "plus" && dim == 2) {
      psi = qubit::plus();
    } else {
      throw ConfigError(field, "unknown state name '" + s + "'");
    }
  } else {
    psi = parse_vector(j, field);
  }
  if (psi.size() != dim) throw ConfigError(field, "state dimension differs from the model");
  if (psi.norm() < kZeroNormGuard) throw ConfigError(field, "state has zero norm");
  return psi / psi.norm();
}

ModelConfig parse_model(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  ModelConfig m;
  if (j.contains("preset")) {
    reject_unknown(j, {"preset", "gamma", "delta", "drive", "eps", "levels", "psi0"}, field);
    if (!j["preset"].is_string()) throw ConfigError(key(field, "preset"), "expected a string");
    m.preset = j["preset"].get<std::string>();
    if (j.contains("gamma")) m.gamma = get_number(j["gamma"], key(field, "gamma"));
    if (j.contains("delta")) m.delta = get_number(j["delta"], key(field, "delta"));
    if (j.contains("drive")) m.drive = get_number(j["drive"], key(field, "drive"));
    if (j.contains("eps")) m.eps = get_number(j["eps"], key(field, "eps"));
    if (j.contains("levels")) m.levels = get_integer(j["levels"], key(field, "levels"));
    if (!(m.gamma > 0.0)) throw ConfigError(key(field, "gamma"), "must be positive");
    expand_preset(m);
  } else {
    reject_unknown(j, {"couplings", "hamiltonian", "psi0"}, field);
    if (!j.contains("hamiltonian")) throw ConfigError(key(field, "hamiltonian"), "required for inline models");
    if (!j.contains("couplings")) throw ConfigError(key(field, "couplings"), "required for inline models");
    m.hamiltonian = parse_matrix(j["hamiltonian"], key(field, "hamiltonian"));
    require_hermitian(m.hamiltonian, key(field, "hamiltonian"));
    m.couplings = parse_matrix_list(j["couplings"], key(field, "couplings"), m.hamiltonian.rows());
    m.psi0 = StateVector::Zero(m.hamiltonian.rows());
    m.psi0[0] = 1.0;
  }
  if (j.contains("psi0")) m.psi0 = parse_state(j["psi0"], m.hamiltonian.rows(), key(field, "psi0"));
  return m;
}

json model_json(const ModelConfig& m) {
  json j;
  if (!m.preset.empty()) {
    j["preset"] = m.preset;
    j["gamma"] = m.gamma;
    if (m.preset == "driven-qubit") {
      j["delta"] = m.delta;
      j["drive"] = m.drive;
    } else if (m.preset == "cavity-truncated") {
      j["delta"] = m.delta;
      j["eps"] = m.eps;
      j["levels"] = m.levels;
    }
  } else {
    json cs = json::array();
    for (const auto& c : m.couplings) cs.push_back(matrix_json(c));
    j["couplings"] = std::move(cs);
    j["hamiltonian"] = matrix_json(m.hamiltonian);
  }
  j["psi0"] = vector_json(m.psi0);
  return j;
}

std::vector<NamedObservable> parse_observables(const json& j, Index dim, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected a list");
  std::vector<NamedObservable> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = idx(field, i);
    NamedObservable o;
    if (j[i].is_string()) {
      o.name = j[i].get<std::string>();
      o.op = named_operator(o.name, dim, f);
    } else if (j[i].is_object()) {
      reject_unknown(j[i], {"name", "matrix"}, f);
      if (!j[i].contains("name") || !j[i]["name"].is_string()) throw ConfigError(key(f, "name"), "expected a string");
      o.name = j[i]["name"].get<std::string>();
      if (!j[i].contains("matrix")) throw ConfigError(key(f, "matrix"), "required");
      o.op = parse_matrix(j[i]["matrix"], key(f, "matrix"));
      if (o.op.rows() != dim) throw ConfigError(key(f, "matrix"), "dimension differs from the model");
    } else {
      throw ConfigError(f, "expected a name or {name, matrix}");
    }
    if (o.name.empty() || o.name.find_first_of("\t\n ") != std::string::npos) {
      throw ConfigError(f, "observable names must be non-empty without whitespace");
    }
    if (!seen.insert(o.name).second) throw ConfigError(f, "duplicate observable name '" + o.name + "'");
    out.push_back(std::move(o));
  }
  return out;
}

NetworkConfig parse_network(const json& j, Index dim, std::size_t n_channels, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  reject_unknown(j, {"components", "series"}, field);
  NetworkConfig net;
  const std::string cf = key(field, "components");
  if (!j.contains("components") || !j["components"].is_array()) throw ConfigError(cf, "expected a list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < j["components"].size(); ++i) {
    const json& c = j["components"][i];
    const std::string f = idx(cf, i);
    if (!c.is_object()) throw ConfigError(f, "expected an object");
    NetworkComponent comp;
    if (!c.contains("name") || !c["name"].is_string()) throw ConfigError(key(f, "name"), "expected a string");
    if (!c.contains("type") || !c["type"].is_string()) throw ConfigError(key(f, "type"), "expected a string");
    comp.name = c["name"].get<std::string>();
    comp.type = c["type"].get<std::string>();
    if (comp.type == "system") {
      reject_unknown(c, {"name", "type"}, f);
    } else if (comp.type == "weyl") {
      reject_unknown(c, {"name", "type", "beta"}, f);
      if (!c.contains("beta")) throw ConfigError(key(f, "beta"), "required");
      comp.beta = parse_vector(c["beta"], key(f, "beta"));
    } else if (comp.type == "triple") {
      reject_unknown(c, {"name", "type", "couplings", "hamiltonian"}, f);
      if (!c.contains("hamiltonian")) throw ConfigError(key(f, "hamiltonian"), "required");
      comp.hamiltonian = parse_matrix(c["hamiltonian"], key(f, "hamiltonian"));
      require_hermitian(comp.hamiltonian, key(f, "hamiltonian"));
      if (comp.hamiltonian.rows() != dim) throw ConfigError(key(f, "hamiltonian"), "dimension differs from the model");
      if (!c.contains("couplings")) throw ConfigError(key(f, "couplings"), "required");
      comp.couplings = parse_matrix_list(c["couplings"], key(f, "couplings"), dim);
    } else if (comp.type == "euclidean") {
      reject_unknown(c, {"name", "type", "u", "beta", "epsilon"}, f);
      if (!c.contains("u")) throw ConfigError(key(f, "u"), "required");
      comp.u = parse_matrix(c["u"], key(f, "u"));
      if (!is_unitary(comp.u, 1e-12)) throw ConfigError(key(f, "u"), "not unitary within 1e-12");
      comp.beta = c.contains("beta") ? parse_vector(c["beta"], key(f, "beta"))
                                     : ComplexVector(ComplexVector::Zero(comp.u.rows()));
      if (c.contains("epsilon")) comp.epsilon = get_number(c["epsilon"], key(f, "epsilon"));
    } else {
      throw ConfigError(key(f, "type"), "unknown component type '" + comp.type + "'");
    }
    const std::size_t ch = comp.type == "weyl"        ? static_cast<std::size_t>(comp.beta.size())
                           : comp.type == "triple"    ? comp.couplings.size()
                           : comp.type == "euclidean" ? static_cast<std::size_t>(comp.u.rows())
                                                      : n_channels;
    if (ch != n_channels) throw ConfigError(f, "channel count differs from the model");
    if (comp.type == "euclidean" && comp.beta.size() != comp.u.rows()) {
      throw ConfigError(key(f, "beta"), "one entry per channel required");
    }
    if (!names.insert(comp.name).second) throw ConfigError(key(f, "name"), "duplicate component name");
    net.components.push_back(std::move(comp));
  }
  const std::string sf = key(field, "series");
  if (!j.contains("series") || !j["series"].is_array() || j["series"].empty()) {
    throw ConfigError(sf, "expected a non-empty list of component names");
  }
  for (std::size_t i = 0; i < j["series"].size(); ++i) {
    if (!j["series"][i].is_string()) throw ConfigError(idx(sf, i), "expected a component name");
    auto n = j["series"][i].get<std::string>();
    if (!names.count(n)) throw ConfigError(idx(sf, i), "no component named '" + n + "'");
    net.series.push_back(std::move(n));
  }
  return net;
}

json network_json(const NetworkConfig& net) {
  json comps = json::array();
  for (const auto& c : net.components) {
    json j{{"name", c.name}, {"type", c.type}};
    if (c.type == "weyl") j["beta"] = vector_json(c.beta);
    if (c.type == "triple") {
      json cs = json::array();
      for (const auto& l : c.couplings) cs.push_back(matrix_json(l));
      j["couplings"] = std::move(cs);
      j["hamiltonian"] = matrix_json(c.hamiltonian);
    }
    if (c.type == "euclidean") {
      j["u"] = matrix_json(c.u);
      j["beta"] = vector_json(c.beta);
      j["epsilon"] = c.epsilon;
    }
    comps.push_back(std::move(j));
  }
  return json{{"components", std::move(comps)}, {"series", net.series}};
}

}  // namespace

std::string mode_name(Mode m) {
  for (const auto& [mode, name] : kModes) {
    if (mode == m) return std::string(name);
  }
  return "unknown";
}

Mode parse_mode(std::string_view name, const std::string& field) {
  for (const auto& [mode, n] : kModes) {
    if (n == name) return mode;
  }
  throw ConfigError(field, "unknown mode '" + std::string(name) + "'");
}

Operator named_operator(std::string_view name, Index dim, const std::string& field) {
  if (name == "identity") return Operator::Identity(dim, dim);
  if (name == "a") return fock::annihilation(dim);
  if (name == "a_dag") return fock::annihilation(dim).adjoint();
  if (name == "number") return fock::number(dim);
  if (dim == 2) {
    if (name == "sigma_x") return qubit::sigma_x();
    if (name == "sigma_y") return qubit::sigma_y();
    if (name == "sigma_z") return qubit::sigma_z();
    if (name == "sigma_minus") return qubit::sigma_minus();
    if (name == "sigma_plus") return qubit::sigma_plus();
  }
  throw ConfigError(field, "unknown operator '" + std::string(name) + "' for dimension " + std::to_string(dim));
}

void expand_preset(ModelConfig& m) {
  const double sg = std::sqrt(m.gamma);
  if (m.preset == "qubit-decay") {
    m.couplings = {sg * qubit::sigma_minus()};
    m.hamiltonian = Operator::Zero(2, 2);
    m.psi0 = qubit::excited();
  } else if (m.preset == "driven-qubit") {
    m.couplings = {sg * qubit::sigma_minus()};
    m.hamiltonian = 0.5 * m.delta * qubit::sigma_z() + 0.5 * m.drive * qubit::sigma_x();
    m.psi0 = qubit::plus();
  } else if (m.preset == "cavity-truncated") {
    if (m.levels < 2) throw ConfigError("model.levels", "need at least 2 levels");
    const Operator a = fock::annihilation(m.levels);
    m.couplings = {sg * a};
    m.hamiltonian = m.delta * fock::number(m.levels) + m.eps * (a + a.adjoint());
    m.psi0 = fock::basis(m.levels, 0);
  } else {
    throw ConfigError("model.preset", "unknown preset '" + m.preset + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "top level must be an object");
  reject_unknown(j,
                 {"mode", "model", "dt", "t_max", "n_traj", "base_seed", "observables", "output_path", "canonical",
                  "residual_tolerance", "detuning", "network", "dump_paths", "dump_states", "parallel"},
                 "");

  ExperimentConfig c;
  if (!j.contains("mode") || !j["mode"].is_string()) throw ConfigError("mode", "required string");
  c.mode = parse_mode(j["mode"].get<std::string>());
  if (!j.contains("model")) throw ConfigError("model", "required");
  c.model = parse_model(j["model"], "model");
  const Index dim = c.model.hamiltonian.rows();

  if (j.contains("dt")) c.dt = get_number(j["dt"], "dt");
  if (j.contains("t_max")) c.t_max = get_number(j["t_max"], "t_max");
  if (!(c.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (!(c.t_max >= c.dt)) throw ConfigError("t_max", "must be at least dt");
  if (j.contains("n_traj")) {
    const auto n = get_integer(j["n_traj"], "n_traj");
    if (n < 1) throw ConfigError("n_traj", "must be at least 1");
    c.n_traj = static_cast<std::size_t>(n);
  }
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_unsigned()) {
      throw ConfigError("base_seed", "expected a non-negative integer");
    }
    c.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  if (j.contains("observables")) {
    c.observables = parse_observables(j["observables"], dim, "observables");
  } else {
    c.observables = parse_observables(json::array({dim == 2 ? "sigma_z" : "number"}), dim, "observables");
  }
  if (j.contains("output_path")) {
    if (!j["output_path"].is_string()) throw ConfigError("output_path", "expected a string");
    c.output_path = j["output_path"].get<std::string>();
  }
  if (j.contains("canonical")) {
    const json& k = j["canonical"];
    if (!k.is_object()) throw ConfigError("canonical", "expected an object");
    reject_unknown(k, {"n", "phi", "sign"}, "canonical");
    if (k.contains("n")) {
      const auto n = get_integer(k["n"], "canonical.n");
      if (n < 2) throw ConfigError("canonical.n", "must be at least 2");
      c.canonical_n = static_cast<int>(n);
    }
    if (k.contains("phi")) c.canonical_phi = get_number(k["phi"], "canonical.phi");
    if (k.contains("sign")) {
      const auto s = get_integer(k["sign"], "canonical.sign");
      if (s != 1 && s != -1) throw ConfigError("canonical.sign", "must be +1 or -1");
      c.canonical_sign = static_cast<int>(s);
    }
  }
  if (j.contains("residual_tolerance")) {
    c.residual_tolerance = get_number(j["residual_tolerance"], "residual_tolerance");
    if (!(c.residual_tolerance > 0.0)) throw ConfigError("residual_tolerance", "must be positive");
  }
  if (j.contains("detuning")) {
    const json& d = j["detuning"];
    if (!d.is_object()) throw ConfigError("detuning", "expected an object");
    reject_unknown(d, {"omegas", "phi"}, "detuning");
    if (d.contains("omegas")) {
      if (!d["omegas"].is_array() || d["omegas"].empty()) throw ConfigError("detuning.omegas", "expected a non-empty list");
      c.omegas.clear();
      for (std::size_t i = 0; i < d["omegas"].size(); ++i) {
        c.omegas.push_back(get_number(d["omegas"][i], idx("detuning.omegas", i)));
      }
    }
    if (d.contains("phi")) c.detuning_phi = get_number(d["phi"], "detuning.phi");
  }
  if (j.contains("network")) c.network = parse_network(j["network"], dim, c.model.couplings.size(), "network");
  for (const char* flag : {"dump_paths", "dump_states", "parallel"}) {
    if (!j.contains(flag)) continue;
    if (!j[flag].is_boolean()) throw ConfigError(flag, "expected true or false");
    const bool v = j[flag].get<bool>();
    if (std::string_view(flag) == "dump_paths") c.dump_paths = v;
    if (std::string_view(flag) == "dump_states") c.dump_states = v;
    if (std::string_view(flag) == "parallel") c.parallel = v;
  }

  if ((c.mode == Mode::CanonicalPair || c.mode == Mode::Prop2Check || c.mode == Mode::Feedback ||
       c.mode == Mode::DetuningSweep) &&
      c.model.couplings.size() != 1) {
    throw ConfigError("model.couplings", "mode " + mode_name(c.mode) + " needs exactly one coupling R");
  }
  if (c.mode != Mode::Belavkin && c.mode != Mode::Gisin && c.mode != Mode::Lindblad && c.network) {
    throw ConfigError("network", "only belavkin, gisin and lindblad modes accept a network");
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  json j;
  j["mode"] = mode_name(c.mode);
  j["model"] = model_json(c.model);
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["n_traj"] = c.n_traj;
  j["base_seed"] = c.base_seed;
  json obs = json::array();
  for (const auto& o : c.observables) obs.push_back(json{{"name", o.name}, {"matrix", matrix_json(o.op)}});
  j["observables"] = std::move(obs);
  j["output_path"] = c.output_path;
  j["canonical"] = json{{"n", c.canonical_n}, {"phi", c.canonical_phi}, {"sign", c.canonical_sign}};
  j["residual_tolerance"] = c.residual_tolerance;
  j["detuning"] = json{{"omegas", c.omegas}, {"phi", c.detuning_phi}};
  if (c.network) j["network"] = network_json(*c.network);
  j["dump_paths"] = c.dump_paths;
  j["dump_states"] = c.dump_states;
  j["parallel"] = c.parallel;
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  // The output path and the parallel flag do not change the numbers.
  ExperimentConfig copy = config;
  copy.output_path.clear();
  copy.parallel = true;
  const std::string s = serialize_config(copy);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ModelSpec effective_model(const ExperimentConfig& config) {
  std::vector<TimeOperator> ls(config.model.couplings.begin(), config.model.couplings.end());
  const ModelSpec base(std::move(ls), TimeOperator(config.model.hamiltonian));
  if (!config.network) return base;

  const Index dim = config.model.hamiltonian.rows();
  auto build = [&](const NetworkComponent& c) -> SLHTriple {
    if (c.type == "system") return SLHTriple::unscattered(base.couplings(), base.hamiltonian());
    if (c.type == "weyl") return weyl_box(c.beta, dim);
    if (c.type == "triple") {
      return SLHTriple::unscattered(std::vector<TimeOperator>(c.couplings.begin(), c.couplings.end()),
                                    TimeOperator(c.hamiltonian));
    }
    return EuclideanElement(c.u, c.beta, c.epsilon).as_triple(dim);
  };
  auto find = [&](const std::string& name) -> const NetworkComponent& {
    for (const auto& c : config.network->components) {
      if (c.name == name) return c;
    }
    throw ConfigError("network.series", "no component named '" + name + "'");
  };
  SLHTriple g = build(find(config.network->series.front()));
  for (std::size_t i = 1; i < config.network->series.size(); ++i) g = series_product(build(find(config.network->series[i])), g);
  return to_model(g);
}

}  // namespace qsde::cli

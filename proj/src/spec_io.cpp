#include "congflow/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "congflow/errors.hpp"

namespace congflow {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object()) throw SpecError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw SpecError(where + ": unknown key \"" + key + "\"");
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) throw SpecError(where + ": missing key \"" + key + "\"");
  }
}

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SpecError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError(where + ": non-finite number");
  return v;
}

int int_number(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SpecError(where + ": expected an integer");
  return j.get<int>();
}

Complex complex_from(const json& j, const std::string& where) {
  require_keys(j, where, {"re", "im"}, {"re", "im"});
  return {finite_number(j.at("re"), where + ".re"), finite_number(j.at("im"), where + ".im")};
}

CongruenceSpec parse_congruence(const json& j) {
  require_keys(j, "congruence", {"rank", "F", "xi", "eta", "xi0"}, {"rank"});
  const int rank = int_number(j.at("rank"), "congruence.rank");
  switch (rank) {
    case 2: {
      if (!j.contains("F")) throw SpecError("congruence: rank 2 requires \"F\"");
      if (j.contains("xi") || j.contains("eta") || j.contains("xi0")) {
        throw SpecError("congruence: rank 2 admits only \"F\"");
      }
      std::vector<BiPoly::Term> terms;
      for (const auto& t : j.at("F")) {
        require_keys(t, "congruence.F[]", {"i", "j", "re", "im"}, {"i", "j", "re", "im"});
        terms.push_back({int_number(t.at("i"), "F.i"), int_number(t.at("j"), "F.j"),
                         Complex{finite_number(t.at("re"), "F.re"),
                                 finite_number(t.at("im"), "F.im")}});
      }
      try {
        return CongruenceSpec::rank2(BiPoly(std::move(terms)));
      } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("congruence: ") + e.what());
      }
    }
    case 1: {
      if (!j.contains("xi") || !j.contains("eta")) {
        throw SpecError("congruence: rank 1 requires \"xi\" and \"eta\"");
      }
      if (j.contains("F") || j.contains("xi0")) {
        throw SpecError("congruence: rank 1 admits only \"xi\" and \"eta\"");
      }
      std::vector<CurvePoly::Term> xi_terms;
      for (const auto& t : j.at("xi")) {
        require_keys(t, "congruence.xi[]", {"k", "re", "im"}, {"k", "re", "im"});
        xi_terms.push_back({int_number(t.at("k"), "xi.k"),
                            Complex{finite_number(t.at("re"), "xi.re"),
                                    finite_number(t.at("im"), "xi.im")}});
      }
      std::vector<SheetPoly::Term> eta_terms;
      for (const auto& t : j.at("eta")) {
        require_keys(t, "congruence.eta[]", {"k", "l", "re", "im"}, {"k", "l", "re", "im"});
        eta_terms.push_back({int_number(t.at("k"), "eta.k"), int_number(t.at("l"), "eta.l"),
                             Complex{finite_number(t.at("re"), "eta.re"),
                                     finite_number(t.at("im"), "eta.im")}});
      }
      try {
        return CongruenceSpec::rank1(CurvePoly(std::move(xi_terms)),
                                     SheetPoly(std::move(eta_terms)));
      } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("congruence: ") + e.what());
      }
    }
    case 0: {
      if (!j.contains("xi0")) throw SpecError("congruence: rank 0 requires \"xi0\"");
      if (j.contains("F") || j.contains("xi") || j.contains("eta")) {
        throw SpecError("congruence: rank 0 admits only \"xi0\"");
      }
      return CongruenceSpec::rank0(complex_from(j.at("xi0"), "congruence.xi0"));
    }
    default:
      throw SpecError("congruence.rank: must be 0, 1 or 2");
  }
}

TimeSignal parse_time_signal(const json& j) {
  require_keys(j, "flow.H", {"constant", "poly", "sinusoids"}, {});
  double constant = 0.0;
  std::vector<TimeSignal::PolyTerm> poly;
  std::vector<TimeSignal::Sinusoid> sin;
  if (j.contains("constant")) constant = finite_number(j.at("constant"), "flow.H.constant");
  if (j.contains("poly")) {
    for (const auto& t : j.at("poly")) {
      if (!t.is_array() || t.size() != 2) {
        throw SpecError("flow.H.poly[]: expected [power, coeff] pairs");
      }
      poly.push_back({int_number(t.at(0), "flow.H.poly power"),
                      finite_number(t.at(1), "flow.H.poly coeff")});
    }
  }
  if (j.contains("sinusoids")) {
    for (const auto& t : j.at("sinusoids")) {
      if (!t.is_array() || t.size() != 3) {
        throw SpecError("flow.H.sinusoids[]: expected [amplitude, omega, phase] triples");
      }
      sin.push_back({finite_number(t.at(0), "flow.H amplitude"),
                     finite_number(t.at(1), "flow.H omega"),
                     finite_number(t.at(2), "flow.H phase")});
    }
  }
  try {
    return TimeSignal(constant, std::move(poly), std::move(sin));
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("flow.H: ") + e.what());
  }
}

FlowSpec parse_flow(const json& j) {
  require_keys(j, "flow", {"H", "K", "p0", "pressure_form"}, {"pressure_form"});
  FlowSpec f;
  if (j.contains("H")) f.H = parse_time_signal(j.at("H"));
  if (j.contains("K")) {
    std::vector<SheetPoly::Term> terms;
    for (const auto& t : j.at("K")) {
      require_keys(t, "flow.K[]", {"k", "l", "c"}, {"k", "l", "c"});
      terms.push_back({int_number(t.at("k"), "K.k"), int_number(t.at("l"), "K.l"),
                       Complex{finite_number(t.at("c"), "K.c"), 0.0}});
    }
    f.K = SheetPoly(std::move(terms));
  }
  if (j.contains("p0")) f.p0 = finite_number(j.at("p0"), "flow.p0");
  if (!j.at("pressure_form").is_string()) throw SpecError("flow.pressure_form: expected a string");
  f.pressure_form = pressure_form_from_string(j.at("pressure_form").get<std::string>());
  return f;
}

SamplingSpec parse_sampling(const json& j) {
  require_keys(j, "sampling", {"box", "grid", "fd_step", "time"}, {"box"});
  SamplingSpec s;
  const auto& box = j.at("box");
  if (!box.is_array() || box.size() != 3) throw SpecError("sampling.box: expected three intervals");
  for (int axis = 0; axis < 3; ++axis) {
    const auto& iv = box.at(axis);
    if (!iv.is_array() || iv.size() != 2) {
      throw SpecError("sampling.box[]: expected [lo, hi]");
    }
    s.box[axis][0] = finite_number(iv.at(0), "sampling.box lo");
    s.box[axis][1] = finite_number(iv.at(1), "sampling.box hi");
    if (!(s.box[axis][0] <= s.box[axis][1])) throw SpecError("sampling.box: lo must be <= hi");
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_array() || g.size() != 3) throw SpecError("sampling.grid: expected three counts");
    for (int axis = 0; axis < 3; ++axis) {
      s.grid[axis] = int_number(g.at(axis), "sampling.grid");
      if (s.grid[axis] < 1) throw SpecError("sampling.grid: counts must be positive");
    }
  }
  if (j.contains("fd_step")) {
    s.fd_step = finite_number(j.at("fd_step"), "sampling.fd_step");
    if (!(s.fd_step >= 1e-9 && s.fd_step <= 1e-2)) {
      throw SpecError("sampling.fd_step: outside [1e-9, 1e-2]");
    }
  }
  if (j.contains("time")) {
    s.times.clear();
    for (const auto& t : j.at("time")) s.times.push_back(finite_number(t, "sampling.time"));
    if (s.times.empty()) throw SpecError("sampling.time: needs at least one sample");
  }
  return s;
}

}  // namespace

PressureForm pressure_form_from_string(const std::string& s) {
  if (s == "none") return PressureForm::none;
  if (s == "steady") return PressureForm::steady;
  if (s == "case_i") return PressureForm::case_i;
  if (s == "case_ii") return PressureForm::case_ii;
  if (s == "case_iii") return PressureForm::case_iii;
  if (s == "rank1") return PressureForm::rank1;
  if (s == "rank0") return PressureForm::rank0;
  throw SpecError("flow.pressure_form: unknown value \"" + s + "\"");
}

SpecDocument parse_spec_document(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec parse error: ") + e.what());
  }
  require_keys(root, "spec", {"schema_version", "congruence", "flow", "sampling"},
               {"schema_version", "congruence"});
  SpecDocument doc;
  doc.schema_version = int_number(root.at("schema_version"), "schema_version");
  if (doc.schema_version != 1) throw SpecError("schema_version: must be 1");
  doc.congruence = parse_congruence(root.at("congruence"));
  if (root.contains("flow")) doc.flow = parse_flow(root.at("flow"));
  if (root.contains("sampling")) doc.sampling = parse_sampling(root.at("sampling"));
  return doc;
}

SpecDocument load_spec_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_document(buf.str());
}

FlowField build_flow(const SpecDocument& doc) {
  if (!doc.flow.has_value()) throw SpecError("spec has no flow section");
  const FlowSpec& f = *doc.flow;
  const CongruenceSpec& c = doc.congruence;
  switch (f.pressure_form) {
    case PressureForm::none:
      throw SpecError("no pressure to verify (pressure_form is \"none\")");
    case PressureForm::steady:
      if (c.rank() != 2) throw SpecError("steady pressure form requires a rank-2 congruence");
      if (!f.H.is_constant()) throw SpecError("steady pressure form requires constant H");
      return rank2_flow(c.F(), f.H, PressureForm::steady, f.p0);
    case PressureForm::case_i:
    case PressureForm::case_ii:
    case PressureForm::case_iii:
      if (c.rank() != 2) throw SpecError("case pressure forms require a rank-2 congruence");
      return rank2_flow(c.F(), f.H, f.pressure_form, f.p0);
    case PressureForm::rank1:
      if (c.rank() != 1) throw SpecError("rank1 pressure form requires a rank-1 congruence");
      return rank1_flow(c, f.H, f.p0);
    case PressureForm::rank0:
      if (c.rank() != 0) throw SpecError("rank0 pressure form requires a rank-0 congruence");
      return rank0_flow(c.xi0(), f.K, f.H, f.p0);
  }
  throw SpecError("flow.pressure_form: unknown form");
}

FlowField build_velocity_flow(const SpecDocument& doc) {
  FlowSpec f;
  if (doc.flow.has_value()) f = *doc.flow;
  const CongruenceSpec& c = doc.congruence;
  switch (c.rank()) {
    case 2: {
      const PressureForm form =
          f.pressure_form == PressureForm::none ? PressureForm::none : f.pressure_form;
      if (form == PressureForm::steady && !f.H.is_constant()) {
        return rank2_flow(c.F(), f.H, PressureForm::none, f.p0);
      }
      return rank2_flow(c.F(), f.H, form, f.p0);
    }
    case 1:
      return rank1_flow(c, f.H, f.p0);
    default:
      return rank0_flow(c.xi0(), f.K, f.H, f.p0);
  }
}

}  // namespace congflow

#include "matder/scenario.hpp"

#include <cctype>
#include <fstream>

#include "matder/version.hpp"

namespace matder {

namespace {

void reject_unknown_keys(const json& obj, const char* what,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw ParseError(std::string("unknown key '") + key + "' in " + what);
  }
}

json require_key(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key))
    throw ParseError(std::string(what) + " requires key '" + key + "'");
  return obj.at(key);
}

Index index_field(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ParseError(std::string(what) + " must be a non-negative integer");
  return j.get<Index>();
}

}  // namespace

std::pair<long long, long long> parse_affine_formula(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw ParseError("empty index formula");

  long long a = 0, b = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    long long sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    }
    // term: INT '*' 'i' | INT 'i'? -- 'i' alone means 1*i
    long long coeff = 1;
    bool saw_digits = false;
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
      ++pos;
    if (pos > start) {
      coeff = std::stoll(s.substr(start, pos - start));
      saw_digits = true;
    }
    if (pos < s.size() && s[pos] == '*') {
      if (!saw_digits)
        throw ParseError("bad index formula '" + raw + "' (expected a*i+b)");
      ++pos;
    }
    if (pos < s.size() && s[pos] == 'i') {
      ++pos;
      a += sign * coeff;
    } else if (saw_digits) {
      b += sign * coeff;
    } else {
      throw ParseError("bad index formula '" + raw + "' (expected a*i+b)");
    }
    if (pos < s.size() && s[pos] != '+' && s[pos] != '-')
      throw ParseError("bad index formula '" + raw + "' (expected a*i+b)");
  }
  return {a, b};
}

namespace {

AnyMatrix sum_operators(const RingPtr& ring, std::vector<AnyMatrix> parts) {
  if (parts.empty()) return FiniteMatrix(ring);
  bool any_col_only = false, all_finite = true;
  for (const auto& p : parts) {
    if (std::holds_alternative<ColumnFiniteOperator>(p)) any_col_only = true;
    if (!std::holds_alternative<FiniteMatrix>(p)) all_finite = false;
  }
  if (all_finite) {
    FiniteMatrix acc = std::get<FiniteMatrix>(parts[0]);
    for (std::size_t k = 1; k < parts.size(); ++k)
      acc = add(acc, std::get<FiniteMatrix>(parts[k]));
    return acc;
  }
  if (!any_col_only) {
    auto as_rcf = [](const AnyMatrix& p) {
      if (const auto* f = std::get_if<FiniteMatrix>(&p)) return to_operator(*f);
      return std::get<RcfOperator>(p);
    };
    RcfOperator acc = as_rcf(parts[0]);
    for (std::size_t k = 1; k < parts.size(); ++k)
      acc = add(acc, as_rcf(parts[k]));
    return acc;
  }
  auto as_col = [](const AnyMatrix& p) -> ColumnFiniteOperator {
    if (const auto* f = std::get_if<FiniteMatrix>(&p)) return to_operator(*f);
    if (const auto* r = std::get_if<RcfOperator>(&p)) return *r;
    return std::get<ColumnFiniteOperator>(p);
  };
  ColumnFiniteOperator acc = as_col(parts[0]);
  for (std::size_t k = 1; k < parts.size(); ++k)
    acc = add(acc, as_col(parts[k]));
  return acc;
}

}  // namespace

AnyMatrix build_operator(const RingPtr& ring, const json& spec) {
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "shift") return shift_operator(ring);
    if (name == "identity") return identity_operator(ring);
    throw ParseError("unknown operator name '" + name +
                     "' (shift | identity | object spec)");
  }
  if (!spec.is_object())
    throw ParseError("operator spec must be a string or an object");
  const std::string kind = require_key(spec, "kind", "operator spec");

  if (kind == "diag") {
    reject_unknown_keys(spec, "diag operator spec", {"kind", "formula"});
    const auto coeffs = parse_affine_formula(
        require_key(spec, "formula", "diag operator spec").get<std::string>());
    const long long a = coeffs.first, b = coeffs.second;
    RingPtr r = ring;
    return diag_operator(ring, [r, a, b](Index i) {
      return r->from_integer(Int(a) * Int(i) + Int(b));
    });
  }
  if (kind == "finite") {
    reject_unknown_keys(spec, "finite operator spec", {"kind", "entries"});
    FiniteMatrix m(ring);
    for (const auto& t : require_key(spec, "entries", "finite operator spec")) {
      if (!t.is_array() || t.size() != 3)
        throw ParseError("finite entries must be [i, j, \"text\"] triples");
      m.add_entry(index_field(t[0], "entry row"),
                  index_field(t[1], "entry column"),
                  ring->from_text(t[2].get<std::string>()));
    }
    return m;
  }
  if (kind == "ones_row") {
    reject_unknown_keys(spec, "ones_row operator spec", {"kind", "row"});
    return ones_row_operator(
        ring, index_field(require_key(spec, "row", "ones_row spec"), "row"));
  }
  if (kind == "sum") {
    reject_unknown_keys(spec, "operator sum spec", {"kind", "parts"});
    std::vector<AnyMatrix> parts;
    for (const auto& p : require_key(spec, "parts", "operator sum spec"))
      parts.push_back(build_operator(ring, p));
    return sum_operators(ring, std::move(parts));
  }
  throw ParseError("unknown operator kind '" + kind + "'");
}

namespace {

CoefficientDerivation build_coefficient_derivation(const RingPtr& ring,
                                                   const json& spec) {
  if (spec.is_string())
    return derivation_from_name(ring, spec.get<std::string>());
  if (!spec.is_object())
    throw ParseError("coefficient derivation spec must be a string or object");
  const std::string kind =
      require_key(spec, "kind", "coefficient derivation spec");
  if (kind == "inner_ring") {
    reject_unknown_keys(spec, "inner_ring spec", {"kind", "element"});
    return inner_ring_derivation(ring->from_text(
        require_key(spec, "element", "inner_ring spec").get<std::string>()));
  }
  throw ParseError("unknown coefficient derivation kind '" + kind + "'");
}

}  // namespace

MatrixDerivation build_derivation(const RingPtr& ring, const json& desc,
                                  Ambient ambient) {
  if (!desc.is_object())
    throw ParseError("derivation descriptor must be an object");
  const std::string kind = require_key(desc, "kind", "derivation descriptor");

  if (kind == "inner") {
    reject_unknown_keys(desc, "inner descriptor", {"kind", "operator"});
    AnyMatrix op =
        build_operator(ring, require_key(desc, "operator", "inner descriptor"));
    if (const auto* f = std::get_if<FiniteMatrix>(&op))
      return MatrixDerivation::inner(to_operator(*f), ambient);
    if (const auto* r = std::get_if<RcfOperator>(&op))
      return MatrixDerivation::inner(*r, ambient);
    if (ambient != Ambient::m_full)
      throw UsageError(
          "inner over a column-finite-only operator needs ambient M_full; "
          "its values can leave the finite class");
    return MatrixDerivation::inner(std::get<ColumnFiniteOperator>(op));
  }
  if (kind == "lift") {
    reject_unknown_keys(desc, "lift descriptor", {"kind", "derivation"});
    CoefficientDerivation u = build_coefficient_derivation(
        ring, require_key(desc, "derivation", "lift descriptor"));
    auto law = check_derivation_law(u, 1, 8);
    if (!law.empty())
      throw UsageError("lift: '" + u.name() + "' fails the derivation law (" +
                       law.front().check + ")");
    return MatrixDerivation::lift(u, ambient);
  }
  if (kind == "sum") {
    reject_unknown_keys(desc, "sum descriptor", {"kind", "parts"});
    const json parts = require_key(desc, "parts", "sum descriptor");
    if (!parts.is_array() || parts.empty())
      throw ParseError("sum descriptor needs a non-empty parts array");
    std::optional<MatrixDerivation> acc;
    for (const auto& p : parts) {
      MatrixDerivation part = build_derivation(ring, p, ambient);
      acc = acc ? MatrixDerivation::sum(*acc, part) : part;
    }
    return *acc;
  }
  throw ParseError("unknown derivation kind '" + kind + "'");
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  reject_unknown_keys(doc, "scenario",
                      {"ring", "derivation", "window", "seed", "trials", "i0",
                       "reservoir", "ambient", "out"});

  Scenario sc;
  sc.ring = ring_from_spec(
      require_key(doc, "ring", "scenario").get<std::string>());

  const Index bound =
      index_field(require_key(doc, "window", "scenario"), "window");
  if (bound < 1) throw ParseError("window must be >= 1");
  sc.window = Window(bound);

  if (doc.contains("seed"))
    sc.seed = index_field(doc.at("seed"), "seed");
  if (doc.contains("trials")) {
    if (!doc.at("trials").is_number_integer() ||
        doc.at("trials").get<long long>() < 1)
      throw ParseError("trials must be an integer >= 1");
    sc.trials = doc.at("trials").get<int>();
  }
  if (doc.contains("i0")) sc.i0 = index_field(doc.at("i0"), "i0");
  if (sc.i0 >= bound) throw ParseError("i0 must lie inside the window");
  if (doc.contains("reservoir")) {
    sc.reservoir = index_field(doc.at("reservoir"), "reservoir");
    if (sc.reservoir < bound)
      throw ParseError("reservoir must be >= the window bound");
  }
  if (doc.contains("out")) sc.out_path = doc.at("out").get<std::string>();

  const json desc = require_key(doc, "derivation", "scenario");
  if (!desc.is_object())
    throw ParseError("derivation descriptor must be an object");
  const std::string kind = require_key(desc, "kind", "derivation descriptor");

  if (kind == "lie") {
    reject_unknown_keys(desc, "lie descriptor",
                        {"kind", "ambient", "base", "reservoir"});
    if (doc.contains("ambient"))
      throw ParseError("scenario key 'ambient' applies to associative "
                       "derivations; the lie descriptor carries its own");
    const LieAmbient lamb = lie_ambient_from_string(
        require_key(desc, "ambient", "lie descriptor").get<std::string>());
    if (desc.contains("reservoir")) {
      sc.reservoir = index_field(desc.at("reservoir"), "reservoir");
      if (sc.reservoir < bound)
        throw ParseError("reservoir must be >= the window bound");
    }
    const Ambient base_ambient = lamb == LieAmbient::sl_inf ? Ambient::m_inf
                                 : lamb == LieAmbient::gl_rcf
                                     ? Ambient::m_rcf
                                     : Ambient::m_full;
    MatrixDerivation base = build_derivation(
        sc.ring, require_key(desc, "base", "lie descriptor"), base_ambient);
    sc.lie = LieDerivation::from_associative(base, lamb);
  } else {
    Ambient ambient = Ambient::m_inf;
    if (doc.contains("ambient"))
      ambient = ambient_from_string(doc.at("ambient").get<std::string>());
    sc.associative = build_derivation(sc.ring, desc, ambient);
  }

  // canonical echo for the report
  sc.resolved = json{{"ring", sc.ring->name()},
                     {"derivation", desc},
                     {"window", bound},
                     {"seed", sc.seed},
                     {"trials", sc.trials},
                     {"i0", sc.i0}};
  if (sc.lie)
    sc.resolved["reservoir"] =
        sc.reservoir ? sc.reservoir : 2 * sc.window.bound;
  else
    sc.resolved["ambient"] = to_string(sc.associative->ambient());
  if (sc.out_path) sc.resolved["out"] = *sc.out_path;
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    // e.byte is an offset; report the line for quicker fixing
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)),
                     std::istreambuf_iterator<char>());
    std::size_t line = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k)
      if (text[k] == '\n') ++line;
    throw ParseError("scenario '" + path + "' line " + std::to_string(line) +
                     ": " + e.what());
  }
  return parse_scenario(doc);
}

RunResult run_scenario(const Scenario& sc) {
  RunResult out{DecompositionReport{}, json{}, 3};
  if (sc.lie) {
    LieDecomposeOptions opt{sc.window};
    opt.seed = sc.seed;
    opt.trials = sc.trials;
    opt.i0 = sc.i0;
    opt.reservoir = sc.reservoir;
    out.report = lie_decompose(*sc.lie, opt);
  } else {
    DecomposeOptions opt{sc.window};
    opt.seed = sc.seed;
    opt.trials = sc.trials;
    opt.i0 = sc.i0;
    out.report = decompose(*sc.associative, opt);
  }
  out.report_json = out.report.to_json();
  out.report_json["tool_version"] = kVersion;
  out.report_json["scenario"] = sc.resolved;
  switch (out.report.status) {
    case Status::decomposed: out.exit_code = 0; break;
    case Status::refuted: out.exit_code = 2; break;
    case Status::inconclusive:
    case Status::unsupported: out.exit_code = 3; break;
  }
  return out;
}

}  // namespace matder

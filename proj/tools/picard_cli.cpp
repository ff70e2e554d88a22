// picard: command-line front end. Inputs are documents (file paths, "-" for
// stdin, or inline JSON); results are canonical group strings, or a report
// document with --json.
//
// Exit codes: 0 success, 1 invalid input, 2 a verification check failed.

#include "picard/battery.hpp"
#include "picard/document.hpp"
#include "picard/resolution.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace picard;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kMismatch = 2;

std::string str(const FgAbGroup& g) { return canonical_form(g).to_string(); }

std::string read_source(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return arg;
  if (arg == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(arg, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + arg);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class T>
T load_as(const std::string& arg, const std::string& kind) {
  try {
    return document_as<T>(parse_document(read_source(arg)), kind);
  } catch (const InvalidInput& e) {
    // Inline documents are long; name files only.
    const bool inline_doc = arg.find_first_of("{[") != std::string::npos;
    throw InvalidInput(inline_doc ? std::string(e.what()) : arg + ": " + e.what());
  }
}

// Output is either human lines or a single report object.
struct Out {
  bool json = false;
  Json report = Json::object();
  std::vector<std::string> lines;

  void line(const std::string& s) { lines.push_back(s); }
  int finish(const std::string& command, int code) {
    if (json) {
      report["command"] = command;
      report["exit_code"] = code;
      std::cout << render(report);
    } else {
      for (const auto& l : lines) std::cout << l << "\n";
    }
    return code;
  }
};

std::string indexed(const std::vector<int>& degrees, const std::vector<FgAbGroup>& groups,
                    const std::string& prefix = "i=") {
  std::string out;
  for (std::size_t k = 0; k < degrees.size(); ++k)
    out += (k ? ", " : "") + prefix + std::to_string(degrees[k]) + ": " + str(groups[k]);
  return out;
}

Json groups_json(const std::vector<int>& degrees, const std::vector<FgAbGroup>& groups) {
  Json j = Json::object();
  for (std::size_t k = 0; k < degrees.size(); ++k) j[std::to_string(degrees[k])] = str(groups[k]);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_snf(Out& out, const std::string& arg) {
  const IntMatrix a = load_as<IntMatrix>(arg, "matrix");
  const auto d = smith_normal_form(a);
  IntVector nonzero;
  for (const auto& x : d.diagonal())
    if (x != 0) nonzero.push_back(x);
  const FgAbGroup coker(a.rows(), a.transpose());
  const bool ok = d.U * a * d.V == d.S && abs_value(determinant(d.U)) == 1 &&
                  abs_value(determinant(d.V)) == 1;
  std::string factors;
  for (const auto& x : nonzero) factors += (factors.empty() ? "" : ", ") + x.str();
  out.line("invariant factors: " + (factors.empty() ? std::string("none") : factors));
  out.line("rank: " + std::to_string(nonzero.size()));
  out.line("cokernel: " + str(coker));
  if (!ok) out.line("check failed: U A V != S or U, V not unimodular");
  out.report["invariant_factors"] = detail::vector_json(nonzero);
  out.report["rank"] = nonzero.size();
  out.report["cokernel"] = str(coker);
  out.report["U"] = matrix_json(d.U);
  out.report["S"] = matrix_json(d.S);
  out.report["V"] = matrix_json(d.V);
  out.report["check"] = ok;
  return out.finish("snf", ok ? kOk : kMismatch);
}

int cmd_cohomology(Out& out, const std::string& arg, const std::optional<int>& degree) {
  const CochainComplex k = load_as<CochainComplex>(arg, "complex");
  std::vector<int> degrees;
  if (degree) degrees.push_back(*degree);
  else
    for (int n = k.lo(); n <= k.hi(); ++n) degrees.push_back(n);
  std::vector<FgAbGroup> groups;
  for (int n : degrees) {
    groups.push_back(cohomology_at(k, n));
    out.line("H^" + std::to_string(n) + ": " + str(groups.back()));
  }
  out.report["cohomology"] = groups_json(degrees, groups);
  return out.finish("cohomology", kOk);
}

int cmd_ext(Out& out, const std::string& pa, const std::string& ga, const std::optional<int>& degree) {
  const CochainComplex p = load_as<CochainComplex>(pa, "complex");
  const CochainComplex g = load_as<CochainComplex>(ga, "complex");
  const std::vector<int> degrees = degree ? std::vector<int>{*degree} : std::vector<int>{1, 0, -1, -2};
  const CochainComplex r = rhom(p, g);
  std::vector<FgAbGroup> groups;
  for (int i : degrees) groups.push_back(cohomology_at(r, i));
  out.line(indexed(degrees, groups));
  out.report["ext"] = groups_json(degrees, groups);
  return out.finish("ext", kOk);
}

int cmd_pi(Out& out, const std::string& pa) {
  const CochainComplex p = load_as<CochainComplex>(pa, "complex");
  const HomotopyGroups h = homotopy_groups(p);
  out.line("pi_0: " + str(h.pi0));
  out.line("pi_1: " + str(h.pi1));
  out.line("pi_2: " + str(h.pi2));
  out.report["pi"] = Json{{"0", str(h.pi0)}, {"1", str(h.pi1)}, {"2", str(h.pi2)}};
  return out.finish("pi", kOk);
}

SheafComplex constant_complex(const PosetSite& s, const CochainComplex& k) {
  if (k.empty()) throw InvalidInput("tors: the coefficient complex is zero");
  std::vector<PosetSheaf> sheaves;
  std::vector<std::vector<IntMatrix>> diffs;
  for (int n = k.lo(); n <= k.hi(); ++n) sheaves.push_back(PosetSheaf::constant(s, k.group(n)));
  for (int n = k.lo(); n < k.hi(); ++n)
    diffs.emplace_back(s.size(), k.diff(n).matrix());
  return SheafComplex(k.lo(), std::move(sheaves), std::move(diffs));
}

int cmd_tors(Out& out, const std::vector<std::string>& args) {
  SheafComplex g = [&] {
    if (args.size() == 1) return load_as<SheafComplex>(args[0], "sheaf-complex");
    if (args.size() == 2)
      return constant_complex(load_as<PosetSite>(args[0], "site"),
                              load_as<CochainComplex>(args[1], "complex"));
    throw InvalidInput("tors takes SHEAF-COMPLEX or SITE COMPLEX");
  }();
  const auto t = tors_groups(g);
  const std::vector<int> degrees{1, 0, -1, -2};
  out.line(indexed(degrees, t));
  out.report["tors"] = groups_json(degrees, t);
  int code = kOk;
  if (g.site().size() == 1) {
    // On a point the groups are the cohomology of the stalk complex.
    const CochainComplex k = g.stalk_complex(0);
    bool ok = t[0].is_trivial();
    for (std::size_t i = 1; i < 4; ++i) ok = ok && is_isomorphic(t[i], cohomology_at(k, 1 - static_cast<int>(i)));
    out.report["point_check"] = ok;
    if (!ok) {
      out.line("check failed: Tors on a point is not (0, H^0, H^-1, H^-2)");
      code = kMismatch;
    }
  }
  return out.finish("tors", code);
}

int cmd_resolve(Out& out, const std::string& pa, const std::optional<std::string>& against) {
  const CochainComplex p = load_as<CochainComplex>(pa, "complex");
  const ResolutionChain r = build_resolution(p);
  int code = kOk;

  out.line("ranks of L_j in degrees -2 -1 0:");
  Json ranks = Json::array();
  for (int j = 0; j <= 4; ++j) {
    std::string row = "  L" + std::to_string(j) + ":";
    Json jr = Json::array();
    for (int q = -2; q <= 0; ++q) {
      row += " " + std::to_string(r.term(j).rank(q));
      jr.push_back(r.term(j).rank(q));
    }
    out.line(row);
    ranks.push_back(jr);
  }
  out.report["ranks"] = ranks;
  const auto t = r.total();
  std::string tot = "Tot ranks in degrees " + std::to_string(t.lo) + ".." + std::to_string(t.hi()) + ":";
  for (auto x : t.ranks) tot += " " + std::to_string(x);
  out.line(tot);
  out.report["total_ranks"] = Json{{"lo", t.lo}, {"ranks", t.ranks}};

  Json d = Json::array();
  for (int j = 0; j <= 3; ++j)
    for (int q = -2; q <= 0; ++q)
      d.push_back(Json{{"j", j}, {"q", q}, {"matrix", matrix_json(r.d(j, q).to_dense())}});
  out.report["D"] = d;

  const ResolutionReport rep = resolution_homology_check(r);
  Json lines = Json::array();
  for (const auto& l : rep.lines) {
    std::string s = "H^" + std::to_string(l.degree) + "(Tot) = " + str(l.total);
    if (l.asserted) s += ", H^" + std::to_string(l.degree) + "(P) = " + str(l.expected) + (l.ok ? ": ok" : ": MISMATCH");
    else s += " (reported, not asserted)";
    out.line(s);
    Json jl{{"degree", l.degree}, {"total", str(l.total)}, {"asserted", l.asserted}};
    if (l.asserted) {
      jl["expected"] = str(l.expected);
      jl["ok"] = l.ok;
    }
    lines.push_back(jl);
  }
  out.report["exactness"] = lines;
  if (!rep.ok()) code = kMismatch;

  if (against) {
    const CochainComplex g = load_as<CochainComplex>(*against, "complex");
    const auto via = ext_via_resolution(r, g);
    Json rows = Json::array();
    out.line("Ext^i(P, G) through the resolution vs the free replacement:");
    for (std::size_t k = 0; k < via.size(); ++k) {
      const int i = 1 - static_cast<int>(k);
      const FgAbGroup direct = ext_group(p, g, i);
      const bool ok = is_isomorphic(via[k], direct);
      out.line("  i=" + std::to_string(i) + ": " + str(via[k]) + " | " + str(direct) + (ok ? "" : "  MISMATCH"));
      rows.push_back(Json{{"i", i}, {"resolution", str(via[k])}, {"direct", str(direct)}, {"ok", ok}});
      if (!ok) code = kMismatch;
    }
    if (!cohomology_at(g, -2).is_trivial()) {
      out.line("note: H^-2(G) is nonzero, so i=1 also sees H^-3(Tot), which the partial resolution does not kill");
      out.report["note"] = "H^-2(G) nonzero: i=1 sees H^-3(Tot)";
    }
    out.report["against"] = rows;
  }
  return out.finish("resolve", code);
}

ExtClass class_from_args(const std::vector<std::string>& args) {
  if (args.size() == 1) return load_as<ExtClass>(args[0], "class");
  if (args.size() != 3) throw InvalidInput("realize takes CLASS or P G CLASS");
  const CochainComplex p = load_as<CochainComplex>(args[0], "complex");
  const CochainComplex g = load_as<CochainComplex>(args[1], "complex");
  const ExtGroup ext(p, g);
  IntVector coords;
  // Plain coordinates "1,0"; the bracketed form is rewritten by the option parser.
  static const std::regex plain("(-?[0-9]+(,-?[0-9]+)*)?");
  if (std::regex_match(args[2], plain) && !std::ifstream(args[2])) {
    std::stringstream ss(args[2]);
    std::string x;
    while (std::getline(ss, x, ',')) coords.emplace_back(x);
    return ExtClass{p, g, class_coordinates(ext, class_cocycle(ext, coords))};
  }
  const Json j = parse_json(read_source(args[2]));
  if (j.is_array()) {
    coords = detail::Reader::vector(j, "");
  } else {
    const ExtClass c = read_class(j);
    if (!(c.p == p) || !(c.g == g)) throw InvalidInput("the class document belongs to a different P, G");
    coords = c.coords;
  }
  return ExtClass{p, g, class_coordinates(ext, class_cocycle(ext, coords))};
}

int cmd_realize(Out& out, const std::vector<std::string>& args) {
  const ExtClass c = class_from_args(args);
  const ExtGroup ext(c.p, c.g);
  const IntVector xi = class_cocycle(ext, c.coords);
  const Extension x = realize_extension(ext, xi);
  const bool ok = ext.same_class(classify_extension(ext, x), xi);
  const bool zero = ext.group().is_zero_element(ext.class_of(xi));
  const bool split_ok = splits_in_cohomology(x) == zero;
  const int code = ok && split_ok ? kOk : kMismatch;
  if (out.json) {
    out.report["extension"] = extension_json(x);
    out.report["ext1"] = str(ext.group());
    out.report["round_trip"] = ok;
    out.report["split_check"] = split_ok;
    return out.finish("realize", code);
  }
  std::cout << emit_document(x);
  if (!ok) std::cerr << "check failed: classify(realize(class)) != class\n";
  if (!split_ok) std::cerr << "check failed: splitting does not match the class being zero\n";
  return code;
}

int cmd_classify(Out& out, const std::string& arg) {
  const Extension x = load_as<Extension>(arg, "extension");
  const ExtGroup ext(x.j.dst(), x.i.src());
  const IntVector xi = classify_extension(ext, x);
  const ExtClass c{ext.source(), ext.target(), class_coordinates(ext, xi)};
  const bool zero = ext.group().is_zero_element(ext.class_of(xi));
  const bool split_ok = splits_in_cohomology(x) == zero;
  const int code = split_ok ? kOk : kMismatch;
  if (out.json) {
    out.report["class"] = class_json(c);
    out.report["ext1"] = str(ext.group());
    out.report["split"] = zero;
    out.report["split_check"] = split_ok;
    return out.finish("classify", code);
  }
  std::cout << emit_document(c);
  if (!split_ok) std::cerr << "check failed: splitting does not match the class being zero\n";
  return code;
}

int cmd_verify_all(Out& out, const BatteryOptions& o) {
  Json rows = Json::array();
  int failed = 0;
  for (const auto& c : acceptance_criteria()) {
    const CriterionResult r = run_criterion(c, o);
    out.line("criterion " + std::to_string(r.id) + " (" + r.name + "): " + (r.pass ? "PASS" : "FAIL") +
             " - " + r.detail);
    rows.push_back(Json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    failed += r.pass ? 0 : 1;
  }
  out.report["criteria"] = rows;
  out.report["seed"] = o.seed;
  out.report["max_order"] = o.max_order;
  out.line(std::to_string(acceptance_criteria().size() - static_cast<std::size_t>(failed)) + " of " +
           std::to_string(acceptance_criteria().size()) + " criteria passed");
  return out.finish("verify-all", failed == 0 ? kOk : kMismatch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations with complexes of abelian groups, Ext, Tors and the partial resolution"};
  app.require_subcommand(1);
  Out out;
  app.add_flag("--json", out.json, "Print a machine-readable report document");

  std::string a1, a2;
  std::optional<int> degree;
  std::optional<std::string> against;
  std::vector<std::string> many;
  BatteryOptions battery;

  auto* snf = app.add_subcommand("snf", "Smith normal form of a matrix document");
  snf->add_option("matrix", a1, "Matrix document")->required();

  auto* coh = app.add_subcommand("cohomology", "Cohomology groups of a complex");
  coh->add_option("complex", a1, "Complex document")->required();
  coh->add_option("--degree", degree, "Only this degree");

  auto* ext = app.add_subcommand("ext", "Ext^i(P, G) = H^i RHom(P, G) for i = 1, 0, -1, -2");
  ext->add_option("P", a1, "Complex document")->required();
  ext->add_option("G", a2, "Complex document")->required();
  ext->add_option("--degree", degree, "Only this i");

  auto* pi = app.add_subcommand("pi", "Homotopy groups of a complex in degrees -2..0");
  pi->add_option("P", a1, "Complex document")->required();

  auto* tors = app.add_subcommand("tors", "Tors^i on a site for i = 1, 0, -1, -2");
  tors->add_option("inputs", many, "SHEAF-COMPLEX, or SITE and a COMPLEX of constant coefficients")
      ->required()
      ->expected(1, 2);

  auto* res = app.add_subcommand("resolve", "Build the partial resolution of P and check it");
  res->add_option("P", a1, "Finite complex document in degrees -2..0")->required();
  res->add_option("--against", against, "Compare Ext(P, G) through the resolution");

  auto* real = app.add_subcommand("realize", "Extension realizing a class of Ext^1(P, G)");
  real->add_option("inputs", many, "CLASS, or P G CLASS (CLASS may be coordinates like 1,0)")
      ->required()
      ->expected(1, 3);

  auto* cls = app.add_subcommand("classify", "Class of an extension document");
  cls->add_option("extension", a1, "Extension document")->required();

  auto* all = app.add_subcommand("verify-all", "Run the full verification battery");
  all->add_option("--seed", battery.seed, "Seed for the randomized checks");
  all->add_option("--max-order", battery.max_order, "Largest cyclic order swept by the Ext check")
      ->check(CLI::Range(1, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*snf) return cmd_snf(out, a1);
    if (*coh) return cmd_cohomology(out, a1, degree);
    if (*ext) return cmd_ext(out, a1, a2, degree);
    if (*pi) return cmd_pi(out, a1);
    if (*tors) return cmd_tors(out, many);
    if (*res) return cmd_resolve(out, a1, against);
    if (*real) return cmd_realize(out, many);
    if (*cls) return cmd_classify(out, a1);
    if (*all) return cmd_verify_all(out, battery);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InternalError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

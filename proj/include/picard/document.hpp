// Text documents for every value the tools exchange: matrices, groups,
// complexes, sites, sheaf complexes, extensions and extension classes.
// One JSON dialect with sorted keys; integers are JSON numbers when they fit
// in 64 bits and decimal strings otherwise. Both spellings are accepted.
#pragma once

#include "picard/derived.hpp"
#include "picard/site.hpp"

#include <json.hpp>

#include <regex>
#include <variant>

namespace picard {

using Json = nlohmann::json;

/// Validation failure inside a document; `path` is a JSON pointer.
class DocumentError : public InvalidInput {
 public:
  DocumentError(std::string path, const std::string& msg)
      : InvalidInput("document " + (path.empty() ? std::string("/") : path) + ": " + msg),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// An extension class: coordinates in the canonical basis of Ext^1(P, G),
/// one entry per nontrivial summand, torsion entries reduced.
struct ExtClass {
  CochainComplex p;
  CochainComplex g;
  IntVector coords;
};

using Document = std::variant<IntMatrix, FgAbGroup, CochainComplex, PosetSite, SheafComplex,
                              Extension, ExtClass>;

namespace detail {

inline bool is_decimal(const std::string& s) {
  static const std::regex re("-?[0-9]+");
  return std::regex_match(s, re);
}

// Builds a DOM like nlohmann's own parser, but keeps integer literals that
// overflow 64 bits as decimal strings instead of rounding them to doubles.
class ExactSax : public nlohmann::json_sax<Json> {
 public:
  Json root;

  bool null() override { return put(Json(nullptr)); }
  bool boolean(bool v) override { return put(Json(v)); }
  bool number_integer(number_integer_t v) override { return put(Json(v)); }
  bool number_unsigned(number_unsigned_t v) override { return put(Json(v)); }
  bool number_float(number_float_t v, const string_t& raw) override {
    return is_decimal(raw) ? put(Json(raw)) : put(Json(v));
  }
  bool string(string_t& v) override { return put(Json(v)); }
  bool binary(binary_t& v) override { return put(Json::binary(v)); }
  bool start_object(std::size_t) override { return open(Json::object()); }
  bool key(string_t& k) override {
    key_ = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(Json::array()); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t byte, const std::string&,
                   const nlohmann::detail::exception& e) override {
    error_byte = byte;
    error = e.what();
    return false;
  }

  std::size_t error_byte = 0;
  std::string error;

 private:
  std::vector<Json*> stack_;
  std::string key_;

  Json* slot() {
    if (stack_.empty()) return &root;
    Json& top = *stack_.back();
    if (top.is_array()) {
      top.push_back(nullptr);
      return &top.back();
    }
    return &top[key_];
  }
  bool put(Json v) {
    *slot() = std::move(v);
    return true;
  }
  bool open(Json v) {
    Json* s = slot();
    *s = std::move(v);
    stack_.push_back(s);
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }
};

inline std::string pointer_join(const std::string& path, const std::string& token) {
  std::string t;
  for (char c : token) {
    if (c == '~') t += "~0";
    else if (c == '/') t += "~1";
    else t += c;
  }
  return path + "/" + t;
}
inline std::string pointer_join(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

// Typed readers; each reports the JSON pointer of the offending field.
class Reader {
 public:
  static const Json& field(const Json& obj, const std::string& path, const char* key) {
    object(obj, path);
    auto it = obj.find(key);
    if (it == obj.end()) throw DocumentError(path, std::string("missing field \"") + key + "\"");
    return *it;
  }
  static const Json* optional(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }
  static void object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw DocumentError(path, "expected an object");
  }
  static void array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw DocumentError(path, "expected an array");
  }
  static void only_keys(const Json& obj, const std::string& path,
                        std::initializer_list<const char*> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw DocumentError(pointer_join(path, it.key()), "unknown field");
    }
  }
  static void kind(const Json& obj, const std::string& path, const char* expected,
                   bool required) {
    const Json* k = optional(obj, "kind");
    if (!k) {
      if (required) throw DocumentError(path, "missing field \"kind\"");
      return;
    }
    if (!k->is_string() || k->get<std::string>() != expected)
      throw DocumentError(pointer_join(path, "kind"),
                          std::string("expected \"") + expected + "\"");
  }

  static Integer integer(const Json& j, const std::string& path) {
    if (j.is_number_integer()) {
      if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
      return Integer(j.get<std::int64_t>());
    }
    if (j.is_string() && is_decimal(j.get<std::string>())) return Integer(j.get<std::string>());
    throw DocumentError(path, "expected an integer");
  }
  static int small_int(const Json& j, const std::string& path) {
    const Integer v = integer(j, path);
    if (v < -1000000 || v > 1000000) throw DocumentError(path, "integer out of range");
    return static_cast<int>(v);
  }
  static std::size_t count(const Json& j, const std::string& path) {
    const Integer v = integer(j, path);
    if (v < 0 || v > 1000000) throw DocumentError(path, "expected a small non-negative integer");
    return static_cast<std::size_t>(v);
  }
  static std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) throw DocumentError(path, "expected a string");
    return j.get<std::string>();
  }
  static IntVector vector(const Json& j, const std::string& path) {
    array(j, path);
    IntVector v;
    for (std::size_t k = 0; k < j.size(); ++k) v.push_back(integer(j[k], pointer_join(path, k)));
    return v;
  }
  /// Nested rows; shape fixed by context. A matrix with no rows is [].
  static IntMatrix matrix(const Json& j, const std::string& path, std::size_t rows,
                          std::size_t cols) {
    array(j, path);
    if (j.size() != rows)
      throw DocumentError(path, "expected " + std::to_string(rows) + " rows, got " +
                                    std::to_string(j.size()));
    std::vector<Integer> e;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rp = pointer_join(path, r);
      const IntVector row = vector(j[r], rp);
      if (row.size() != cols)
        throw DocumentError(rp, "expected " + std::to_string(cols) + " entries, got " +
                                    std::to_string(row.size()));
      e.insert(e.end(), row.begin(), row.end());
    }
    return IntMatrix(rows, cols, std::move(e));
  }
};

inline Json integer_json(const Integer& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(static_cast<std::int64_t>(v));
  return Json(v.str());
}
inline Json vector_json(const IntVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(integer_json(x));
  return out;
}
inline Json rows_json(const IntMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r)));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Value <-> JSON. The `_json` functions emit canonical objects; `read_*`
// validate and build values. Nested values omit "kind".

inline Json matrix_json(const IntMatrix& m, bool with_kind = true) {
  Json j{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", detail::rows_json(m)}};
  if (with_kind) j["kind"] = "matrix";
  return j;
}

inline IntMatrix read_matrix(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  R::object(j, path);
  R::kind(j, path, "matrix", top);
  R::only_keys(j, path, {"kind", "rows", "cols", "entries"});
  const Json& e = R::field(j, path, "entries");
  const std::string ep = detail::pointer_join(path, "entries");
  R::array(e, ep);
  const Json* r = R::optional(j, "rows");
  const Json* c = R::optional(j, "cols");
  const std::size_t rows = r ? R::count(*r, detail::pointer_join(path, "rows")) : e.size();
  std::size_t cols = 0;
  if (c) cols = R::count(*c, detail::pointer_join(path, "cols"));
  else if (!e.empty() && e[0].is_array()) cols = e[0].size();
  else if (rows > 0) throw DocumentError(ep, "cannot infer the column count");
  else throw DocumentError(path, "an empty matrix needs \"cols\"");
  return R::matrix(e, ep, rows, cols);
}

inline Json group_json(const FgAbGroup& g, bool with_kind = true) {
  Json j{{"n_gens", g.n_gens()}, {"relations", detail::rows_json(g.relations())}};
  if (with_kind) j["kind"] = "group";
  return j;
}

inline FgAbGroup read_group(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  R::object(j, path);
  R::kind(j, path, "group", false);
  (void)top;
  R::only_keys(j, path, {"kind", "n_gens", "relations"});
  const std::size_t n = R::count(R::field(j, path, "n_gens"), detail::pointer_join(path, "n_gens"));
  const Json* rel = R::optional(j, "relations");
  if (!rel) return FgAbGroup::free(n);
  const std::string rp = detail::pointer_join(path, "relations");
  R::array(*rel, rp);
  return FgAbGroup(n, R::matrix(*rel, rp, rel->size(), n));
}

inline Json complex_json(const CochainComplex& k, bool with_kind = true) {
  Json groups = Json::array(), diffs = Json::array();
  for (const auto& g : k.groups()) groups.push_back(group_json(g, false));
  for (const auto& d : k.diffs()) diffs.push_back(detail::rows_json(d.matrix()));
  Json j{{"lo", k.lo()}, {"groups", groups}, {"differentials", diffs}};
  if (with_kind) j["kind"] = "complex";
  return j;
}

inline CochainComplex read_complex(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  using detail::pointer_join;
  R::object(j, path);
  R::kind(j, path, "complex", top);
  R::only_keys(j, path, {"kind", "lo", "groups", "differentials"});
  const int lo = R::small_int(R::field(j, path, "lo"), pointer_join(path, "lo"));
  const Json& gs = R::field(j, path, "groups");
  const std::string gp = pointer_join(path, "groups");
  R::array(gs, gp);
  std::vector<FgAbGroup> groups;
  for (std::size_t k = 0; k < gs.size(); ++k)
    groups.push_back(read_group(gs[k], pointer_join(gp, k), false));
  const Json* ds = R::optional(j, "differentials");
  const std::string dp = pointer_join(path, "differentials");
  std::vector<GroupHom> diffs;
  const std::size_t want = groups.empty() ? 0 : groups.size() - 1;
  if (!ds) {
    for (std::size_t k = 0; k < want; ++k) diffs.push_back(GroupHom::zero(groups[k], groups[k + 1]));
  } else {
    R::array(*ds, dp);
    if (ds->size() != want)
      throw DocumentError(dp, "expected " + std::to_string(want) + " differentials, got " +
                                  std::to_string(ds->size()));
    for (std::size_t k = 0; k < want; ++k) {
      const std::string p = pointer_join(dp, k);
      const IntMatrix m = R::matrix((*ds)[k], p, groups[k + 1].n_gens(), groups[k].n_gens());
      try {
        diffs.emplace_back(groups[k], groups[k + 1], m);
      } catch (const InvalidInput& e) {
        throw DocumentError(p, "d^" + std::to_string(lo + static_cast<int>(k)) + ": " + e.what());
      }
    }
  }
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k)
    if (!compose(diffs[k + 1], diffs[k]).is_zero()) {
      const int n = lo + static_cast<int>(k);
      throw DocumentError(pointer_join(dp, k + 1), "d^" + std::to_string(n + 1) + " o d^" +
                                                       std::to_string(n) + " is not zero (degree " +
                                                       std::to_string(n) + ")");
    }
  return CochainComplex(lo, std::move(groups), std::move(diffs));
}

inline Json site_json(const PosetSite& s, bool with_kind = true) {
  Json covers = Json::array();
  for (const auto& [a, b] : s.covers()) covers.push_back(Json::array({s.label(a), s.label(b)}));
  Json j{{"elements", s.elements()}, {"covers", covers}};
  if (with_kind) j["kind"] = "site";
  return j;
}

inline PosetSite read_site(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  using detail::pointer_join;
  R::object(j, path);
  R::kind(j, path, "site", top);
  R::only_keys(j, path, {"kind", "elements", "covers"});
  const Json& es = R::field(j, path, "elements");
  const std::string ep = pointer_join(path, "elements");
  R::array(es, ep);
  std::vector<std::string> elements;
  for (std::size_t k = 0; k < es.size(); ++k) elements.push_back(R::text(es[k], pointer_join(ep, k)));
  std::vector<std::pair<std::string, std::string>> covers;
  const std::string cp = pointer_join(path, "covers");
  if (const Json* cs = R::optional(j, "covers")) {
    R::array(*cs, cp);
    for (std::size_t k = 0; k < cs->size(); ++k) {
      const std::string p = pointer_join(cp, k);
      R::array((*cs)[k], p);
      if ((*cs)[k].size() != 2) throw DocumentError(p, "a cover is a pair [smaller, larger]");
      const std::string a = R::text((*cs)[k][0], pointer_join(p, 0));
      const std::string b = R::text((*cs)[k][1], pointer_join(p, 1));
      for (std::size_t i = 0; i < 2; ++i) {
        const std::string& l = i == 0 ? a : b;
        if (std::find(elements.begin(), elements.end(), l) == elements.end())
          throw DocumentError(pointer_join(p, i), "unknown element \"" + l + "\"");
      }
      covers.emplace_back(a, b);
    }
  }
  try {
    return PosetSite(std::move(elements), std::move(covers));
  } catch (const InvalidInput& e) {
    throw DocumentError(path, e.what());
  }
}

inline Json sheaf_complex_json(const SheafComplex& k, bool with_kind = true) {
  const PosetSite& s = k.site();
  Json degrees = Json::array(), diffs = Json::array();
  for (int n = k.lo(); n <= k.hi(); ++n) {
    const PosetSheaf& f = k.sheaf(n);
    Json stalks = Json::object(), res = Json::array();
    for (std::size_t x = 0; x < s.size(); ++x) stalks[s.label(x)] = group_json(f.stalk(x), false);
    for (const auto& [a, b] : s.covers())
      res.push_back(Json{{"from", s.label(a)}, {"to", s.label(b)},
                         {"matrix", detail::rows_json(f.res(a, b))}});
    degrees.push_back(Json{{"stalks", stalks}, {"restrictions", res}});
    if (n < k.hi()) {
      Json d = Json::object();
      for (std::size_t x = 0; x < s.size(); ++x) d[s.label(x)] = detail::rows_json(k.diff(n, x));
      diffs.push_back(d);
    }
  }
  Json j{{"site", site_json(s, false)}, {"lo", k.lo()}, {"degrees", degrees},
         {"differentials", diffs}};
  if (with_kind) j["kind"] = "sheaf-complex";
  return j;
}

inline SheafComplex read_sheaf_complex(const Json& j, const std::string& path = "",
                                       bool top = true) {
  using R = detail::Reader;
  using detail::pointer_join;
  R::object(j, path);
  R::kind(j, path, "sheaf-complex", top);
  R::only_keys(j, path, {"kind", "site", "lo", "degrees", "differentials"});
  const PosetSite site = read_site(R::field(j, path, "site"), pointer_join(path, "site"), false);
  const int lo = R::small_int(R::field(j, path, "lo"), pointer_join(path, "lo"));
  const Json& ds = R::field(j, path, "degrees");
  const std::string dp = pointer_join(path, "degrees");
  R::array(ds, dp);
  if (ds.empty()) throw DocumentError(dp, "a sheaf complex needs at least one degree");
  std::vector<PosetSheaf> sheaves;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const std::string p = pointer_join(dp, k);
    R::object(ds[k], p);
    R::only_keys(ds[k], p, {"stalks", "restrictions"});
    const Json& st = R::field(ds[k], p, "stalks");
    const std::string sp = pointer_join(p, "stalks");
    R::object(st, sp);
    std::vector<FgAbGroup> stalks;
    for (const auto& l : site.elements()) {
      if (!st.contains(l)) throw DocumentError(sp, "missing stalk for \"" + l + "\"");
      stalks.push_back(read_group(st[l], pointer_join(sp, l), false));
    }
    if (st.size() != site.size()) throw DocumentError(sp, "stalk given for an unknown element");
    std::vector<IntMatrix> maps(site.covers().size());
    std::vector<char> seen(maps.size(), 0);
    const std::string rp = pointer_join(p, "restrictions");
    const Json* rs = R::optional(ds[k], "restrictions");
    if (!rs && !maps.empty()) throw DocumentError(p, "missing field \"restrictions\"");
    if (rs) {
      R::array(*rs, rp);
      for (std::size_t r = 0; r < rs->size(); ++r) {
        const std::string q = pointer_join(rp, r);
        const Json& e = (*rs)[r];
        R::object(e, q);
        R::only_keys(e, q, {"from", "to", "matrix"});
        const std::string a = R::text(R::field(e, q, "from"), pointer_join(q, "from"));
        const std::string b = R::text(R::field(e, q, "to"), pointer_join(q, "to"));
        const auto& cv = site.covers();
        std::size_t idx = cv.size();
        for (std::size_t c = 0; c < cv.size(); ++c)
          if (site.label(cv[c].first) == a && site.label(cv[c].second) == b) idx = c;
        if (idx == cv.size()) throw DocumentError(q, a + " -> " + b + " is not a cover of the site");
        if (seen[idx]) throw DocumentError(q, "restriction " + a + " -> " + b + " given twice");
        seen[idx] = 1;
        maps[idx] = R::matrix(R::field(e, q, "matrix"), pointer_join(q, "matrix"),
                              stalks[cv[idx].second].n_gens(), stalks[cv[idx].first].n_gens());
      }
    }
    for (std::size_t c = 0; c < seen.size(); ++c)
      if (!seen[c])
        throw DocumentError(rp, "missing restriction " + site.label(site.covers()[c].first) +
                                    " -> " + site.label(site.covers()[c].second));
    try {
      sheaves.emplace_back(site, std::move(stalks), std::move(maps));
    } catch (const InvalidInput& e) {
      throw DocumentError(p, e.what());
    }
  }
  std::vector<std::vector<IntMatrix>> diffs;
  const std::string fp = pointer_join(path, "differentials");
  const Json* fs = R::optional(j, "differentials");
  if (fs) {
    R::array(*fs, fp);
    if (fs->size() + 1 != sheaves.size())
      throw DocumentError(fp, "expected " + std::to_string(sheaves.size() - 1) + " differentials");
    for (std::size_t k = 0; k < fs->size(); ++k) {
      const std::string p = pointer_join(fp, k);
      R::object((*fs)[k], p);
      std::vector<IntMatrix> d;
      for (std::size_t x = 0; x < site.size(); ++x) {
        const std::string& l = site.label(x);
        if (!(*fs)[k].contains(l)) throw DocumentError(p, "missing matrix for \"" + l + "\"");
        d.push_back(R::matrix((*fs)[k][l], pointer_join(p, l), sheaves[k + 1].stalk(x).n_gens(),
                              sheaves[k].stalk(x).n_gens()));
      }
      if ((*fs)[k].size() != site.size()) throw DocumentError(p, "matrix given for an unknown element");
      diffs.push_back(std::move(d));
    }
  } else {
    for (std::size_t k = 0; k + 1 < sheaves.size(); ++k) {
      std::vector<IntMatrix> d;
      for (std::size_t x = 0; x < site.size(); ++x)
        d.emplace_back(sheaves[k + 1].stalk(x).n_gens(), sheaves[k].stalk(x).n_gens());
      diffs.push_back(std::move(d));
    }
  }
  try {
    return SheafComplex(lo, std::move(sheaves), std::move(diffs));
  } catch (const InvalidInput& e) {
    throw DocumentError(fp, e.what());
  }
}

namespace detail {

inline std::pair<int, int> map_range(const CochainComplex& s, const CochainComplex& t) {
  if (s.empty() && t.empty()) return {0, -1};
  const int a = std::min(s.empty() ? t.lo() : s.lo(), t.empty() ? s.lo() : t.lo());
  return {a, std::max(s.hi(), t.hi())};
}

inline Json chain_map_json(const ChainMap& f) {
  const auto [a, b] = map_range(f.src(), f.dst());
  Json comps = Json::array();
  for (int n = a; n <= b; ++n) comps.push_back(rows_json(f.component(n).matrix()));
  return Json{{"lo", a}, {"components", comps}};
}

inline ChainMap read_chain_map(const Json& j, const std::string& path, const CochainComplex& s,
                               const CochainComplex& t) {
  using R = Reader;
  R::object(j, path);
  R::only_keys(j, path, {"lo", "components"});
  const int lo = R::small_int(R::field(j, path, "lo"), pointer_join(path, "lo"));
  const Json& cs = R::field(j, path, "components");
  const std::string cp = pointer_join(path, "components");
  R::array(cs, cp);
  std::vector<IntMatrix> comps;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const int n = lo + static_cast<int>(k);
    comps.push_back(R::matrix(cs[k], pointer_join(cp, k), t.group(n).n_gens(), s.group(n).n_gens()));
  }
  try {
    return ChainMap(s, t, lo, std::move(comps));
  } catch (const InvalidInput& e) {
    throw DocumentError(path, e.what());
  }
}

}  // namespace detail

inline Json extension_json(const Extension& x, bool with_kind = true) {
  Json j{{"g", complex_json(x.i.src(), false)},
         {"e", complex_json(x.e, false)},
         {"p", complex_json(x.j.dst(), false)},
         {"i", detail::chain_map_json(x.i)},
         {"j", detail::chain_map_json(x.j)}};
  if (with_kind) j["kind"] = "extension";
  return j;
}

inline Extension read_extension(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  using detail::pointer_join;
  R::object(j, path);
  R::kind(j, path, "extension", top);
  R::only_keys(j, path, {"kind", "g", "e", "p", "i", "j"});
  const CochainComplex g = read_complex(R::field(j, path, "g"), pointer_join(path, "g"), false);
  const CochainComplex e = read_complex(R::field(j, path, "e"), pointer_join(path, "e"), false);
  const CochainComplex p = read_complex(R::field(j, path, "p"), pointer_join(path, "p"), false);
  Extension x{e, detail::read_chain_map(R::field(j, path, "i"), pointer_join(path, "i"), g, e),
              detail::read_chain_map(R::field(j, path, "j"), pointer_join(path, "j"), e, p)};
  try {
    validate_extension(x);
  } catch (const InvalidInput& err) {
    throw DocumentError(path, err.what());
  }
  return x;
}

/// Canonical coordinates of the class of a cocycle.
inline IntVector class_coordinates(const ExtGroup& ext, const IntVector& cocycle) {
  return ext.group().normalize(ext.class_of(cocycle));
}

/// A cocycle representing canonical class coordinates.
inline IntVector class_cocycle(const ExtGroup& ext, const IntVector& coords) {
  const auto& c = ext.group().coordinates();
  IntVector y(c.moduli.size(), Integer(0));
  std::size_t k = 0;
  for (std::size_t m = 0; m < y.size(); ++m) {
    if (c.moduli[m] == 1) continue;
    if (k >= coords.size()) break;
    y[m] = coords[k++];
  }
  if (k != coords.size() || ext.group().nontrivial_count() != coords.size())
    throw InvalidInput("class has " + std::to_string(coords.size()) + " coordinates, Ext^1 is " +
                       canonical_form(ext.group()).to_string() + " with " +
                       std::to_string(ext.group().nontrivial_count()) + " summands");
  return ext.cocycle(c.from_canonical.apply(y));
}

inline Json class_json(const ExtClass& c, bool with_kind = true) {
  Json j{{"p", complex_json(c.p, false)}, {"g", complex_json(c.g, false)},
         {"coords", detail::vector_json(c.coords)}};
  if (with_kind) j["kind"] = "class";
  return j;
}

inline ExtClass read_class(const Json& j, const std::string& path = "", bool top = true) {
  using R = detail::Reader;
  using detail::pointer_join;
  R::object(j, path);
  R::kind(j, path, "class", top);
  R::only_keys(j, path, {"kind", "p", "g", "coords"});
  ExtClass c{read_complex(R::field(j, path, "p"), pointer_join(path, "p"), false),
             read_complex(R::field(j, path, "g"), pointer_join(path, "g"), false), {}};
  const std::string cp = pointer_join(path, "coords");
  const IntVector raw = R::vector(R::field(j, path, "coords"), cp);
  const ExtGroup ext(c.p, c.g);
  try {
    c.coords = class_coordinates(ext, class_cocycle(ext, raw));
  } catch (const InvalidInput& e) {
    throw DocumentError(cp, e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Text

/// Sorted keys; objects indented, arrays without objects on one line.
inline std::string render(const Json& j) {
  std::string out;
  const auto go = [&](auto& self, const Json& v, int indent) -> void {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_object()) {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + "  " + Json(it.key()).dump() + ": ";
        self(self, it.value(), indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    if (v.is_array()) {
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_object() && !(e.is_array() && e.size() > 0 && e[0].is_object());
      if (flat) {
        out += v.dump();
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < v.size(); ++k) {
        out += pad + "  ";
        self(self, v[k], indent + 2);
        out += k + 1 < v.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    out += v.dump();
  };
  go(go, j, 0);
  return out + "\n";
}

/// Parses JSON text, keeping big integer literals exact. Syntax errors name
/// line and column.
inline Json parse_json(const std::string& text) {
  detail::ExactSax sax;
  if (!Json::sax_parse(text, &sax, Json::input_format_t::json, false)) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < sax.error_byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInput("document: line " + std::to_string(line) + ", column " +
                       std::to_string(col) + ": malformed JSON (" + sax.error + ")");
  }
  return std::move(sax.root);
}

inline std::string document_kind(const Document& d) {
  static const char* names[] = {"matrix", "group", "complex", "site", "sheaf-complex",
                                "extension", "class"};
  return names[d.index()];
}

inline Document read_document(const Json& j) {
  detail::Reader::object(j, "");
  const Json* k = detail::Reader::optional(j, "kind");
  if (!k) {
    // The bare group form {n_gens, relations} is common enough to accept.
    if (j.contains("n_gens")) return read_group(j);
    throw DocumentError("", "missing field \"kind\"");
  }
  const std::string kind = detail::Reader::text(*k, "/kind");
  if (kind == "matrix") return read_matrix(j);
  if (kind == "group") return read_group(j);
  if (kind == "complex") return read_complex(j);
  if (kind == "site") return read_site(j);
  if (kind == "sheaf-complex") return read_sheaf_complex(j);
  if (kind == "extension") return read_extension(j);
  if (kind == "class") return read_class(j);
  throw DocumentError("/kind", "unknown kind \"" + kind + "\"");
}

inline Document parse_document(const std::string& text) { return read_document(parse_json(text)); }

inline Json document_json(const Document& d) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IntMatrix>) return matrix_json(v);
        else if constexpr (std::is_same_v<T, FgAbGroup>) return group_json(v);
        else if constexpr (std::is_same_v<T, CochainComplex>) return complex_json(v);
        else if constexpr (std::is_same_v<T, PosetSite>) return site_json(v);
        else if constexpr (std::is_same_v<T, SheafComplex>) return sheaf_complex_json(v);
        else if constexpr (std::is_same_v<T, Extension>) return extension_json(v);
        else return class_json(v);
      },
      d);
}

inline std::string emit_document(const Document& d) { return render(document_json(d)); }

/// emit(parse(text)).
inline std::string canonical_document(const std::string& text) {
  return emit_document(parse_document(text));
}

/// Typed access with a readable error when the kind is wrong.
template <class T>
const T& document_as(const Document& d, const std::string& expected) {
  if (const T* v = std::get_if<T>(&d)) return *v;
  throw DocumentError("/kind", "expected a " + expected + " document, got " + document_kind(d));
}

}  // namespace picard

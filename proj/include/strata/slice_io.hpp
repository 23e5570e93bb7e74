#pragma once

#include "strata/slice.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace strata {

// Scenario files: JSON, UTF-8, schema "strata-slice/1". Matrices are
// arrays of rows; integer entries are JSON numbers, rational entries are
// "p/q" strings. Serialization is canonical (fixed key order, two-space
// indent, trailing newline) so that load/emit round-trips are
// byte-exact.

inline constexpr const char* kSliceSchema = "strata-slice/1";

class SliceFormatError : public std::runtime_error {
 public:
  explicit SliceFormatError(const std::string& what) : std::runtime_error(what) {}
};

using AnySlice = std::variant<SliceData<ZRing>, SliceData<QRing>, IhSliceData>;

namespace io_detail {

using json = nlohmann::ordered_json;

inline Int parse_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Int(v.get<long long>());
  if (v.is_string()) {
    try {
      return Int(v.get<std::string>());
    } catch (const std::exception&) {
      throw SliceFormatError(where + ": cannot parse integer '" + v.get<std::string>() + "'");
    }
  }
  throw SliceFormatError(where + ": expected an integer entry");
}

inline Rat parse_rat(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rat(Int(v.get<long long>()));
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rat(Int(s));
      Int p(s.substr(0, slash)), q(s.substr(slash + 1));
      if (q == 0) throw SliceFormatError(where + ": zero denominator");
      return Rat(p) / Rat(q);
    } catch (const SliceFormatError&) {
      throw;
    } catch (const std::exception&) {
      throw SliceFormatError(where + ": cannot parse rational '" + s + "'");
    }
  }
  throw SliceFormatError(where + ": expected an integer or \"p/q\" entry");
}

template <class R>
typename R::Scalar parse_scalar(const json& v, const std::string& where);
template <>
inline Int parse_scalar<ZRing>(const json& v, const std::string& where) {
  return parse_int(v, where);
}
template <>
inline Rat parse_scalar<QRing>(const json& v, const std::string& where) {
  return parse_rat(v, where);
}

template <class R>
Matrix<R> parse_matrix(const json& v, const std::string& where, std::size_t expect_rows,
                       std::size_t expect_cols, bool cols_known) {
  if (!v.is_array()) throw SliceFormatError(where + ": expected an array of rows");
  std::size_t rows = v.size();
  if (rows != expect_rows)
    throw SliceFormatError(where + ": matrix has " + std::to_string(rows) +
                           " rows, expected " + std::to_string(expect_rows));
  std::size_t cols = cols_known ? expect_cols : 0;
  if (!cols_known && rows > 0) {
    if (!v[0].is_array()) throw SliceFormatError(where + ": row 0 is not an array");
    cols = v[0].size();
  }
  Matrix<R> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw SliceFormatError(where + ": row " + std::to_string(i) + " has " +
                             std::to_string(v[i].is_array() ? v[i].size() : 0) +
                             " entries, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = parse_scalar<R>(v[i][j], where + "[" + std::to_string(i) + "][" +
                                             std::to_string(j) + "]");
  }
  return m;
}

inline json int_to_json(const Int& v) {
  // Desk-scale entries fit in 64 bits; anything larger goes out as a
  // string, which parse_int accepts back.
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return json(static_cast<long long>(v));
  return json(v.str());
}

template <class R>
json scalar_to_json(const typename R::Scalar& v);
template <>
inline json scalar_to_json<ZRing>(const Int& v) {
  return int_to_json(v);
}
template <>
inline json scalar_to_json<QRing>(const Rat& v) {
  if (denominator(v) == 1) return int_to_json(numerator(v));
  return json(numerator(v).str() + "/" + denominator(v).str());
}

template <class R>
json matrix_to_json(const Matrix<R>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json<R>(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json rat_matrix_as_strings(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(numerator(m(i, j)).str() + "/" + denominator(m(i, j)).str());
    rows.push_back(row);
  }
  return rows;
}

inline int parse_degree_key(const std::string& key, const std::string& where) {
  try {
    std::size_t pos = 0;
    int deg = std::stoi(key, &pos);
    if (pos != key.size()) throw std::invalid_argument(key);
    return deg;
  } catch (const std::exception&) {
    throw SliceFormatError(where + ": degree key '" + key + "' is not an integer");
  }
}

template <class R>
std::map<int, AbelianGroup<R>> parse_groups(const json& v, const std::string& where) {
  std::map<int, AbelianGroup<R>> out;
  if (!v.is_object()) throw SliceFormatError(where + ": expected an object keyed by degree");
  for (auto it = v.begin(); it != v.end(); ++it) {
    int deg = parse_degree_key(it.key(), where);
    const json& g = it.value();
    if (!g.is_object() || !g.contains("gens"))
      throw SliceFormatError(where + "." + it.key() + ": expected {\"gens\", \"rels\"}");
    auto gens = g.at("gens").get<long long>();
    if (gens < 0) throw SliceFormatError(where + "." + it.key() + ": negative gens");
    Matrix<R> rels(static_cast<std::size_t>(gens), 0);
    if (g.contains("rels") && !g.at("rels").empty())
      rels = parse_matrix<R>(g.at("rels"), where + "." + it.key() + ".rels",
                             static_cast<std::size_t>(gens), 0, false);
    out.emplace(deg, AbelianGroup<R>(static_cast<std::size_t>(gens), rels));
  }
  return out;
}

template <class R>
json groups_to_json(const std::map<int, AbelianGroup<R>>& groups) {
  json out = json::object();
  for (const auto& [deg, g] : groups) {
    json entry;
    entry["gens"] = g.gens();
    entry["rels"] = matrix_to_json(g.relations());
    out[std::to_string(deg)] = entry;
  }
  return out;
}

template <class R>
SliceData<R> parse_ordinary(const json& root, const std::string& where) {
  SliceData<R> s;
  s.n = root.at("n").get<int>();
  s.k = root.at("k").get<int>();
  s.d = root.at("d").get<int>();
  s.m = s.n - s.k;
  const json& groups = root.at("groups");
  s.rel = parse_groups<R>(groups.at("rel"), where + ".groups.rel");
  s.abs = parse_groups<R>(groups.at("abs"), where + ".groups.abs");
  if (root.contains("var"))
    for (auto it = root.at("var").begin(); it != root.at("var").end(); ++it) {
      int deg = parse_degree_key(it.key(), where + ".var");
      auto src = s.rel_at(deg), tgt = s.abs_at(deg);
      Matrix<R> m = parse_matrix<R>(it.value(), where + ".var." + it.key(), tgt.gens(),
                                    src.gens(), true);
      s.var.emplace(deg, GroupHom<R>(src, tgt, m));
    }
  if (root.contains("jmap"))
    for (auto it = root.at("jmap").begin(); it != root.at("jmap").end(); ++it) {
      int deg = parse_degree_key(it.key(), where + ".jmap");
      auto src = s.abs_at(deg), tgt = s.rel_at(deg);
      Matrix<R> m = parse_matrix<R>(it.value(), where + ".jmap." + it.key(), tgt.gens(),
                                    src.gens(), true);
      s.jmap.emplace(deg, GroupHom<R>(src, tgt, m));
    }
  return s;
}

inline IhSliceData parse_ih(const json& root, const std::string& where) {
  IhSliceData s;
  s.n = root.at("n").get<int>();
  s.k = root.at("k").get<int>();
  s.d = root.at("d").get<int>();
  s.m = s.n - s.k;
  const json& groups = root.at("groups");
  s.rel = parse_groups<QRing>(groups.at("rel"), where + ".groups.rel");
  s.abs = parse_groups<QRing>(groups.at("abs"), where + ".groups.abs");
  auto reld = s.rel_at(s.d);
  auto absd = s.abs_at(s.d);
  s.var = GroupHom<QRing>::zero(reld, absd);
  s.jmap = GroupHom<QRing>::zero(absd, reld);
  if (root.contains("var")) {
    const json& v = root.at("var");
    for (auto it = v.begin(); it != v.end(); ++it) {
      int deg = parse_degree_key(it.key(), where + ".var");
      if (deg != s.d)
        throw SliceFormatError(where + ".var: operators act in the middle degree " +
                               std::to_string(s.d) + " only");
      s.var = GroupHom<QRing>(
          reld, absd,
          parse_matrix<QRing>(it.value(), where + ".var." + it.key(), absd.gens(),
                              reld.gens(), true));
    }
  }
  if (root.contains("jmap")) {
    const json& v = root.at("jmap");
    for (auto it = v.begin(); it != v.end(); ++it) {
      int deg = parse_degree_key(it.key(), where + ".jmap");
      if (deg != s.d)
        throw SliceFormatError(where + ".jmap: operators act in the middle degree " +
                               std::to_string(s.d) + " only");
      s.jmap = GroupHom<QRing>(
          absd, reld,
          parse_matrix<QRing>(it.value(), where + ".jmap." + it.key(), reld.gens(),
                              absd.gens(), true));
    }
  }
  if (root.contains("pairing"))
    for (auto it = root.at("pairing").begin(); it != root.at("pairing").end(); ++it) {
      int deg = parse_degree_key(it.key(), where + ".pairing");
      s.pairing.emplace(
          deg, parse_matrix<QRing>(it.value(), where + ".pairing." + it.key(),
                                   s.rel_at(2 * s.d - deg).gens(), s.abs_at(deg).gens(),
                                   true));
    }
  return s;
}

}  // namespace io_detail

inline AnySlice parse_slice_json(const std::string& text, const std::string& origin) {
  namespace io = io_detail;
  io::json root;
  try {
    root = io::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SliceFormatError(origin + ": parse error: " + e.what());
  }
  if (!root.is_object()) throw SliceFormatError(origin + ": top level must be an object");
  if (!root.contains("schema") || root.at("schema") != kSliceSchema)
    throw SliceFormatError(origin + ": unsupported or missing schema (want '" +
                           std::string(kSliceSchema) + "')");
  std::string kind = root.value("kind", "");
  std::string coeff = root.value("coeff", "");
  try {
    if (kind == "ordinary" && coeff == "Z")
      return io::parse_ordinary<ZRing>(root, origin);
    if (kind == "ordinary" && coeff == "Q")
      return io::parse_ordinary<QRing>(root, origin);
    if (kind == "ih") {
      if (coeff != "Q")
        throw SliceFormatError(origin + ": intersection homology requires coeff 'Q'");
      return io::parse_ih(root, origin);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SliceFormatError(origin + ": " + e.what());
  }
  throw SliceFormatError(origin + ": unknown kind '" + kind + "' / coeff '" + coeff + "'");
}

inline AnySlice load_slice(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SliceFormatError(path + ": cannot open file");
  std::ostringstream buf;
  buf << f.rdbuf();
  if (buf.str().empty()) throw SliceFormatError(path + ": parse error: empty file");
  return parse_slice_json(buf.str(), path);
}

namespace io_detail {

template <class R>
json ordinary_to_json(const SliceData<R>& s) {
  json root;
  root["schema"] = kSliceSchema;
  root["kind"] = "ordinary";
  root["n"] = s.n;
  root["k"] = s.k;
  root["d"] = s.d;
  root["coeff"] = R::name();
  root["groups"]["rel"] = groups_to_json(s.rel);
  root["groups"]["abs"] = groups_to_json(s.abs);
  json var = json::object(), jm = json::object();
  for (const auto& [deg, h] : s.var) var[std::to_string(deg)] = matrix_to_json(h.matrix);
  for (const auto& [deg, h] : s.jmap) jm[std::to_string(deg)] = matrix_to_json(h.matrix);
  root["var"] = var;
  root["jmap"] = jm;
  return root;
}

inline json ih_to_json(const IhSliceData& s) {
  json root;
  root["schema"] = kSliceSchema;
  root["kind"] = "ih";
  root["n"] = s.n;
  root["k"] = s.k;
  root["d"] = s.d;
  root["coeff"] = "Q";
  root["groups"]["rel"] = groups_to_json(s.rel);
  root["groups"]["abs"] = groups_to_json(s.abs);
  root["var"][std::to_string(s.d)] = matrix_to_json(s.var.matrix);
  root["jmap"][std::to_string(s.d)] = matrix_to_json(s.jmap.matrix);
  json pairing = json::object();
  for (const auto& [deg, P] : s.pairing)
    pairing[std::to_string(deg)] = rat_matrix_as_strings(P);
  root["pairing"] = pairing;
  return root;
}

}  // namespace io_detail

template <class R>
std::string serialize_slice(const SliceData<R>& s) {
  return io_detail::ordinary_to_json(s).dump(2) + "\n";
}

inline std::string serialize_slice(const IhSliceData& s) {
  return io_detail::ih_to_json(s).dump(2) + "\n";
}

inline std::string serialize_slice(const AnySlice& s) {
  return std::visit([](const auto& v) { return serialize_slice(v); }, s);
}

inline void save_slice(const AnySlice& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SliceFormatError(path + ": cannot open file for writing");
  f << serialize_slice(s);
}

}  // namespace strata

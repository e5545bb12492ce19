#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "posheaf/error.hpp"
#include "posheaf/field.hpp"
#include "posheaf/matrix.hpp"
#include "posheaf/poset.hpp"
#include "posheaf/sheaf.hpp"

namespace posheaf {

using Json = nlohmann::json;

using AnySheaf = std::variant<Sheaf<Rational>, Sheaf<ModP>, Sheaf<double>>;

struct SheafDocument {
  FieldTag field;
  AnySheaf sheaf;
  std::vector<std::string> warnings;

  const Poset& poset() const {
    return std::visit([](const auto& s) -> const Poset& { return s.poset(); }, sheaf);
  }
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void write_json(std::ostream& os, const Json& j, int indent);

inline bool is_flat(const Json& j) {
  for (const auto& x : j)
    if (x.is_structured()) return false;
  return true;
}

inline void write_scalar(std::ostream& os, const Json& j) {
  if (j.is_number_float()) {
    os << Field<double>{}.format(j.get<double>());
  } else {
    os << j.dump();
  }
}

inline void write_json(std::ostream& os, const Json& j, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' '), inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << inner << Json(it.key()).dump() << ": ";
      write_json(os, it.value(), indent + 1);
    }
    os << "\n" << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
    } else if (is_flat(j)) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write_scalar(os, j[i]);
      }
      os << "]";
    } else {
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
    }
  } else {
    write_scalar(os, j);
  }
}

template <class T>
T parse_scalar(const Field<T>& f, const Json& v, const std::string& where) {
  if (v.is_string()) return f.parse(v.get<std::string>());
  if (v.is_number_integer()) return f.from_int(v.get<long long>());
  if constexpr (std::is_same_v<T, double>)
    if (v.is_number()) return v.get<double>();
  throw Error(ErrorCode::SchemaError, where + ": expected a " + f.tag().to_string() + " scalar literal");
}

template <class T>
Json scalar_json(const Field<T>& f, const T& x) {
  if constexpr (std::is_same_v<T, double>)
    return x;
  else
    return f.format(x);
}

template <class T>
Sheaf<T> sheaf_from_json(const Json& j, const Poset& p, const Field<T>& f) {
  std::vector<std::size_t> dims(p.size(), 0);
  const auto& stalks = j.at("stalks");
  for (Element e = 0; e < p.size(); ++e) {
    if (!stalks.contains(p.name(e))) throw Error(ErrorCode::SchemaError, "stalks: missing " + p.name(e));
    const auto& v = stalks.at(p.name(e));
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw Error(ErrorCode::SchemaError, "stalks: " + p.name(e) + " must be a nonnegative integer");
    dims[e] = v.get<std::size_t>();
  }
  for (auto it = stalks.begin(); it != stalks.end(); ++it)
    if (!p.contains(it.key())) throw Error(ErrorCode::SchemaError, "stalks: unknown element " + it.key());
  const auto& maps = j.at("maps");
  std::map<CoverPair, Matrix<T>> edge_maps;
  for (auto it = maps.begin(); it != maps.end(); ++it) {
    const auto& key = it.key();
    auto lt = key.find('<');
    if (lt == std::string::npos || !p.contains(key.substr(0, lt)) || !p.contains(key.substr(lt + 1)))
      throw Error(ErrorCode::SchemaError, "maps: malformed key \"" + key + "\"");
    Element a = p.index(key.substr(0, lt)), b = p.index(key.substr(lt + 1));
    if (!p.is_cover(a, b)) throw Error(ErrorCode::ExtraEdgeMap, "maps: " + key + " is not a Hasse edge");
    if (!it.value().is_array()) throw Error(ErrorCode::SchemaError, "maps: " + key + " must be an array");
    std::size_t rows = dims[b], cols = dims[a];
    if (it.value().size() != rows * cols)
      throw Error(ErrorCode::ShapeMismatch, "maps: " + key + " needs " + std::to_string(rows * cols) +
                                                " entries (" + std::to_string(rows) + "x" + std::to_string(cols) +
                                                "), got " + std::to_string(it.value().size()));
    Matrix<T> m(f, rows, cols);
    for (std::size_t k = 0; k < rows * cols; ++k)
      m(k / cols, k % cols) = parse_scalar(f, it.value()[k], "maps: " + key);
    edge_maps.emplace(CoverPair{a, b}, std::move(m));
  }
  for (const auto& [a, b] : p.covers())
    if (!edge_maps.count({a, b})) throw Error(ErrorCode::SchemaError, "maps: missing " + p.name(a) + "<" + p.name(b));
  return Sheaf<T>(p, f, std::move(dims), std::move(edge_maps));
}

}  // namespace detail

/// Canonical JSON text: sorted object keys, two-space indent, flat arrays on
/// one line, floats with 17 significant digits.
inline std::string canonical_json(const Json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 0);
  os << "\n";
  return os.str();
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    auto cut = msg.find("parse error");
    throw Error(ErrorCode::ParseError, detail::line_col(text, e.byte ? e.byte - 1 : 0) + ": " +
                                           (cut == std::string::npos ? msg : msg.substr(cut)));
  }
}

inline SheafDocument parse_sheaf(const std::string& text) {
  Json j = parse_json_text(text);
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "document must be a JSON object");
  static const std::set<std::string> keys{"field", "elements", "covers", "stalks", "maps"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw Error(ErrorCode::SchemaError, it.key() + ": unexpected key");
  for (const auto& k : keys)
    if (!j.contains(k)) throw Error(ErrorCode::SchemaError, k + ": missing");
  if (!j["field"].is_string()) throw Error(ErrorCode::SchemaError, "field: must be a string");
  auto tag = FieldTag::parse(j["field"].get<std::string>());

  if (!j["elements"].is_array()) throw Error(ErrorCode::SchemaError, "elements: must be an array of strings");
  std::vector<std::string> elements;
  for (const auto& e : j["elements"]) {
    if (!e.is_string()) throw Error(ErrorCode::SchemaError, "elements: must be an array of strings");
    auto name = e.get<std::string>();
    if (name.find('<') != std::string::npos || name.empty())
      throw Error(ErrorCode::SchemaError, "elements: \"" + name + "\" is empty or contains '<'");
    elements.push_back(std::move(name));
  }
  if (!j["covers"].is_array()) throw Error(ErrorCode::SchemaError, "covers: must be an array of pairs");
  std::vector<std::pair<std::string, std::string>> covers;
  for (const auto& c : j["covers"]) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string())
      throw Error(ErrorCode::SchemaError, "covers: each entry must be a pair of element names");
    covers.emplace_back(c[0].get<std::string>(), c[1].get<std::string>());
  }
  if (!j["stalks"].is_object()) throw Error(ErrorCode::SchemaError, "stalks: must be an object");
  if (!j["maps"].is_object()) throw Error(ErrorCode::SchemaError, "maps: must be an object");
  auto poset = Poset::build(std::move(elements), covers);
  SheafDocument doc{tag, Sheaf<double>{}, poset.warnings()};
  switch (tag.kind) {
    case FieldKind::Rationals: doc.sheaf = detail::sheaf_from_json(j, poset, Field<Rational>{}); break;
    case FieldKind::PrimeField: doc.sheaf = detail::sheaf_from_json(j, poset, Field<ModP>{tag.prime}); break;
    case FieldKind::ApproxReals: doc.sheaf = detail::sheaf_from_json(j, poset, Field<double>{}); break;
  }
  return doc;
}

template <class T>
Json sheaf_json(const Sheaf<T>& s) {
  const auto& p = s.poset();
  Json j = Json::object();
  j["field"] = s.field().tag().to_string();
  j["elements"] = p.names();
  j["covers"] = Json::array();
  for (const auto& [a, b] : p.covers()) j["covers"].push_back({p.name(a), p.name(b)});
  j["stalks"] = Json::object();
  for (Element e = 0; e < p.size(); ++e) j["stalks"][p.name(e)] = s.stalk_dim(e);
  j["maps"] = Json::object();
  for (const auto& [edge, m] : s.edge_maps()) {
    Json entries = Json::array();
    for (const auto& x : m.data()) entries.push_back(detail::scalar_json(s.field(), x));
    j["maps"][p.name(edge.first) + "<" + p.name(edge.second)] = entries;
  }
  return j;
}

template <class T>
std::string serialize_sheaf(const Sheaf<T>& s) {
  return canonical_json(sheaf_json(s));
}

inline std::string serialize_sheaf(const SheafDocument& d) {
  return std::visit([](const auto& s) { return serialize_sheaf(s); }, d.sheaf);
}

/// FNV-1a, 64-bit, as 16 hex digits.
inline std::string digest(const std::vector<std::string>& inputs) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& s : inputs) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;  // separator between inputs
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<double> json_real_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, where + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (x.is_number())
      v.push_back(x.get<double>());
    else if (x.is_string())
      v.push_back(Field<double>{}.parse(x.get<std::string>()));
    else
      throw Error(ErrorCode::SchemaError, where + ": expected numbers");
  }
  return v;
}

inline Matrix<double> json_real_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::SchemaError, where + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(json_real_vector(r, where));
  return Matrix<double>::from_rows({}, rows);
}

inline Json real_matrix_json(const Matrix<double>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace posheaf

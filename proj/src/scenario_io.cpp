// Copyright 2026 The qcollapse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcollapse/scenario_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qcollapse {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Position {
  int line = 1;
  int column = 1;
};

Position position_of(std::string_view text, std::size_t offset) {
  Position p;
  offset = std::min(offset, text.size());
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

// Best-effort anchor: first occurrence of the quoted needle after `from`.
Position locate(std::string_view text, const std::string& needle, std::size_t from = 0) {
  auto at = text.find("\"" + needle + "\"", from);
  return position_of(text, at == std::string_view::npos ? 0 : at);
}

std::string at_line(Position p) { return " (line " + std::to_string(p.line) + ")"; }

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void syntax(const std::string& key, const std::string& what) const {
    Position p = locate(text_, key);
    throw SyntaxError(ErrorCode::SyntaxError, p.line, p.column, what);
  }

  const json& field(const json& obj, const std::string& key, bool required = true) const {
    static const json null_value;
    if (!obj.is_object()) syntax(key, "expected an object around '" + key + "'");
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) syntax(key, "missing field '" + key + "'");
      return null_value;
    }
    return *it;
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) syntax(key, "field '" + key + "' must be a number");
    return v.get<double>();
  }

  const json& array(const json& obj, const std::string& key, bool required = true) const {
    const json& v = field(obj, key, required);
    if (!v.is_null() && !v.is_array()) syntax(key, "field '" + key + "' must be an array");
    return v;
  }

  std::string string(const json& v, const std::string& key) const {
    if (!v.is_string()) syntax(key, "field '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::string_view text() const { return text_; }

 private:
  std::string_view text_;
};

// Accumulates Hermitian terms, rejecting inconsistent duplicates.
class HermitianBuilder {
 public:
  HermitianBuilder(const std::vector<std::string>& basis, std::string_view text) : basis_(basis), text_(text) {}

  void add(Index row, Index col, Complex v) {
    if (row == col && v.imag() != 0.0) fail(row, col, "diagonal term has an imaginary part");
    put(row, col, v);
    if (row != col) put(col, row, std::conj(v));
  }

  std::vector<OperatorEntry> entries() const {
    std::vector<OperatorEntry> out;
    for (const auto& [key, v] : terms_) out.push_back({key.first, key.second, v});
    return out;
  }

 private:
  void put(Index row, Index col, Complex v) {
    auto [it, inserted] = terms_.emplace(std::make_pair(row, col), v);
    if (!inserted && std::abs(it->second - v) > kHermitianTolerance) {
      fail(row, col, "conflicting values for the same Hamiltonian element");
    }
  }

  [[noreturn]] void fail(Index row, Index col, const std::string& what) const {
    const auto& r = basis_[static_cast<std::size_t>(row)];
    const auto& c = basis_[static_cast<std::size_t>(col)];
    throw Error(ErrorCode::NonHermitianCoupling, what + ": (" + r + ", " + c + ")" + at_line(locate(text_, r)));
  }

  const std::vector<std::string>& basis_;
  std::string_view text_;
  std::map<std::pair<Index, Index>, Complex> terms_;
};

Status parse_status(const Reader& r, const std::string& s) {
  if (s == "realized") return Status::Realized;
  if (s == "ready") return Status::Ready;
  if (s == "dead") return Status::Dead;
  r.syntax(s, "unknown status '" + s + "'");
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    Position p = position_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SyntaxError(ErrorCode::SyntaxError, p.line, p.column, e.what());
  }
  Reader r(text);
  if (!doc.is_object()) throw SyntaxError(ErrorCode::SyntaxError, 1, 1, "scenario must be a JSON object");

  const json& format = r.field(doc, "format", false);
  if (!format.is_null() && r.string(format, "format") != kScenarioFormat) {
    r.syntax("format", "unsupported format '" + format.get<std::string>() + "'");
  }

  ScenarioSpec s;
  s.id = r.string(r.field(doc, "id"), "id");
  std::map<std::string, Index> by_label;
  for (const auto& b : r.array(doc, "basis")) {
    std::string label = r.string(b, "basis");
    if (!by_label.emplace(label, static_cast<Index>(s.basis.size())).second) {
      r.syntax(label, "duplicate basis label '" + label + "'");
    }
    s.basis.push_back(std::move(label));
  }
  if (s.basis.empty()) r.syntax("basis", "basis must not be empty");
  const Index dim = s.dimension();

  auto index_of = [&](const json& v, const std::string& key) -> Index {
    if (v.is_string()) {
      auto it = by_label.find(v.get<std::string>());
      if (it == by_label.end()) {
        throw Error(ErrorCode::UnknownLabel,
                    "unknown basis label '" + v.get<std::string>() + "'" + at_line(locate(text, v.get<std::string>())));
      }
      return it->second;
    }
    if (v.is_number_integer()) {
      auto i = v.get<long long>();
      if (i < 0 || i >= dim) {
        throw Error(ErrorCode::UnknownLabel, "basis index " + std::to_string(i) + " out of range" + at_line(locate(text, key)));
      }
      return static_cast<Index>(i);
    }
    r.syntax(key, "field '" + key + "' must be a basis label or index");
  };

  // Components.
  std::map<std::string, int> component_by_label;
  std::vector<int> owner(static_cast<std::size_t>(dim), -1);
  for (const auto& c : r.array(doc, "components")) {
    Component comp;
    const json& id = r.field(c, "id");
    if (!id.is_number_integer()) r.syntax("id", "component id must be an integer");
    comp.id = id.get<int>();
    comp.label = r.string(r.field(c, "label"), "label");
    comp.status = parse_status(r, r.string(r.field(c, "status"), "status"));
    for (const auto& i : r.array(c, "indices")) {
      Index idx = index_of(i, "indices");
      int& o = owner[static_cast<std::size_t>(idx)];
      if (o != -1) {
        const auto& name = s.basis[static_cast<std::size_t>(idx)];
        throw Error(ErrorCode::OverlappingComponents, "basis label '" + name + "' belongs to components '" +
                                                          s.graph.components[static_cast<std::size_t>(o)].label +
                                                          "' and '" + comp.label + "'" +
                                                          at_line(locate(text, comp.label)));
      }
      o = static_cast<int>(s.graph.components.size());
      comp.indices.push_back(idx);
    }
    component_by_label.emplace(comp.label, comp.id);
    s.graph.components.push_back(std::move(comp));
  }
  if (std::none_of(s.graph.components.begin(), s.graph.components.end(),
                   [](const Component& c) { return c.status == Status::Realized; })) {
    throw Error(ErrorCode::NoRealizedComponent, "no component has status 'realized'" + at_line(locate(text, "components")));
  }

  auto endpoint = [&](const json& v, const std::string& key) -> int {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
      auto it = component_by_label.find(v.get<std::string>());
      if (it == component_by_label.end()) {
        throw Error(ErrorCode::UnknownLabel, "unknown component '" + v.get<std::string>() + "'" +
                                                 at_line(locate(text, v.get<std::string>())));
      }
      return it->second;
    }
    r.syntax(key, "edge endpoint must be a component label or id");
  };
  auto complex_of = [&](const json& v) {
    const json& im = r.field(v, "im", false);
    return Complex(r.number(r.field(v, "re"), "re"), im.is_null() ? 0.0 : r.number(im, "im"));
  };

  HermitianBuilder h(s.basis, text);
  for (const auto& e : r.array(doc, "edges", false)) {
    JumpEdge edge;
    edge.from = endpoint(r.field(e, "from"), "from");
    edge.to = endpoint(r.field(e, "to"), "to");
    const json& periodic = r.field(e, "periodic", false);
    if (!periodic.is_null() && !periodic.is_boolean()) r.syntax("periodic", "'periodic' must be a boolean");
    edge.periodic = periodic.is_boolean() && periodic.get<bool>();
    for (const auto& c : r.array(e, "couplings", false)) {
      Coupling cp{index_of(r.field(c, "row"), "row"), index_of(r.field(c, "col"), "col"), complex_of(c)};
      h.add(cp.row, cp.col, cp.value);
      edge.couplings.push_back(cp);
    }
    s.graph.edges.push_back(std::move(edge));
  }
  for (const auto& t : r.array(doc, "hamiltonian", false)) {
    h.add(index_of(r.field(t, "row"), "row"), index_of(r.field(t, "col"), "col"), complex_of(t));
  }
  s.hamiltonian = Operator(dim, h.entries());

  s.initial = StateVector{Amplitudes::Zero(dim), 0.0};
  for (const auto& a : r.array(doc, "initial")) {
    s.initial.amplitudes(index_of(r.field(a, "index"), "index")) = complex_of(a);
  }
  const json& t0 = r.field(doc, "t0", false);
  if (!t0.is_null()) s.initial.time = r.number(t0, "t0");

  for (const auto& sh : r.array(doc, "synthetic_hazards", false)) {
    s.synthetic_hazards.emplace_back(endpoint(r.field(sh, "component"), "component"),
                                     r.number(r.field(sh, "rate"), "rate"));
  }
  const json& meta = r.field(doc, "metadata", false);
  if (!meta.is_null()) {
    if (!meta.is_object()) r.syntax("metadata", "metadata must be an object");
    for (const auto& [k, v] : meta.items()) s.metadata[k] = r.number(v, k);
  }

  auto problems = check_scenario(s);
  if (!problems.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scenario '" + s.id + "' is invalid: " + problems.front());
  }
  return s;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioSpec& s) {
  auto label = [&](Index i) { return s.basis[static_cast<std::size_t>(i)]; };
  auto with_value = [](ordered_json j, Complex v) {
    j["re"] = v.real();
    j["im"] = v.imag();
    return j;
  };

  ordered_json doc;
  doc["format"] = kScenarioFormat;
  doc["id"] = s.id;
  doc["basis"] = s.basis;
  if (s.initial.time != 0.0) doc["t0"] = s.initial.time;

  ordered_json comps = ordered_json::array();
  for (const auto& c : s.graph.components) {
    ordered_json idx = ordered_json::array();
    for (Index i : c.indices) idx.push_back(label(i));
    comps.push_back({{"id", c.id}, {"label", c.label}, {"indices", idx}, {"status", to_string(c.status)}});
  }
  doc["components"] = comps;

  std::set<std::pair<Index, Index>> covered;
  ordered_json edges = ordered_json::array();
  for (const auto& e : s.graph.edges) {
    ordered_json cs = ordered_json::array();
    for (const auto& c : e.couplings) {
      cs.push_back(with_value({{"row", label(c.row)}, {"col", label(c.col)}}, c.value));
      covered.insert({c.row, c.col});
      covered.insert({c.col, c.row});
    }
    edges.push_back({{"from", e.from}, {"to", e.to}, {"periodic", e.periodic}, {"couplings", cs}});
  }
  doc["edges"] = edges;

  ordered_json ham = ordered_json::array();
  for (const auto& e : s.hamiltonian.entries()) {
    if (e.row > e.col || covered.contains({e.row, e.col})) continue;
    ham.push_back(with_value({{"row", label(e.row)}, {"col", label(e.col)}}, e.value));
  }
  doc["hamiltonian"] = ham;

  ordered_json init = ordered_json::array();
  for (Index i = 0; i < s.dimension(); ++i) {
    if (s.initial.amplitudes(i) != Complex{}) init.push_back(with_value({{"index", label(i)}}, s.initial.amplitudes(i)));
  }
  doc["initial"] = init;

  if (!s.synthetic_hazards.empty()) {
    ordered_json sh = ordered_json::array();
    for (const auto& [id, rate] : s.synthetic_hazards) sh.push_back({{"component", id}, {"rate", rate}});
    doc["synthetic_hazards"] = sh;
  }
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : s.metadata) meta[k] = v;
  doc["metadata"] = meta;
  return doc.dump(2) + "\n";
}

}  // namespace qcollapse

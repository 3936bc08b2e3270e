#include "relation_graph.hpp"

#include <cmath>
#include <sstream>

#include "byteio.hpp"
#include "text.hpp"

namespace aforge {

const char* to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::kContainment: return "containment";
    case RelationKind::kAdjacency: return "adjacency";
    case RelationKind::kExclusion: return "exclusion";
  }
  return "?";
}

namespace {

// Empty string when the edge is acceptable.
std::string edge_problem(const RelationEdge& e, int class_count) {
  if (e.a < 1 || e.a > class_count || e.b < 1 || e.b > class_count) return "class id outside 1.." + std::to_string(class_count);
  if (e.a == e.b) return "edge relates a class to itself";
  if (e.kind == RelationKind::kAdjacency) {
    if (!(e.threshold >= 1.0) || e.threshold != std::floor(e.threshold)) return "nu_contact must be an integer >= 1";
  } else if (!(e.threshold > 0.0 && e.threshold <= 1.0)) {
    return "ratio threshold must lie in (0,1]";
  }
  return {};
}

bool containment_reaches(const std::vector<RelationEdge>& edges, Label from, Label target) {
  std::vector<Label> stack{from};
  std::vector<bool> seen(256, false);
  while (!stack.empty()) {
    const Label cur = stack.back();
    stack.pop_back();
    if (cur == target) return true;
    if (seen[cur]) continue;
    seen[cur] = true;
    for (const auto& e : edges)
      if (e.kind == RelationKind::kContainment && e.a == cur) stack.push_back(e.b);
  }
  return false;
}

bool is_duplicate(const std::vector<RelationEdge>& edges, const RelationEdge& e) {
  for (const auto& x : edges)
    if (x.kind == e.kind && x.a == e.a && x.b == e.b) return true;
  return false;
}

bool valid_weights(const RelationWeights& w) {
  for (const double v : {w.anchor, w.overlap, w.contain, w.adjacency})
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
  return true;
}

}  // namespace

RelationGraph::RelationGraph(int class_count, std::vector<std::string> names, std::vector<RelationEdge> edges,
                             RelationWeights weights)
    : class_count_(class_count), names_(std::move(names)), edges_(), weights_(weights) {
  if (class_count < 1 || class_count > 255) throw Error(ErrorCode::kConfig, "graph: class count must be in 1..255");
  names_.resize(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (!names_[i].empty() && names_[i] == names_[j]) throw Error(ErrorCode::kConfig, "graph: duplicate class name '" + names_[i] + "'");
  if (!valid_weights(weights_)) throw Error(ErrorCode::kConfig, "graph: weights must be finite and >= 0");
  for (const auto& e : edges) {
    if (auto p = edge_problem(e, class_count); !p.empty()) throw Error(ErrorCode::kConfig, "graph: " + p);
    if (is_duplicate(edges_, e)) throw Error(ErrorCode::kConfig, "graph: duplicate edge");
    if (e.kind == RelationKind::kContainment && containment_reaches(edges_, e.b, e.a))
      throw Error(ErrorCode::kConfig, "graph: cyclic containment");
    edges_.push_back(e);
  }
}

const std::string& RelationGraph::name_of(Label id) const {
  static const std::string empty;
  if (id < 1 || id > names_.size()) return empty;
  return names_[id - 1];
}

std::optional<Label> RelationGraph::id_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<Label>(i + 1);
  return std::nullopt;
}

RelationGraph load_graph(const std::string& text, int class_count) {
  if (class_count < 1 || class_count > 255) throw Error(ErrorCode::kConfig, "graph: class count must be in 1..255");
  std::vector<std::string> names(static_cast<std::size_t>(class_count));
  std::vector<RelationEdge> edges;
  RelationWeights weights;
  bool have_weights = false;

  int line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto fail = [&](const std::string& msg) { throw Error(ErrorCode::kConfig, where + msg); };

    auto resolve = [&](std::string_view ref) -> Label {
      long id = 0;
      try {
        id = parse_integer(ref, "class");
      } catch (const Error&) {
        for (std::size_t i = 0; i < names.size(); ++i)
          if (names[i] == ref) return static_cast<Label>(i + 1);
        fail("unknown class name '" + std::string(ref) + "'");
      }
      if (id < 1 || id > class_count) fail("class id " + std::to_string(id) + " outside 1.." + std::to_string(class_count));
      return static_cast<Label>(id);
    };
    auto number = [&](std::string_view t, const char* what) {
      try {
        return parse_real(t, what);
      } catch (const Error&) {
        fail(std::string("non-numeric ") + what + " '" + std::string(t) + "'");
      }
      return 0.0;
    };

    const std::string_view head = tok[0];
    if (head == "class") {
      if (tok.size() != 3) fail("expected: class <id> <name>");
      long id = 0;
      try {
        id = parse_integer(tok[1], "class id");
      } catch (const Error&) {
        fail("non-numeric class id '" + std::string(tok[1]) + "'");
      }
      if (id < 1 || id > class_count) fail("class id " + std::to_string(id) + " outside 1.." + std::to_string(class_count));
      const std::string name(tok[2]);
      bool numeric_name = true;
      for (const char ch : name) numeric_name = numeric_name && ch >= '0' && ch <= '9';
      if (numeric_name) fail("class name must not be numeric");
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name && i + 1 != static_cast<std::size_t>(id)) fail("duplicate class name '" + name + "'");
      if (!names[id - 1].empty() && names[id - 1] != name) fail("class " + std::to_string(id) + " already named");
      names[id - 1] = name;
    } else if (head == "weights") {
      if (tok.size() != 5) fail("expected: weights <anc> <ovl> <in> <adj>");
      if (have_weights) fail("duplicate weights line");
      weights = {number(tok[1], "weight"), number(tok[2], "weight"), number(tok[3], "weight"), number(tok[4], "weight")};
      if (!valid_weights(weights)) fail("weights must be >= 0");
      have_weights = true;
    } else if (head == "containment" || head == "adjacency" || head == "exclusion") {
      RelationEdge e;
      if (head == "containment") {
        e.kind = RelationKind::kContainment;
        e.threshold = kDefaultTauIn;
      } else if (head == "adjacency") {
        e.kind = RelationKind::kAdjacency;
        e.threshold = kDefaultNuContact;
      } else {
        e.kind = RelationKind::kExclusion;
        e.threshold = kDefaultTauHard;
      }
      if (tok.size() != 3 && tok.size() != 4) fail("expected: " + std::string(head) + " <a> <b> [threshold]");
      e.a = resolve(tok[1]);
      e.b = resolve(tok[2]);
      if (tok.size() == 4) e.threshold = number(tok[3], "threshold");
      if (auto p = edge_problem(e, class_count); !p.empty()) fail(p);
      if (is_duplicate(edges, e)) fail("duplicate edge");
      if (e.kind == RelationKind::kContainment && containment_reaches(edges, e.b, e.a)) fail("cyclic containment");
      edges.push_back(e);
    } else {
      fail("unknown directive '" + std::string(head) + "'");
    }
  }
  return RelationGraph(class_count, std::move(names), std::move(edges), weights);
}

RelationGraph load_graph_file(const std::string& path, int class_count) {
  try {
    return load_graph(read_text_file(path), class_count);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string serialize_graph(const RelationGraph& graph) {
  std::ostringstream out;
  for (Label id = 1; id <= graph.class_count(); ++id)
    if (!graph.name_of(id).empty()) out << "class " << static_cast<int>(id) << ' ' << graph.name_of(id) << '\n';
  const auto& w = graph.weights();
  out << "weights " << format_double(w.anchor) << ' ' << format_double(w.overlap) << ' ' << format_double(w.contain)
      << ' ' << format_double(w.adjacency) << '\n';
  for (const auto& e : graph.edges())
    out << to_string(e.kind) << ' ' << static_cast<int>(e.a) << ' ' << static_cast<int>(e.b) << ' '
        << format_double(e.threshold) << '\n';
  return out.str();
}

std::vector<RelationEdge> edges_for(const RelationGraph& graph, Label class_id, RelationKind kind) {
  std::vector<RelationEdge> out;
  for (const auto& e : graph.edges())
    if (e.kind == kind && e.a == class_id) out.push_back(e);
  return out;
}

std::vector<std::pair<Label, double>> exclusion_partners(const RelationGraph& graph, Label class_id) {
  std::vector<std::pair<Label, double>> out;
  for (const auto& e : graph.edges()) {
    if (e.kind != RelationKind::kExclusion) continue;
    if (e.a == class_id) out.emplace_back(e.b, e.threshold);
    else if (e.b == class_id) out.emplace_back(e.a, e.threshold);
  }
  return out;
}

}  // namespace aforge

#include "hcnet/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hcnet {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.filename().string() + ":" + std::to_string(line);
}

// Interns names, optionally pre-seeded from a dictionary file.
struct Vocabulary {
  std::vector<std::string> names;
  std::unordered_map<std::string, std::uint32_t> ids;

  std::uint32_t intern(const std::string& name) {
    auto [it, fresh] = ids.emplace(name, static_cast<std::uint32_t>(names.size()));
    if (fresh) names.push_back(name);
    return it->second;
  }
};

// Reads `id<TAB>name[<TAB>extra]`; ids must form 0..n-1.
Vocabulary read_dict(const std::filesystem::path& file, std::vector<int>* extra) {
  std::ifstream in(file);
  if (!in) throw GraphError(GraphErrc::IoError, "cannot open " + file.string());
  std::vector<std::pair<std::uint32_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() < 2 || cols.size() > 3 || cols[1].empty())
      throw GraphError(GraphErrc::ParseError, where(file, lineno) + ": expected id<TAB>name");
    std::uint32_t id = 0;
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("trailing");
      id = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      throw GraphError(GraphErrc::ParseError, where(file, lineno) + ": bad id '" + cols[0] + "'");
    }
    rows.push_back({id, std::move(cols)});
  }
  Vocabulary vocab;
  vocab.names.resize(rows.size());
  if (extra) extra->assign(rows.size(), 0);
  std::vector<char> seen(rows.size(), 0);
  for (auto& [id, cols] : rows) {
    if (id >= rows.size() || seen[id])
      throw GraphError(GraphErrc::ParseError, file.filename().string() + ": ids are not 0..n-1");
    seen[id] = 1;
    if (!vocab.ids.emplace(cols[1], id).second)
      throw GraphError(GraphErrc::ParseError,
                       file.filename().string() + ": duplicate name '" + cols[1] + "'");
    vocab.names[id] = cols[1];
    if (extra && cols.size() == 3) {
      try {
        (*extra)[id] = std::stoi(cols[2]);
      } catch (const std::exception&) {
        throw GraphError(GraphErrc::ParseError, file.filename().string() + ": bad arity column");
      }
    }
  }
  return vocab;
}

struct RawFact {
  std::uint32_t relation;
  std::vector<NodeId> nodes;
  std::size_t line;
};

std::vector<RawFact> read_facts(const std::filesystem::path& file, Vocabulary& rels,
                                Vocabulary& ents, std::vector<int>& arities,
                                std::vector<std::string>& arity_origin) {
  std::vector<RawFact> out;
  if (!std::filesystem::exists(file)) return out;
  std::ifstream in(file);
  if (!in) throw GraphError(GraphErrc::IoError, "cannot open " + file.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() < 2)
      throw GraphError(GraphErrc::ParseError,
                       where(file, lineno) + ": expected relation<TAB>node(<TAB>node)*");
    for (const auto& c : cols)
      if (c.empty()) throw GraphError(GraphErrc::ParseError, where(file, lineno) + ": empty field");
    RawFact f{rels.intern(cols[0]), {}, lineno};
    const int k = static_cast<int>(cols.size()) - 1;
    if (f.relation >= arities.size()) {
      arities.resize(f.relation + 1, 0);
      arity_origin.resize(f.relation + 1);
    }
    if (arities[f.relation] == 0) {
      arities[f.relation] = k;
      arity_origin[f.relation] = where(file, lineno);
    } else if (arities[f.relation] != k) {
      throw GraphError(GraphErrc::InconsistentArity,
                       "relation '" + cols[0] + "' has arity " + std::to_string(arities[f.relation]) +
                           " at " + arity_origin[f.relation] + " but " + std::to_string(k) +
                           " at " + where(file, lineno));
    }
    for (std::size_t c = 1; c < cols.size(); ++c) f.nodes.push_back(ents.intern(cols[c]));
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<HyperEdge> to_edges(const std::vector<RawFact>& raw) {
  std::vector<HyperEdge> out;
  out.reserve(raw.size());
  for (const auto& f : raw) out.push_back({f.relation, f.nodes});
  return out;
}

}  // namespace

std::vector<HyperEdge> Dataset::all_facts() const {
  std::vector<HyperEdge> out = train;
  out.insert(out.end(), valid.begin(), valid.end());
  out.insert(out.end(), test.begin(), test.end());
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw GraphError(GraphErrc::ParseError, "dataset directory '" + dir.string() + "' not found");
  if (!std::filesystem::exists(dir / "train.txt"))
    throw GraphError(GraphErrc::ParseError, "missing " + (dir / "train.txt").string());

  Vocabulary rels, ents;
  std::vector<int> arities;
  if (std::filesystem::exists(dir / "relations.dict")) rels = read_dict(dir / "relations.dict", &arities);
  if (std::filesystem::exists(dir / "entities.dict")) ents = read_dict(dir / "entities.dict", nullptr);
  std::vector<std::string> origin(arities.size(), "relations.dict");

  auto train = read_facts(dir / "train.txt", rels, ents, arities, origin);
  auto valid = read_facts(dir / "valid.txt", rels, ents, arities, origin);
  auto test = read_facts(dir / "test.txt", rels, ents, arities, origin);

  std::vector<Relation> relations;
  arities.resize(rels.names.size(), 0);
  for (std::uint32_t r = 0; r < rels.names.size(); ++r) {
    if (arities[r] < 1)
      throw GraphError(GraphErrc::ParseError,
                       "relation '" + rels.names[r] + "' has no facts and no arity column");
    relations.push_back({r, rels.names[r], arities[r]});
  }

  Dataset data;
  data.train = to_edges(train);
  data.valid = to_edges(valid);
  data.test = to_edges(test);
  data.entity_names = ents.names;
  data.graph = RelationalHypergraph::build(std::move(relations), data.train, ents.names.size());
  return data;
}

void write_facts(const std::filesystem::path& file, const std::vector<HyperEdge>& facts,
                 const std::vector<Relation>& relations,
                 const std::vector<std::string>& entity_names) {
  std::ofstream out(file);
  if (!out) throw GraphError(GraphErrc::IoError, "cannot write " + file.string());
  for (const auto& f : facts) {
    out << relations.at(f.relation).name;
    for (NodeId v : f.nodes) out << '\t' << entity_names.at(v);
    out << '\n';
  }
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& relations = data.graph.relations();
  write_facts(dir / "train.txt", data.train, relations, data.entity_names);
  write_facts(dir / "valid.txt", data.valid, relations, data.entity_names);
  write_facts(dir / "test.txt", data.test, relations, data.entity_names);

  // Relations with no facts in any split need their arity pinned explicitly.
  std::vector<char> used(relations.size(), 0);
  for (const auto* split : {&data.train, &data.valid, &data.test})
    for (const auto& f : *split) used[f.relation] = 1;
  std::ofstream rel(dir / "relations.dict");
  for (const auto& r : relations) {
    rel << r.id << '\t' << r.name;
    if (!used[r.id]) rel << '\t' << r.arity;
    rel << '\n';
  }
  std::ofstream ent(dir / "entities.dict");
  for (std::size_t v = 0; v < data.entity_names.size(); ++v) ent << v << '\t' << data.entity_names[v] << '\n';
  if (!rel || !ent) throw GraphError(GraphErrc::IoError, "cannot write dictionaries in " + dir.string());
}

}  // namespace hcnet

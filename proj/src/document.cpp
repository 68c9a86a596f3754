#include "limid/document.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <vector>

namespace limid {

namespace {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(text[i++]);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(c);
      ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (c == '{' || c == '}' || c == '|') {
      t.text = c;
      advance(c);
      ++i;
    } else {
      while (i < text.size() && !strchr(" \t\r\n#{}|", text[i])) {
        t.text += text[i];
        advance(text[i++]);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token& peek() const {
    if (done()) throw ParseError(last_line(), 1, "unexpected end of input");
    return toks_[pos_];
  }
  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }
  Token expect(std::string_view text) {
    Token t = next();
    if (t.text != text)
      throw ParseError(t.line, t.col,
                       "expected '" + std::string(text) + "', got '" + t.text + "'");
    return t;
  }

 private:
  int last_line() const { return toks_.empty() ? 1 : toks_.back().line; }
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

double parse_number(const Token& t) {
  const char* begin = t.text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + t.text.size())
    throw ParseError(t.line, t.col, "expected a number, got '" + t.text + "'");
  return v;
}

int parse_card(const Token& t) {
  double v = parse_number(t);
  int card = static_cast<int>(v);
  if (card < 1 || card != v)
    throw ParseError(t.line, t.col, "domain size must be a positive integer");
  return card;
}

struct TableBlock {
  Token name;                // node the block belongs to
  std::vector<Token> parents;
  std::vector<double> values;
  Token opening;             // position for size errors
};

// <keyword already consumed> <node> [| parents...] { numbers }
TableBlock parse_table_block(Cursor& cur) {
  TableBlock b;
  b.name = cur.next();
  if (cur.peek().text == "|") {
    cur.next();
    while (cur.peek().text != "{") b.parents.push_back(cur.next());
  }
  b.opening = cur.expect("{");
  while (cur.peek().text != "}") b.values.push_back(parse_number(cur.next()));
  cur.expect("}");
  return b;
}

NodeId resolve(const Limid& m, const Token& t) {
  auto id = m.find_label(t.text);
  if (!id) throw ParseError(t.line, t.col, "unknown node '" + t.text + "'");
  return *id;
}

// Reorder a block's values (declared variable order) into canonical layout.
Table canonicalize(const Limid& m, const TableBlock& b, NodeId node, bool with_self) {
  std::vector<NodeId> declared;
  for (const auto& p : b.parents) declared.push_back(resolve(m, p));
  {
    auto sorted = declared;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParseError(b.name.line, b.name.col, "duplicate parent in table header");
    if (sorted != m.parents[node])
      throw ParseError(b.name.line, b.name.col,
                       "table parents do not match the declared arcs of '" +
                           b.name.text + "'");
  }
  if (with_self) declared.push_back(node);

  Table t;
  t.vars = m.parents[node];
  if (with_self) t.vars.push_back(node);
  t.cards = m.cards_of(t.vars);
  if (b.values.size() != cell_count(t.cards))
    throw ParseError(b.opening.line, b.opening.col,
                     "table for '" + b.name.text + "' has " +
                         std::to_string(b.values.size()) + " values, expected " +
                         std::to_string(cell_count(t.cards)));

  auto declared_cards = m.cards_of(declared);
  auto map = subindex_map(t.vars, t.cards, declared, declared_cards);
  t.values.resize(b.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = b.values[map[i]];
  return t;
}

Limid parse_impl(std::string_view text) {
  Cursor cur(tokenize(text));
  Limid m;
  std::vector<std::pair<Token, Token>> arcs;
  std::vector<TableBlock> cpts, utils;
  std::vector<Token> order;

  while (!cur.done()) {
    Token kw = cur.next();
    if (kw.text == "node") {
      Token name = cur.next();
      if (m.find_label(name.text))
        throw ParseError(name.line, name.col, "duplicate node '" + name.text + "'");
      Token kind = cur.next();
      Node node;
      node.label = name.text;
      if (kind.text == "chance") node.kind = NodeKind::Chance;
      else if (kind.text == "decision") node.kind = NodeKind::Decision;
      else if (kind.text == "value") node.kind = NodeKind::Value;
      else
        throw ParseError(kind.line, kind.col, "unknown node kind '" + kind.text + "'");
      if (node.kind != NodeKind::Value) {
        node.card = parse_card(cur.next());
        if (!cur.done() && cur.peek().text == "states") {
          cur.next();
          for (int i = 0; i < node.card; ++i) node.states.push_back(cur.next().text);
        }
      }
      m.nodes.push_back(std::move(node));
    } else if (kw.text == "arc") {
      Token from = cur.next();
      cur.expect("->");
      Token to = cur.next();
      arcs.emplace_back(from, to);
    } else if (kw.text == "decision_order") {
      // Names extend to the end of the statement: every following token that
      // is a known decision label (they must all be declared before this).
      while (!cur.done() && m.find_label(cur.peek().text)) order.push_back(cur.next());
      if (order.empty())
        throw ParseError(kw.line, kw.col, "decision_order names no nodes");
    } else if (kw.text == "cpt") {
      cpts.push_back(parse_table_block(cur));
    } else if (kw.text == "utility") {
      utils.push_back(parse_table_block(cur));
    } else {
      throw ParseError(kw.line, kw.col, "unknown statement '" + kw.text + "'");
    }
  }

  m.parents.assign(m.nodes.size(), {});
  m.cpt.assign(m.nodes.size(), {});
  m.util.assign(m.nodes.size(), {});

  for (const auto& [from, to] : arcs) {
    NodeId f = resolve(m, from);
    NodeId t = resolve(m, to);
    auto& pa = m.parents[t];
    auto it = std::lower_bound(pa.begin(), pa.end(), f);
    if (it != pa.end() && *it == f)
      throw ParseError(from.line, from.col,
                       "duplicate arc " + from.text + " -> " + to.text);
    pa.insert(it, f);
  }
  for (const auto& t : order) m.decision_order.push_back(resolve(m, t));

  for (const auto& b : cpts) {
    NodeId n = resolve(m, b.name);
    if (!m.cpt[n].vars.empty() || !m.cpt[n].values.empty())
      throw ParseError(b.name.line, b.name.col, "duplicate cpt for '" + b.name.text + "'");
    m.cpt[n] = canonicalize(m, b, n, true);
  }
  for (const auto& b : utils) {
    NodeId n = resolve(m, b.name);
    if (!m.util[n].values.empty())
      throw ParseError(b.name.line, b.name.col,
                       "duplicate utility for '" + b.name.text + "'");
    m.util[n] = canonicalize(m, b, n, false);
  }
  return m;
}

}  // namespace

Limid parse_document_unchecked(std::string_view text) { return parse_impl(text); }

Limid parse_document(std::string_view text) {
  Limid m = parse_impl(text);
  ValidationReport rep = validate(m);
  if (!rep.ok()) throw ValidationError(std::move(rep));
  return m;
}

std::string format_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

// Emit one table block; values one slice per line.
void emit_table(std::ostringstream& os, const char* kw, const Limid& m, NodeId n,
                const Table& t, bool with_self) {
  os << kw << " " << m.label(n);
  std::span<const NodeId> parents(t.vars.data(),
                                  t.vars.size() - (with_self ? 1 : 0));
  if (!parents.empty()) {
    os << " |";
    for (NodeId p : parents) os << " " << m.label(p);
  }
  os << " {";
  std::size_t row = t.cards.empty() ? 1 : static_cast<std::size_t>(t.cards.back());
  if (t.values.size() <= row) {
    for (double v : t.values) os << " " << format_number(v);
    os << " }\n";
    return;
  }
  os << "\n";
  for (std::size_t i = 0; i < t.values.size(); i += row) {
    os << " ";
    for (std::size_t j = 0; j < row; ++j) os << " " << format_number(t.values[i + j]);
    os << "\n";
  }
  os << "}\n";
}

}  // namespace

std::string emit_document(const Limid& m) {
  std::ostringstream os;
  for (NodeId n = 0; n < m.node_count(); ++n) {
    const Node& node = m.nodes[n];
    os << "node " << node.label << " " << kind_name(node.kind);
    if (node.kind != NodeKind::Value) os << " " << node.card;
    if (!node.states.empty()) {
      os << " states";
      for (const auto& s : node.states) os << " " << s;
    }
    os << "\n";
  }
  for (NodeId n = 0; n < m.node_count(); ++n)
    for (NodeId p : m.parents[n])
      os << "arc " << m.label(p) << " -> " << m.label(n) << "\n";
  if (!m.decision_order.empty()) {
    os << "decision_order";
    for (NodeId d : m.decision_order) os << " " << m.label(d);
    os << "\n";
  }
  for (NodeId n = 0; n < m.node_count(); ++n)
    if (m.is_chance(n)) emit_table(os, "cpt", m, n, m.cpt[n], true);
  for (NodeId n = 0; n < m.node_count(); ++n)
    if (m.is_value(n)) emit_table(os, "utility", m, n, m.util[n], false);
  return os.str();
}

Strategy parse_strategy(std::string_view text, const Limid& m) {
  Cursor cur(tokenize(text));
  Strategy out;
  while (!cur.done()) {
    Token kw = cur.next();
    if (kw.text != "policy")
      throw ParseError(kw.line, kw.col, "expected 'policy', got '" + kw.text + "'");
    TableBlock b = parse_table_block(cur);
    NodeId d = resolve(m, b.name);
    if (!m.is_decision(d))
      throw ParseError(b.name.line, b.name.col, "'" + b.name.text + "' is not a decision");
    if (out.find(d))
      throw ParseError(b.name.line, b.name.col, "duplicate policy for '" + b.name.text + "'");
    Policy p;
    p.decision = d;
    p.table = canonicalize(m, b, d, true);
    try {
      check_policy(m, p);
    } catch (const std::invalid_argument& e) {
      throw ParseError(b.name.line, b.name.col, e.what());
    }
    out.set(std::move(p));
  }
  return out;
}

std::string emit_strategy(const Strategy& strategy, const Limid& m) {
  std::ostringstream os;
  for (const auto& p : strategy.policies)
    emit_table(os, "policy", m, p.decision, p.table, true);
  return os.str();
}

}  // namespace limid

// Regular-language and recognizable-relation algebra for channel expressions.
//
// Provides: regex parsing/printing, compilation to minimal complete DFAs,
// boolean/quotient/append operations on regular languages, and recognizable
// relations over tuples of channel alphabets represented as one DFA per
// channel plus a finite acceptance set of per-channel state vectors.

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfsm::lang {

/// A message symbol. Symbols compare by name; channel alphabets are disjoint.
using Symbol = std::string;
/// An ordered, duplicate-free list of symbols.
using Alphabet = std::vector<Symbol>;
/// A channel content: finite sequence of symbols, head first.
using Word = std::vector<Symbol>;

inline std::string word_to_string(const Word& w) {
  if (w.empty()) return "eps";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += w[i];
  }
  return s;
}

inline int alphabet_index(const Alphabet& a, const Symbol& s) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] == s) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// Regex
// ---------------------------------------------------------------------------

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

/// Rational-expression tree: empty set, epsilon, symbol, union, concat, star.
struct Regex {
  enum class Kind { Empty, Eps, Sym, Union, Concat, Star };
  Kind kind;
  Symbol sym;            // Kind::Sym only
  RegexPtr left, right;  // Union/Concat use both, Star uses left
};

inline RegexPtr re_empty() { return std::make_shared<Regex>(Regex{Regex::Kind::Empty, {}, nullptr, nullptr}); }
inline RegexPtr re_eps() { return std::make_shared<Regex>(Regex{Regex::Kind::Eps, {}, nullptr, nullptr}); }
inline RegexPtr re_sym(Symbol s) { return std::make_shared<Regex>(Regex{Regex::Kind::Sym, std::move(s), nullptr, nullptr}); }

inline RegexPtr re_union(RegexPtr a, RegexPtr b) {
  if (a->kind == Regex::Kind::Empty) return b;
  if (b->kind == Regex::Kind::Empty) return a;
  return std::make_shared<Regex>(Regex{Regex::Kind::Union, {}, std::move(a), std::move(b)});
}

inline RegexPtr re_concat(RegexPtr a, RegexPtr b) {
  if (a->kind == Regex::Kind::Empty || b->kind == Regex::Kind::Empty) return re_empty();
  if (a->kind == Regex::Kind::Eps) return b;
  if (b->kind == Regex::Kind::Eps) return a;
  return std::make_shared<Regex>(Regex{Regex::Kind::Concat, {}, std::move(a), std::move(b)});
}

inline RegexPtr re_star(RegexPtr a) {
  if (a->kind == Regex::Kind::Empty || a->kind == Regex::Kind::Eps) return re_eps();
  if (a->kind == Regex::Kind::Star) return a;
  return std::make_shared<Regex>(Regex{Regex::Kind::Star, {}, std::move(a), nullptr});
}

/// Error with a character position into the offending expression text.
struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

namespace detail {

struct RegexParser {
  const std::string& text;
  const Alphabet& alphabet;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
      ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  static bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

  RegexPtr parse_union() {
    RegexPtr r = parse_concat();
    while (peek() == '|') {
      ++pos;
      r = re_union(r, parse_concat());
    }
    return r;
  }
  RegexPtr parse_concat() {
    RegexPtr r = parse_star();
    while (peek() == '.') {
      ++pos;
      r = re_concat(r, parse_star());
    }
    return r;
  }
  RegexPtr parse_star() {
    RegexPtr r = parse_atom();
    while (peek() == '*') {
      ++pos;
      r = re_star(r);
    }
    return r;
  }
  RegexPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of expression", pos);
    char c = text[pos];
    if (c == '(') {
      std::size_t open = pos++;
      RegexPtr r = parse_union();
      if (peek() != ')') throw ParseError("unbalanced '(' ", open);
      ++pos;
      return r;
    }
    if (!ident_char(c)) throw ParseError(std::string("unexpected character '") + c + "'", pos);
    std::size_t begin = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    std::string name = text.substr(begin, pos - begin);
    if (name == "empty") return re_empty();
    if (name == "eps") return re_eps();
    if (alphabet_index(alphabet, name) < 0)
      throw ParseError("symbol '" + name + "' not in alphabet", begin);
    return re_sym(name);
  }
};

}  // namespace detail

/// Parse a channel expression. Grammar: `empty`, `eps`, identifiers,
/// `.` concatenation, `|` union, postfix `*`, parentheses;
/// precedence `*` > `.` > `|`. Juxtaposition is not concatenation.
inline RegexPtr parse_regex(const std::string& text, const Alphabet& alphabet) {
  detail::RegexParser p{text, alphabet};
  RegexPtr r = p.parse_union();
  if (!p.at_end()) throw ParseError("trailing input after expression", p.pos);
  return r;
}

/// Print an expression that parse_regex maps back to an equivalent tree.
inline std::string print_regex(const RegexPtr& r) {
  // Precedence levels: union 0, concat 1, star 2, atom 3.
  struct P {
    static std::string go(const Regex& n, int ctx) {
      switch (n.kind) {
        case Regex::Kind::Empty: return "empty";
        case Regex::Kind::Eps: return "eps";
        case Regex::Kind::Sym: return n.sym;
        case Regex::Kind::Union: {
          std::string s = go(*n.left, 0) + " | " + go(*n.right, 0);
          return ctx > 0 ? "(" + s + ")" : s;
        }
        case Regex::Kind::Concat: {
          std::string s = go(*n.left, 1) + " . " + go(*n.right, 1);
          return ctx > 1 ? "(" + s + ")" : s;
        }
        case Regex::Kind::Star: return go(*n.left, 3) + "*";
      }
      return {};
    }
  };
  return P::go(*r, 0);
}

// ---------------------------------------------------------------------------
// Dfa
// ---------------------------------------------------------------------------

/// Complete deterministic finite automaton over an explicit alphabet.
struct Dfa {
  Alphabet alphabet;
  int num_states = 0;
  std::vector<std::vector<int>> delta;  // delta[state][symbol index]
  int start = 0;
  std::vector<char> accepting;

  int step(int s, int symIdx) const { return delta[s][symIdx]; }
  /// Run on a word; returns the end state, or -1 if a symbol is foreign.
  int run(const Word& w) const {
    int s = start;
    for (const Symbol& x : w) {
      int i = alphabet_index(alphabet, x);
      if (i < 0) return -1;
      s = delta[s][i];
    }
    return s;
  }
};

inline void require_same_alphabet(const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("alphabet mismatch");
}

/// Membership of a word in L(d). Words containing foreign symbols are not members.
inline bool dfa_member(const Dfa& d, const Word& w) {
  int s = d.run(w);
  return s >= 0 && d.accepting[s];
}

/// The 1-state automaton of the empty language.
inline Dfa dfa_none(const Alphabet& alphabet) {
  Dfa d;
  d.alphabet = alphabet;
  d.num_states = 1;
  d.delta.assign(1, std::vector<int>(alphabet.size(), 0));
  d.start = 0;
  d.accepting = {0};
  return d;
}

/// The 1-state automaton of the full language over the alphabet.
inline Dfa dfa_all(const Alphabet& alphabet) {
  Dfa d = dfa_none(alphabet);
  d.accepting = {1};
  return d;
}

namespace detail {

/// Nondeterministic automaton used internally; symbol index -1 is epsilon.
struct Nfa {
  int num_states = 0;
  std::vector<std::vector<std::pair<int, int>>> edges;  // state -> (symIdx, to)
  std::vector<int> starts;
  std::vector<char> accepting;

  int add_state() {
    edges.emplace_back();
    accepting.push_back(0);
    return num_states++;
  }
  void add_edge(int from, int sym, int to) { edges[from].push_back({sym, to}); }
};

inline void eps_close(const Nfa& n, std::set<int>& states) {
  std::vector<int> stack(states.begin(), states.end());
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (auto [sym, to] : n.edges[s])
      if (sym < 0 && !states.count(to)) {
        states.insert(to);
        stack.push_back(to);
      }
  }
}

inline Dfa determinize(const Nfa& n, const Alphabet& alphabet) {
  Dfa d;
  d.alphabet = alphabet;
  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> subsets;
  auto intern = [&](std::set<int> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(subsets.size());
    ids.emplace(s, id);
    subsets.push_back(std::move(s));
    return id;
  };
  std::set<int> init(n.starts.begin(), n.starts.end());
  eps_close(n, init);
  intern(init);
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    d.delta.emplace_back(alphabet.size(), 0);
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      std::set<int> next;
      for (int s : subsets[cur])
        for (auto [sym, to] : n.edges[s])
          if (sym == static_cast<int>(a)) next.insert(to);
      eps_close(n, next);
      d.delta[cur][a] = intern(std::move(next));
    }
  }
  d.num_states = static_cast<int>(subsets.size());
  d.start = 0;
  d.accepting.assign(d.num_states, 0);
  for (int i = 0; i < d.num_states; ++i)
    for (int s : subsets[i])
      if (n.accepting[s]) d.accepting[i] = 1;
  return d;
}

/// Thompson construction; returns (start, accept) fragment states.
inline std::pair<int, int> thompson(Nfa& n, const Regex& r, const Alphabet& alphabet) {
  int s = n.add_state(), t = n.add_state();
  switch (r.kind) {
    case Regex::Kind::Empty:
      break;
    case Regex::Kind::Eps:
      n.add_edge(s, -1, t);
      break;
    case Regex::Kind::Sym: {
      int idx = alphabet_index(alphabet, r.sym);
      if (idx < 0) throw std::invalid_argument("regex symbol '" + r.sym + "' not in alphabet");
      n.add_edge(s, idx, t);
      break;
    }
    case Regex::Kind::Union: {
      auto [ls, lt] = thompson(n, *r.left, alphabet);
      auto [rs, rt] = thompson(n, *r.right, alphabet);
      n.add_edge(s, -1, ls);
      n.add_edge(s, -1, rs);
      n.add_edge(lt, -1, t);
      n.add_edge(rt, -1, t);
      break;
    }
    case Regex::Kind::Concat: {
      auto [ls, lt] = thompson(n, *r.left, alphabet);
      auto [rs, rt] = thompson(n, *r.right, alphabet);
      n.add_edge(s, -1, ls);
      n.add_edge(lt, -1, rs);
      n.add_edge(rt, -1, t);
      break;
    }
    case Regex::Kind::Star: {
      auto [ls, lt] = thompson(n, *r.left, alphabet);
      n.add_edge(s, -1, t);
      n.add_edge(s, -1, ls);
      n.add_edge(lt, -1, ls);
      n.add_edge(lt, -1, t);
      break;
    }
  }
  return {s, t};
}

}  // namespace detail

/// Minimal complete DFA with the same language, states renumbered in
/// breadth-first order from the start (canonical up to language equality).
inline Dfa minimize(const Dfa& d) {
  // Reachable restriction.
  std::vector<int> order;
  std::vector<int> idx(d.num_states, -1);
  order.push_back(d.start);
  idx[d.start] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
      int t = d.delta[order[i]][a];
      if (idx[t] < 0) {
        idx[t] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  int n = static_cast<int>(order.size());
  // Moore partition refinement on the reachable part.
  std::vector<int> cls(n);
  for (int i = 0; i < n; ++i) cls[i] = d.accepting[order[i]] ? 1 : 0;
  int numCls = 2;
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::vector<int>, int> sig;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> key;
      key.reserve(d.alphabet.size() + 1);
      key.push_back(cls[i]);
      for (std::size_t a = 0; a < d.alphabet.size(); ++a) key.push_back(cls[idx[d.delta[order[i]][a]]]);
      auto [it, inserted] = sig.emplace(std::move(key), static_cast<int>(sig.size()));
      next[i] = it->second;
    }
    if (static_cast<int>(sig.size()) != numCls) changed = true;
    numCls = static_cast<int>(sig.size());
    if (!changed) {
      // Also stop when the partition content stabilized even if count matches.
      changed = (next != cls);
    }
    cls = std::move(next);
    if (!changed) break;
  }
  // Canonical BFS renumbering of classes from the start class.
  std::vector<int> canon(numCls, -1);
  std::vector<int> repr;  // representative reachable-index per canonical class
  canon[cls[0]] = 0;
  repr.push_back(0);
  for (std::size_t i = 0; i < repr.size(); ++i)
    for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
      int targetCls = cls[idx[d.delta[order[repr[i]]][a]]];
      if (canon[targetCls] < 0) {
        canon[targetCls] = static_cast<int>(repr.size());
        repr.push_back(idx[d.delta[order[repr[i]]][a]]);
      }
    }
  Dfa m;
  m.alphabet = d.alphabet;
  m.num_states = static_cast<int>(repr.size());
  m.start = 0;
  m.delta.assign(m.num_states, std::vector<int>(d.alphabet.size(), 0));
  m.accepting.assign(m.num_states, 0);
  for (int i = 0; i < m.num_states; ++i) {
    m.accepting[i] = d.accepting[order[repr[i]]];
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      m.delta[i][a] = canon[cls[idx[d.delta[order[repr[i]]][a]]]];
  }
  return m;
}

/// Compile a regex to the minimal complete DFA of its language.
inline Dfa compile(const RegexPtr& r, const Alphabet& alphabet) {
  detail::Nfa n;
  auto [s, t] = detail::thompson(n, *r, alphabet);
  n.starts = {s};
  n.accepting[t] = 1;
  return minimize(detail::determinize(n, alphabet));
}

/// Product-automaton search for a word in L(b) \ L(a); nullopt if none.
inline std::optional<Word> witness_not_included(const Dfa& a, const Dfa& b) {
  require_same_alphabet(a, b);
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> parent;  // (sa,sb) -> (pred, symIdx)
  std::deque<std::pair<int, int>> q;
  std::pair<int, int> init{a.start, b.start};
  parent[init] = {init, -1};
  q.push_back(init);
  while (!q.empty()) {
    auto [sa, sb] = q.front();
    q.pop_front();
    if (b.accepting[sb] && !a.accepting[sa]) {
      Word w;
      std::pair<int, int> cur{sa, sb};
      while (parent[cur].second >= 0) {
        w.push_back(a.alphabet[parent[cur].second]);
        cur = parent[cur].first;
      }
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (std::size_t x = 0; x < a.alphabet.size(); ++x) {
      std::pair<int, int> nxt{a.delta[sa][x], b.delta[sb][x]};
      if (!parent.count(nxt)) {
        parent[nxt] = {{sa, sb}, static_cast<int>(x)};
        q.push_back(nxt);
      }
    }
  }
  return std::nullopt;
}

/// true iff L(b) ⊆ L(a); decided by product construction.
inline bool includes(const Dfa& a, const Dfa& b) { return !witness_not_included(a, b).has_value(); }

/// true iff L(a) = L(b).
inline bool equivalent(const Dfa& a, const Dfa& b) { return includes(a, b) && includes(b, a); }

/// true iff L(d) is empty.
inline bool is_empty(const Dfa& d) {
  std::vector<char> seen(d.num_states, 0);
  std::vector<int> stack{d.start};
  seen[d.start] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    if (d.accepting[s]) return false;
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      if (!seen[d.delta[s][a]]) {
        seen[d.delta[s][a]] = 1;
        stack.push_back(d.delta[s][a]);
      }
  }
  return true;
}

/// Complement within the alphabet's full language.
inline Dfa complement(const Dfa& d) {
  Dfa c = d;
  for (auto& f : c.accepting) f = !f;
  return c;
}

namespace detail {

inline Dfa product(const Dfa& a, const Dfa& b, bool (*comb)(bool, bool)) {
  require_same_alphabet(a, b);
  Dfa p;
  p.alphabet = a.alphabet;
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> states;
  auto intern = [&](std::pair<int, int> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(states.size());
    ids.emplace(s, id);
    states.push_back(s);
    return id;
  };
  intern({a.start, b.start});
  for (std::size_t i = 0; i < states.size(); ++i) {
    p.delta.emplace_back(p.alphabet.size(), 0);
    for (std::size_t x = 0; x < p.alphabet.size(); ++x)
      p.delta[i][x] = intern({a.delta[states[i].first][x], b.delta[states[i].second][x]});
  }
  p.num_states = static_cast<int>(states.size());
  p.start = 0;
  p.accepting.assign(p.num_states, 0);
  for (int i = 0; i < p.num_states; ++i)
    p.accepting[i] = comb(a.accepting[states[i].first], b.accepting[states[i].second]);
  return p;
}

}  // namespace detail

/// L(a) ∩ L(b).
inline Dfa intersect(const Dfa& a, const Dfa& b) {
  return detail::product(a, b, [](bool x, bool y) { return x && y; });
}

/// L(a) ∪ L(b).
inline Dfa unite(const Dfa& a, const Dfa& b) {
  return detail::product(a, b, [](bool x, bool y) { return x || y; });
}

/// {x | b·x ∈ L(q)}: the start state advanced along b.
inline Dfa left_quotient_symbol(const Dfa& q, const Symbol& b) {
  int idx = alphabet_index(q.alphabet, b);
  if (idx < 0) throw std::invalid_argument("quotient symbol '" + b + "' not in alphabet");
  Dfa r = q;
  r.start = q.delta[q.start][idx];
  return r;
}

/// L(q)·{b}.
inline Dfa append_symbol(const Dfa& q, const Symbol& b) {
  int idx = alphabet_index(q.alphabet, b);
  if (idx < 0) throw std::invalid_argument("append symbol '" + b + "' not in alphabet");
  detail::Nfa n;
  for (int i = 0; i < q.num_states; ++i) n.add_state();
  int fin = n.add_state();
  for (int i = 0; i < q.num_states; ++i) {
    for (std::size_t a = 0; a < q.alphabet.size(); ++a) n.add_edge(i, static_cast<int>(a), q.delta[i][a]);
    if (q.accepting[i]) n.add_edge(i, idx, fin);
  }
  n.accepting[fin] = 1;
  n.starts = {q.start};
  return minimize(detail::determinize(n, q.alphabet));
}

/// {y | ∃x ∈ L(x): x·y ∈ L(q)}: union of right languages of the q-states
/// reachable from q.start under some word of L(x).
inline Dfa left_quotient_language(const Dfa& q, const Dfa& x) {
  require_same_alphabet(q, x);
  // Product reachability: states of q reachable in lockstep with an accepting x-state.
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack{{q.start, x.start}};
  seen.insert(stack[0]);
  std::set<int> starts;
  while (!stack.empty()) {
    auto [sq, sx] = stack.back();
    stack.pop_back();
    if (x.accepting[sx]) starts.insert(sq);
    for (std::size_t a = 0; a < q.alphabet.size(); ++a) {
      std::pair<int, int> nxt{q.delta[sq][a], x.delta[sx][a]};
      if (seen.insert(nxt).second) stack.push_back(nxt);
    }
  }
  detail::Nfa n;
  for (int i = 0; i < q.num_states; ++i) n.add_state();
  for (int i = 0; i < q.num_states; ++i) {
    for (std::size_t a = 0; a < q.alphabet.size(); ++a) n.add_edge(i, static_cast<int>(a), q.delta[i][a]);
    n.accepting[i] = q.accepting[i];
  }
  n.starts.assign(starts.begin(), starts.end());
  if (n.starts.empty()) return dfa_none(q.alphabet);
  return minimize(detail::determinize(n, q.alphabet));
}

/// Canonical text form of the minimized automaton; equal strings ⇔ equal languages.
inline std::string dfa_key(const Dfa& d) {
  Dfa m = minimize(d);
  std::string k;
  for (const auto& s : m.alphabet) {
    k += s;
    k += ',';
  }
  k += '|';
  k += std::to_string(m.num_states);
  for (int i = 0; i < m.num_states; ++i) {
    k += m.accepting[i] ? ";1" : ";0";
    for (std::size_t a = 0; a < m.alphabet.size(); ++a) k += ":" + std::to_string(m.delta[i][a]);
  }
  return k;
}

/// Regex describing L(d), via state elimination. Round-trips through compile.
inline RegexPtr dfa_to_regex(const Dfa& d) {
  int n = d.num_states;
  // GNFA with fresh start n and accept n+1.
  std::vector<std::vector<RegexPtr>> e(n + 2, std::vector<RegexPtr>(n + 2));
  for (int i = 0; i < n + 2; ++i)
    for (int j = 0; j < n + 2; ++j) e[i][j] = re_empty();
  for (int i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      e[i][d.delta[i][a]] = re_union(e[i][d.delta[i][a]], re_sym(d.alphabet[a]));
  e[n][d.start] = re_eps();
  for (int i = 0; i < n; ++i)
    if (d.accepting[i]) e[i][n + 1] = re_eps();
  std::vector<int> alive;
  for (int i = 0; i < n; ++i) alive.push_back(i);
  for (int kill : alive) {
    RegexPtr loop = re_star(e[kill][kill]);
    for (int i = 0; i < n + 2; ++i) {
      if (i == kill || e[i][kill]->kind == Regex::Kind::Empty) continue;
      for (int j = 0; j < n + 2; ++j) {
        if (j == kill || e[kill][j]->kind == Regex::Kind::Empty) continue;
        e[i][j] = re_union(e[i][j], re_concat(e[i][kill], re_concat(loop, e[kill][j])));
      }
    }
    for (int i = 0; i < n + 2; ++i) {
      e[i][kill] = re_empty();
      e[kill][i] = re_empty();
    }
  }
  return e[n][n + 1];
}

// ---------------------------------------------------------------------------
// Recognizable relations
// ---------------------------------------------------------------------------

/// Guard against acceptance-set blowups; raised instead of silent truncation.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultVectorCap = 1000000;

/// Recognizable relation over an ordered channel list: one complete DFA per
/// channel plus an acceptance set of per-channel end-state vectors.
/// A content vector is a member iff the vector of run-end states is accepted.
struct RecRel {
  std::vector<std::string> channels;  // channel ids, fixed order
  std::vector<Dfa> per_channel;
  std::set<std::vector<int>> acceptance;

  std::size_t arity() const { return channels.size(); }
};

inline void require_same_channels(const RecRel& a, const RecRel& b) {
  if (a.channels != b.channels) throw std::invalid_argument("channel-list mismatch");
  for (std::size_t i = 0; i < a.per_channel.size(); ++i)
    if (a.per_channel[i].alphabet != b.per_channel[i].alphabet)
      throw std::invalid_argument("per-channel alphabet mismatch");
}

/// Membership of a channel-content vector.
inline bool rel_member(const RecRel& r, const std::vector<Word>& contents) {
  if (contents.size() != r.arity()) throw std::invalid_argument("content arity mismatch");
  std::vector<int> v(r.arity());
  for (std::size_t i = 0; i < r.arity(); ++i) {
    int s = r.per_channel[i].run(contents[i]);
    if (s < 0) return false;
    v[i] = s;
  }
  return r.acceptance.count(v) > 0;
}

/// Prune unreachable per-channel states, merge behaviorally equal states
/// (relative to the acceptance set), and renumber canonically.
inline RecRel rel_reduce(const RecRel& r) {
  RecRel out = r;
  for (std::size_t c = 0; c < out.arity(); ++c) {
    Dfa& d = out.per_channel[c];
    // Reachability restriction + BFS order.
    std::vector<int> order{d.start};
    std::vector<int> idx(d.num_states, -1);
    idx[d.start] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
      for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
        int t = d.delta[order[i]][a];
        if (idx[t] < 0) {
          idx[t] = static_cast<int>(order.size());
          order.push_back(t);
        }
      }
    int n = static_cast<int>(order.size());
    // Initial partition: states are distinguished by their acceptance residue
    // (the set of other-channel state vectors completing them to acceptance).
    std::map<int, std::set<std::vector<int>>> residue;
    std::set<std::vector<int>> keptAcc;
    for (const auto& v : out.acceptance) {
      if (idx[v[c]] < 0) continue;  // vector touches an unreachable state
      std::vector<int> rest;
      rest.reserve(v.size() - 1);
      for (std::size_t j = 0; j < v.size(); ++j)
        if (j != c) rest.push_back(v[j]);
      residue[idx[v[c]]].insert(std::move(rest));
      keptAcc.insert(v);
    }
    std::map<std::set<std::vector<int>>, int> sigIds;
    std::vector<int> cls(n);
    for (int i = 0; i < n; ++i) {
      auto& sig = residue[i];
      auto [it, ins] = sigIds.emplace(sig, static_cast<int>(sigIds.size()));
      cls[i] = it->second;
    }
    // Moore refinement.
    for (bool changed = true; changed;) {
      std::map<std::vector<int>, int> sig;
      std::vector<int> next(n);
      for (int i = 0; i < n; ++i) {
        std::vector<int> key;
        key.push_back(cls[i]);
        for (std::size_t a = 0; a < d.alphabet.size(); ++a) key.push_back(cls[idx[d.delta[order[i]][a]]]);
        auto [it, ins] = sig.emplace(std::move(key), static_cast<int>(sig.size()));
        next[i] = it->second;
      }
      changed = (next != cls);
      cls = std::move(next);
    }
    // Canonical BFS renumbering of classes.
    int numCls = 0;
    for (int x : cls) numCls = std::max(numCls, x + 1);
    std::vector<int> canon(numCls, -1);
    std::vector<int> repr;
    canon[cls[0]] = 0;
    repr.push_back(0);
    for (std::size_t i = 0; i < repr.size(); ++i)
      for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
        int tc = cls[idx[d.delta[order[repr[i]]][a]]];
        if (canon[tc] < 0) {
          canon[tc] = static_cast<int>(repr.size());
          repr.push_back(idx[d.delta[order[repr[i]]][a]]);
        }
      }
    Dfa nd;
    nd.alphabet = d.alphabet;
    nd.num_states = static_cast<int>(repr.size());
    nd.start = 0;
    nd.delta.assign(nd.num_states, std::vector<int>(d.alphabet.size(), 0));
    nd.accepting.assign(nd.num_states, 0);  // unused by relations; kept empty
    for (int i = 0; i < nd.num_states; ++i)
      for (std::size_t a = 0; a < d.alphabet.size(); ++a)
        nd.delta[i][a] = canon[cls[idx[d.delta[order[repr[i]]][a]]]];
    // Remap acceptance vectors through reachable-index then class then canon.
    std::set<std::vector<int>> newAcc;
    for (auto v : keptAcc) {
      v[c] = canon[cls[idx[v[c]]]];
      newAcc.insert(std::move(v));
    }
    d = std::move(nd);
    out.acceptance = std::move(newAcc);
  }
  return out;
}

/// Canonical text form; equal strings ⇔ equal relations (after rel_reduce).
inline std::string rel_key(const RecRel& r0) {
  RecRel r = rel_reduce(r0);
  std::string k;
  for (const auto& c : r.channels) k += c + ",";
  k += '|';
  for (const auto& d : r.per_channel) {
    for (const auto& s : d.alphabet) k += s + ",";
    k += '#' + std::to_string(d.num_states);
    for (int i = 0; i < d.num_states; ++i)
      for (std::size_t a = 0; a < d.alphabet.size(); ++a) k += ":" + std::to_string(d.delta[i][a]);
    k += '|';
  }
  for (const auto& v : r.acceptance) {
    for (int x : v) k += std::to_string(x) + ",";
    k += ';';
  }
  return k;
}

/// The full relation (every content vector) over the given channel alphabets.
inline RecRel rel_full(const std::vector<std::string>& channels, const std::vector<Alphabet>& alphabets) {
  RecRel r;
  r.channels = channels;
  for (const auto& a : alphabets) r.per_channel.push_back(dfa_all(a));
  r.acceptance.insert(std::vector<int>(channels.size(), 0));
  return r;
}

/// The empty relation over the given channel alphabets.
inline RecRel rel_none(const std::vector<std::string>& channels, const std::vector<Alphabet>& alphabets) {
  RecRel r;
  r.channels = channels;
  for (const auto& a : alphabets) r.per_channel.push_back(dfa_all(a));
  return r;
}

/// Product relation L₁ × L₂ × … × Lₖ from per-channel DFAs.
inline RecRel rel_product(const std::vector<std::string>& channels, std::vector<Dfa> components,
                          std::size_t cap = kDefaultVectorCap) {
  RecRel r;
  r.channels = channels;
  r.per_channel = std::move(components);
  // Acceptance = product of the per-channel accepting sets.
  std::vector<std::vector<int>> accs(r.arity());
  std::size_t total = 1;
  for (std::size_t i = 0; i < r.arity(); ++i) {
    for (int s = 0; s < r.per_channel[i].num_states; ++s)
      if (r.per_channel[i].accepting[s]) accs[i].push_back(s);
    total *= std::max<std::size_t>(accs[i].size(), 1);
    if (accs[i].empty()) return rel_reduce(r);  // some component empty ⇒ empty relation
  }
  if (total > cap) throw CapacityError("acceptance-vector cap exceeded in rel_product");
  std::vector<int> v(r.arity(), 0);
  std::vector<std::size_t> pick(r.arity(), 0);
  for (;;) {
    for (std::size_t i = 0; i < r.arity(); ++i) v[i] = accs[i][pick[i]];
    r.acceptance.insert(v);
    std::size_t i = 0;
    for (; i < r.arity(); ++i) {
      if (++pick[i] < accs[i].size()) break;
      pick[i] = 0;
    }
    if (i == r.arity()) break;
  }
  return rel_reduce(r);
}

namespace detail {

struct PairedRel {
  RecRel rel;                                       // product automata per channel
  std::vector<std::vector<std::pair<int, int>>> states;  // per channel: product state -> (a,b) states
};

/// Pair two relations channel-wise on product automata (reachable parts only).
inline PairedRel pair_rels(const RecRel& a, const RecRel& b) {
  require_same_channels(a, b);
  PairedRel p;
  p.rel.channels = a.channels;
  p.states.resize(a.arity());
  for (std::size_t c = 0; c < a.arity(); ++c) {
    const Dfa& da = a.per_channel[c];
    const Dfa& db = b.per_channel[c];
    Dfa d;
    d.alphabet = da.alphabet;
    std::map<std::pair<int, int>, int> ids;
    auto intern = [&](std::pair<int, int> s) {
      auto it = ids.find(s);
      if (it != ids.end()) return it->second;
      int id = static_cast<int>(p.states[c].size());
      ids.emplace(s, id);
      p.states[c].push_back(s);
      return id;
    };
    intern({da.start, db.start});
    for (std::size_t i = 0; i < p.states[c].size(); ++i) {
      d.delta.emplace_back(d.alphabet.size(), 0);
      for (std::size_t x = 0; x < d.alphabet.size(); ++x)
        d.delta[i][x] = intern({da.delta[p.states[c][i].first][x], db.delta[p.states[c][i].second][x]});
    }
    d.num_states = static_cast<int>(p.states[c].size());
    d.start = 0;
    d.accepting.assign(d.num_states, 0);
    p.rel.per_channel.push_back(std::move(d));
  }
  return p;
}

}  // namespace detail

/// Union of two relations over the same channels.
inline RecRel rel_union(const RecRel& a, const RecRel& b, std::size_t cap = kDefaultVectorCap) {
  detail::PairedRel p = detail::pair_rels(a, b);
  // Membership holds iff the a-projection vector is accepted by a or the
  // b-projection vector by b; enumerate over the reachable product states.
  std::size_t total = 1;
  for (const auto& st : p.states) total *= st.size();
  if (total > cap) throw CapacityError("acceptance-vector cap exceeded in rel_union");
  std::vector<std::size_t> pick(p.rel.arity(), 0);
  std::vector<int> va(p.rel.arity()), vb(p.rel.arity()), v(p.rel.arity());
  if (total > 0) {
    for (;;) {
      for (std::size_t i = 0; i < p.rel.arity(); ++i) {
        v[i] = static_cast<int>(pick[i]);
        va[i] = p.states[i][pick[i]].first;
        vb[i] = p.states[i][pick[i]].second;
      }
      if (a.acceptance.count(va) || b.acceptance.count(vb)) p.rel.acceptance.insert(v);
      std::size_t i = 0;
      for (; i < p.rel.arity(); ++i) {
        if (++pick[i] < p.states[i].size()) break;
        pick[i] = 0;
      }
      if (i == p.rel.arity()) break;
    }
  }
  return rel_reduce(p.rel);
}

/// Intersection of two relations over the same channels.
inline RecRel rel_intersect(const RecRel& a, const RecRel& b, std::size_t cap = kDefaultVectorCap) {
  detail::PairedRel p = detail::pair_rels(a, b);
  std::size_t total = 1;
  for (const auto& st : p.states) total *= st.size();
  if (total > cap) throw CapacityError("acceptance-vector cap exceeded in rel_intersect");
  std::vector<std::size_t> pick(p.rel.arity(), 0);
  std::vector<int> va(p.rel.arity()), vb(p.rel.arity()), v(p.rel.arity());
  if (total > 0) {
    for (;;) {
      for (std::size_t i = 0; i < p.rel.arity(); ++i) {
        v[i] = static_cast<int>(pick[i]);
        va[i] = p.states[i][pick[i]].first;
        vb[i] = p.states[i][pick[i]].second;
      }
      if (a.acceptance.count(va) && b.acceptance.count(vb)) p.rel.acceptance.insert(v);
      std::size_t i = 0;
      for (; i < p.rel.arity(); ++i) {
        if (++pick[i] < p.states[i].size()) break;
        pick[i] = 0;
      }
      if (i == p.rel.arity()) break;
    }
  }
  return rel_reduce(p.rel);
}

/// Complement within the product of the channels' full languages.
inline RecRel rel_complement(const RecRel& r0, std::size_t cap = kDefaultVectorCap) {
  RecRel r = rel_reduce(r0);
  std::size_t total = 1;
  for (const auto& d : r.per_channel) total *= static_cast<std::size_t>(d.num_states);
  if (total > cap) throw CapacityError("acceptance-vector cap exceeded in rel_complement");
  std::set<std::vector<int>> acc;
  std::vector<int> v(r.arity(), 0);
  for (;;) {
    if (!r.acceptance.count(v)) acc.insert(v);
    std::size_t i = 0;
    for (; i < r.arity(); ++i) {
      if (++v[i] < r.per_channel[i].num_states) break;
      v[i] = 0;
    }
    if (i == r.arity()) break;
  }
  r.acceptance = std::move(acc);
  return rel_reduce(r);
}

/// Witness vector in b \ a (channel contents), or nullopt if b ⊆ a.
inline std::optional<std::vector<Word>> rel_witness_not_included(const RecRel& a0, const RecRel& b0) {
  RecRel a = rel_reduce(a0), b = rel_reduce(b0);
  detail::PairedRel p = detail::pair_rels(a, b);
  // For each channel: product state id -> (a-state, b-state); all product
  // states are reachable by construction, so any combination is realizable.
  // b-membership needs per-channel b-states forming a b.acceptance vector;
  // the combination is a counterexample iff some compatible a-vector choice
  // avoids a.acceptance entirely — i.e. #(compatible product vectors) exceeds
  // #(those whose a-projection is accepted).
  for (const auto& bacc : b.acceptance) {
    std::vector<std::vector<int>> options(p.rel.arity());  // product-state ids per channel
    bool feasible = true;
    for (std::size_t c = 0; c < p.rel.arity() && feasible; ++c) {
      for (std::size_t i = 0; i < p.states[c].size(); ++i)
        if (p.states[c][i].second == bacc[c]) options[c].push_back(static_cast<int>(i));
      feasible = !options[c].empty();
    }
    if (!feasible) continue;  // b-vector not realizable against the pairing
    // Count accepted combinations by iterating a.acceptance.
    // A combination is determined by per-channel choices; a-projection must hit a.acceptance.
    std::size_t totalCombos = 1;
    bool overflow = false;
    for (const auto& o : options) {
      if (totalCombos > kDefaultVectorCap / std::max<std::size_t>(o.size(), 1)) overflow = true;
      totalCombos *= o.size();
    }
    std::size_t accepted = 0;
    for (const auto& aacc : a.acceptance) {
      // Count combinations whose a-projection equals aacc: per channel, the
      // number of options with that a-state.
      std::size_t ways = 1;
      for (std::size_t c = 0; c < p.rel.arity() && ways; ++c) {
        std::size_t cnt = 0;
        for (int id : options[c])
          if (p.states[c][id].first == aacc[c]) ++cnt;
        ways *= cnt;
      }
      accepted += ways;
    }
    if (!overflow && accepted >= totalCombos) continue;  // all combinations accepted by a
    // Some combination is missing: search it depth-first.
    std::vector<int> chosen(p.rel.arity(), -1);
    std::vector<int> aproj(p.rel.arity(), 0);
    // Precompute a.acceptance filtered progressively.
    struct Dig {
      const detail::PairedRel& p;
      const RecRel& a;
      const std::vector<std::vector<int>>& options;
      std::vector<int>& chosen;
      bool found = false;
      std::vector<std::vector<int>> accPool;
      Dig(const detail::PairedRel& p, const RecRel& a, const std::vector<std::vector<int>>& o,
          std::vector<int>& ch)
          : p(p), a(a), options(o), chosen(ch) {
        accPool.assign(a.acceptance.begin(), a.acceptance.end());
      }
      bool rec(std::size_t c, std::vector<std::vector<int>> pool) {
        if (c == options.size()) return pool.empty();  // no a-vector matches ⇒ counterexample
        for (int id : options[c]) {
          int astate = p.states[c][id].first;
          std::vector<std::vector<int>> next;
          for (auto& v : pool)
            if (v[c] == astate) next.push_back(v);
          // Prune: if every completion is accepted this subtree can still
          // contain a counterexample only if next doesn't cover the full
          // remaining product; cheapest correct test is recursing.
          chosen[c] = id;
          if (rec(c + 1, std::move(next))) return true;
        }
        chosen[c] = -1;
        return false;
      }
    } dig{p, a, options, chosen};
    std::vector<std::vector<int>> pool(a.acceptance.begin(), a.acceptance.end());
    if (dig.rec(0, pool)) {
      // Reconstruct witness contents: per channel, a word driving the product
      // automaton from its start to the chosen product state.
      std::vector<Word> witness(p.rel.arity());
      for (std::size_t c = 0; c < p.rel.arity(); ++c) {
        const Dfa& d = p.rel.per_channel[c];
        std::map<int, std::pair<int, int>> parent;  // state -> (pred, symIdx)
        std::deque<int> q{d.start};
        parent[d.start] = {-1, -1};
        while (!q.empty()) {
          int s = q.front();
          q.pop_front();
          if (s == chosen[c]) break;
          for (std::size_t x = 0; x < d.alphabet.size(); ++x)
            if (!parent.count(d.delta[s][x])) {
              parent[d.delta[s][x]] = {s, static_cast<int>(x)};
              q.push_back(d.delta[s][x]);
            }
        }
        Word w;
        for (int cur = chosen[c]; parent[cur].first >= 0 || parent[cur].second >= 0; cur = parent[cur].first)
          w.push_back(d.alphabet[parent[cur].second]);
        std::reverse(w.begin(), w.end());
        witness[c] = std::move(w);
      }
      return witness;
    }
  }
  return std::nullopt;
}

/// true iff membership(b) ⊆ membership(a).
inline bool rel_includes(const RecRel& a, const RecRel& b) {
  return !rel_witness_not_included(a, b).has_value();
}

/// true iff the relation has no member.
inline bool rel_is_empty(const RecRel& r) { return rel_reduce(r).acceptance.empty(); }

/// true iff the two relations have the same members.
inline bool rel_equivalent(const RecRel& a, const RecRel& b) {
  return rel_includes(a, b) && rel_includes(b, a);
}

/// {C′ | ∃C ∈ r: x_ch = b·x′_ch, other channels equal}: advance ch's start by b.
inline RecRel rel_quotient_channel(const RecRel& r, const std::string& ch, const Symbol& b) {
  RecRel out = r;
  std::size_t c = 0;
  for (; c < r.arity(); ++c)
    if (r.channels[c] == ch) break;
  if (c == r.arity()) throw std::invalid_argument("unknown channel '" + ch + "'");
  int idx = alphabet_index(out.per_channel[c].alphabet, b);
  if (idx < 0) throw std::invalid_argument("symbol '" + b + "' not in channel alphabet");
  out.per_channel[c].start = out.per_channel[c].delta[out.per_channel[c].start][idx];
  return rel_reduce(out);
}

/// {C′ | ∃C ∈ r: x_ch·b = x′_ch, other channels equal}. Exact: the channel
/// automaton is widened to remember the state before the final symbol, so only
/// true one-symbol extensions of members are accepted.
inline RecRel rel_append_channel(const RecRel& r, const std::string& ch, const Symbol& b) {
  RecRel out = r;
  std::size_t c = 0;
  for (; c < r.arity(); ++c)
    if (r.channels[c] == ch) break;
  if (c == r.arity()) throw std::invalid_argument("unknown channel '" + ch + "'");
  const Dfa& d = r.per_channel[c];
  int idx = alphabet_index(d.alphabet, b);
  if (idx < 0) throw std::invalid_argument("symbol '" + b + "' not in channel alphabet");
  // Widened automaton: state (s, p) with p = previous state if the last symbol
  // read was exactly b, else p = -1. Encoded as s*(n+1) + (p+1).
  int n = d.num_states;
  Dfa w;
  w.alphabet = d.alphabet;
  w.num_states = n * (n + 1);
  w.start = d.start * (n + 1);  // p = -1
  w.delta.assign(w.num_states, std::vector<int>(d.alphabet.size(), 0));
  w.accepting.assign(w.num_states, 0);
  for (int s = 0; s < n; ++s)
    for (int p = -1; p < n; ++p) {
      int code = s * (n + 1) + (p + 1);
      for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
        int ns = d.delta[s][a];
        int np = (static_cast<int>(a) == idx) ? s : -1;
        w.delta[code][a] = ns * (n + 1) + (np + 1);
      }
    }
  std::set<std::vector<int>> acc;
  for (auto v : r.acceptance) {
    int prev = v[c];
    v[c] = d.delta[prev][idx] * (n + 1) + (prev + 1);
    acc.insert(std::move(v));
  }
  out.per_channel[c] = std::move(w);
  out.acceptance = std::move(acc);
  return rel_reduce(out);
}

/// One clause of per-channel length caps; -1 means unbounded.
using LengthClause = std::vector<long>;

/// Intersection of r with ⋃_clauses Π_ch {x : |x| ≤ cap_ch}.
inline RecRel rel_restrict_lengths(const RecRel& r, const std::vector<LengthClause>& clauses,
                                   std::size_t cap = kDefaultVectorCap) {
  std::vector<Alphabet> alphas;
  for (const auto& d : r.per_channel) alphas.push_back(d.alphabet);
  RecRel mask = rel_none(r.channels, alphas);
  for (const auto& clause : clauses) {
    if (clause.size() != r.arity()) throw std::invalid_argument("clause arity mismatch");
    std::vector<Dfa> comp;
    for (std::size_t c = 0; c < r.arity(); ++c) {
      long k = clause[c];
      if (k < 0) {
        comp.push_back(dfa_all(alphas[c]));
      } else {
        // Counter DFA: states 0..k (count) plus k+1 (overflow sink).
        Dfa d;
        d.alphabet = alphas[c];
        d.num_states = static_cast<int>(k) + 2;
        d.start = 0;
        d.delta.assign(d.num_states, std::vector<int>(alphas[c].size(), 0));
        d.accepting.assign(d.num_states, 0);
        for (int s = 0; s < d.num_states; ++s) {
          int nxt = std::min(s + 1, d.num_states - 1);
          for (std::size_t a = 0; a < alphas[c].size(); ++a) d.delta[s][a] = nxt;
          if (s <= k) d.accepting[s] = 1;
        }
        comp.push_back(std::move(d));
      }
    }
    mask = rel_union(mask, rel_product(r.channels, std::move(comp), cap), cap);
  }
  return rel_intersect(r, mask, cap);
}

/// Lemma-8.10 operation on a binary relation l over (ch1, ch2) and a regular
/// set r over ch1's alphabet: {(x, y) | ∃z: z·x ∈ L(r) and (z, y) ∈ l}.
inline RecRel rel_minus_quotient(const RecRel& l, const Dfa& r, std::size_t cap = kDefaultVectorCap) {
  if (l.arity() != 2) throw std::invalid_argument("rel_minus_quotient needs a binary relation");
  if (l.per_channel[0].alphabet != r.alphabet)
    throw std::invalid_argument("regular-set alphabet must match the first channel");
  // Reachable pairs of (r-state, l-channel-1-state) under a common word z.
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack{{r.start, l.per_channel[0].start}};
  seen.insert(stack[0]);
  while (!stack.empty()) {
    auto [sr, s1] = stack.back();
    stack.pop_back();
    for (std::size_t a = 0; a < r.alphabet.size(); ++a) {
      std::pair<int, int> nxt{r.delta[sr][a], l.per_channel[0].delta[s1][a]};
      if (seen.insert(nxt).second) stack.push_back(nxt);
    }
  }
  std::vector<Alphabet> alphas{l.per_channel[0].alphabet, l.per_channel[1].alphabet};
  RecRel out = rel_none(l.channels, alphas);
  for (int p = 0; p < r.num_states; ++p) {
    // z-words reaching r-state p pair channel-1 starts into this set:
    std::set<int> reach1;
    for (const auto& [sr, s1] : seen)
      if (sr == p) reach1.insert(s1);
    if (reach1.empty()) continue;
    // y-languages allowed for this p: end-states s2 completing some (s1, s2) ∈ l.acceptance.
    std::set<int> yAccept;
    for (const auto& v : l.acceptance)
      if (reach1.count(v[0])) yAccept.insert(v[1]);
    if (yAccept.empty()) continue;
    Dfa xDfa = r;
    xDfa.start = p;
    Dfa yDfa = l.per_channel[1];
    yDfa.accepting.assign(yDfa.num_states, 0);
    for (int s : yAccept) yDfa.accepting[s] = 1;
    out = rel_union(out, rel_product(l.channels, {std::move(xDfa), std::move(yDfa)}, cap), cap);
  }
  return out;
}

/// The relation's members as a finite union of products of regular languages
/// (Mezei form): one product per acceptance vector.
inline std::vector<std::vector<Dfa>> rel_to_products(const RecRel& r0) {
  RecRel r = rel_reduce(r0);
  std::vector<std::vector<Dfa>> products;
  for (const auto& v : r.acceptance) {
    std::vector<Dfa> tuple;
    for (std::size_t c = 0; c < r.arity(); ++c) {
      Dfa d = r.per_channel[c];
      d.accepting.assign(d.num_states, 0);
      d.accepting[v[c]] = 1;
      tuple.push_back(minimize(d));
    }
    products.push_back(std::move(tuple));
  }
  return products;
}

}  // namespace cfsm::lang

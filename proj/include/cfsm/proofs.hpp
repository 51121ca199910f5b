// Certificate tables over channel contents: consistency checking, automatic
// extension of partially declared tables, and reachability certificates read
// off consistent tables.
//
// A regular table assigns to every composite state S a regular set Q(S) over
// one designated channel's messages; Q(S) over-approximates the contents that
// channel can hold while every other channel is empty.  A recognizable table
// assigns to every composite state a recognizable relation R(S) over all
// channels, over-approximating the reachable channel contents outright.
// Consistency is a local closure property: every machine transition (and, for
// regular tables, every silent matched exchange on the other channels) must
// map each entry into the target state's entry.  A consistent table anchored
// at the initial configuration certifies unreachability facts without
// exploring the state space.
#pragma once

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <cfsm/lang.hpp>
#include <cfsm/model.hpp>

namespace cfsm::proofs {

/// One state name per node, in the protocol's node declaration order.
using Composite = std::vector<std::string>;

/// Per-composite regular sets over one designated channel.
struct RegularTable {
  std::string channel;                          // the designated channel
  std::map<Composite, lang::Dfa> entries;       // Q(S), over that channel's alphabet
  std::vector<std::set<std::string>> declared;  // per-node index sets; empty = total table

  bool partial() const { return !declared.empty(); }
};

/// Per-composite recognizable relations over all channels.  A partial table
/// is indexed either by per-node index sets (`declared`, extended along
/// receive paths) or by a set of composite states hitting every product-graph
/// cycle (`feedback`, extended along acyclic product paths).
struct RecognizableTable {
  std::map<Composite, lang::RecRel> entries;
  std::vector<std::set<std::string>> declared;
  std::set<Composite> feedback;

  bool partial() const { return !declared.empty() || !feedback.empty(); }
};

/// Length restriction: a content vector satisfies the restriction iff some
/// clause's per-channel caps all hold (cap -1 = unbounded).
struct Restriction {
  std::vector<lang::LengthClause> clauses;
};

/// A failed consistency obligation: which step broke, and a counterexample
/// content admitted by the transformed source entry but not the target entry.
struct Violation {
  std::string where;
  std::string witness;
};

struct RegularExtension {
  std::optional<RegularTable> table;   // set iff the completed table is consistent
  std::optional<Violation> violation;  // set otherwise
};

struct RecognizableExtension {
  std::optional<RecognizableTable> table;
  std::optional<Violation> violation;
};

/// Outcome of evaluating a reachability certificate against a table.  The
/// table is assumed to have passed its consistency check; these evaluators
/// only read entries.
struct Certificate {
  enum class Status {
    Certified,     // the table proves the queried fact
    Inapplicable,  // the table is silent: it admits the queried configuration
    Malformed,     // the table does not anchor the initial configuration
  };
  Status status;
  std::string detail;
};

namespace detail {

/// Indexed product view: every composite state as a coordinate vector, in
/// lexicographic order of per-node state indices.
struct Grid {
  model::Index ix;
  int nodes = 0;
  std::vector<std::vector<int>> comps;
  std::map<std::vector<int>, int> comp_id;
};

inline Grid make_grid(const model::Protocol& p) {
  Grid g;
  g.ix = model::build_index(p);
  g.nodes = static_cast<int>(p.nodes.size());
  std::size_t total = 1;
  for (int n = 0; n < g.nodes; ++n) {
    total *= g.ix.states[n].size();
    if (total > lang::kDefaultVectorCap) throw lang::CapacityError("composite-state space too large");
  }
  std::vector<int> cur(g.nodes, 0);
  for (;;) {
    g.comp_id.emplace(cur, static_cast<int>(g.comps.size()));
    g.comps.push_back(cur);
    int n = g.nodes - 1;
    while (n >= 0 && ++cur[n] == static_cast<int>(g.ix.states[n].size())) cur[n--] = 0;
    if (n < 0) break;
  }
  return g;
}

inline Composite grid_names(const Grid& g, const std::vector<int>& coords) {
  Composite out(coords.size());
  for (std::size_t n = 0; n < coords.size(); ++n) out[n] = g.ix.states[n][coords[n]];
  return out;
}

inline std::vector<int> grid_coords(const Grid& g, const model::Protocol& p, const Composite& c) {
  if (static_cast<int>(c.size()) != g.nodes)
    throw std::invalid_argument("composite state must name one state per node");
  std::vector<int> out(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) {
    auto it = g.ix.state_index[n].find(c[n]);
    if (it == g.ix.state_index[n].end())
      throw std::invalid_argument("node " + p.nodes[n] + " has no state '" + c[n] + "'");
    out[n] = it->second;
  }
  return out;
}

inline std::string comp_str(const Composite& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + c[i];
  return s + ")";
}

inline std::string comp_str(const Grid& g, int id) { return comp_str(grid_names(g, g.comps[id])); }

inline int initial_comp(const Grid& g) {
  std::vector<int> coords(g.ix.start.begin(), g.ix.start.end());
  return g.comp_id.at(coords);
}

/// Run f(0..n-1), across `threads` workers when asked; callers write results
/// into pre-sized slots so aggregation order never depends on scheduling.
template <class F>
inline void parallel_for(std::size_t n, int threads, F&& f) {
  int use = std::max(1, threads);
  if (use == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < use; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
}

/// A matched send/receive pair on one channel: executing both in immediate
/// succession moves two coordinates and leaves every channel as it was.
struct Exchange {
  int channel;
  int symbol;
  int send_node, send_from, send_to;
  int recv_node, recv_from, recv_to;
};

inline std::vector<Exchange> exchanges(const model::Protocol& p, const Grid& g, int skip_channel) {
  std::vector<Exchange> out;
  for (std::size_t ch = 0; ch < p.channels.size(); ++ch) {
    if (static_cast<int>(ch) == skip_channel) continue;
    int sn = g.ix.node.at(p.channels[ch].from);
    int rn = g.ix.node.at(p.channels[ch].to);
    if (sn == rn) continue;  // a self-addressed channel has no two-sided exchange
    for (std::size_t ss = 0; ss < g.ix.out[sn].size(); ++ss)
      for (const model::Index::Edge& se : g.ix.out[sn][ss]) {
        if (!se.send || se.channel != static_cast<int>(ch)) continue;
        for (std::size_t rs = 0; rs < g.ix.out[rn].size(); ++rs)
          for (const model::Index::Edge& re : g.ix.out[rn][rs])
            if (!re.send && re.channel == static_cast<int>(ch) && re.symbol == se.symbol)
              out.push_back({static_cast<int>(ch), se.symbol, sn, se.state, se.target, rn, re.state, re.target});
      }
  }
  return out;
}

/// One machine transition, with its owning node.
struct Step {
  int node;
  model::Index::Edge e;
};

inline std::vector<Step> steps_on(const Grid& g, int channel) {
  std::vector<Step> out;
  for (int n = 0; n < g.nodes; ++n)
    for (const auto& edges : g.ix.out[n])
      for (const model::Index::Edge& e : edges)
        if (channel < 0 || e.channel == channel) out.push_back({n, e});
  return out;
}

inline std::string step_str(const model::Protocol& p, const Grid& g, const Step& s) {
  const model::Channel& ch = p.channels[s.e.channel];
  return std::string(s.e.send ? "send -" : "receive +") + ch.alphabet[s.e.symbol] + "@" + ch.id +
         " at node " + p.nodes[s.node] + " (" + g.ix.states[s.node][s.e.state] + " -> " +
         g.ix.states[s.node][s.e.target] + ")";
}

inline std::string exchange_str(const model::Protocol& p, const Exchange& x) {
  const model::Channel& ch = p.channels[x.channel];
  return "silent exchange -" + ch.alphabet[x.symbol] + "/+" + ch.alphabet[x.symbol] + "@" + ch.id;
}

inline std::string content_str(const std::vector<lang::Word>& contents) {
  std::string s = "(";
  for (std::size_t i = 0; i < contents.size(); ++i) s += (i ? ", " : "") + lang::word_to_string(contents[i]);
  return s + ")";
}

inline std::pair<std::string, lang::Dfa> canon_dfa(const lang::Dfa& d) {
  lang::Dfa m = lang::minimize(d);
  std::string k = lang::dfa_key(m);
  return {std::move(k), std::move(m)};
}

inline std::pair<std::string, lang::RecRel> canon_rel(const lang::RecRel& r) {
  lang::RecRel m = lang::rel_reduce(r);
  std::string k = lang::rel_key(m);
  return {std::move(k), std::move(m)};
}

/// Validate per-node index sets: every name known, the start state included,
/// and every send transition's target included (so sending never leaves the
/// declared region of that node's machine).
inline void require_index_sets(const model::Protocol& p, const Grid& g,
                               const std::vector<std::set<std::string>>& declared) {
  if (declared.size() != p.nodes.size())
    throw std::invalid_argument("extension needs one declared index set per node");
  for (int n = 0; n < g.nodes; ++n) {
    const std::set<std::string>& v = declared[n];
    for (const std::string& name : v)
      if (!g.ix.state_index[n].count(name))
        throw std::invalid_argument("node " + p.nodes[n] + " has no state '" + name + "'");
    const std::string& home = g.ix.states[n][g.ix.start[n]];
    if (!v.count(home))
      throw std::invalid_argument("node " + p.nodes[n] + "'s index set must contain its start state '" +
                                  home + "'");
    for (const auto& edges : g.ix.out[n])
      for (const model::Index::Edge& e : edges)
        if (e.send && !v.count(g.ix.states[n][e.target]))
          throw std::invalid_argument(
              "node " + p.nodes[n] + "'s index set must contain '" + g.ix.states[n][e.target] +
              "', the target of send -" + p.channels[e.channel].alphabet[e.symbol] + "@" +
              p.channels[e.channel].id + " from " + g.ix.states[n][e.state]);
  }
}

/// All composites whose every coordinate lies in its declared index set,
/// ascending by composite id.
inline std::vector<int> declared_comps(const model::Protocol& p, const Grid& g,
                                       const std::vector<std::set<std::string>>& declared) {
  std::vector<int> out;
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    bool in = true;
    for (int n = 0; n < g.nodes && in; ++n) in = declared[n].count(g.ix.states[n][g.comps[i][n]]) > 0;
    if (in) out.push_back(static_cast<int>(i));
  }
  return out;
}

/// Bind a table's entries to composite ids, requiring exactly the given
/// domain (every domain composite present, nothing else).
template <class Entry>
inline std::vector<const Entry*> bind_entries(const model::Protocol& p, const Grid& g,
                                              const std::map<Composite, Entry>& entries,
                                              const std::vector<int>& domain) {
  std::vector<const Entry*> out(g.comps.size(), nullptr);
  std::vector<char> wanted(g.comps.size(), 0);
  for (int i : domain) wanted[i] = 1;
  for (const auto& [comp, entry] : entries) {
    int id = g.comp_id.at(grid_coords(g, p, comp));
    if (!wanted[id])
      throw std::invalid_argument("entry " + comp_str(comp) + " is outside the declared index sets");
    out[id] = &entry;
  }
  for (int i : domain)
    if (!out[i]) throw std::invalid_argument("table is missing an entry for " + comp_str(g, i));
  return out;
}

inline std::vector<int> all_comps(const Grid& g) {
  std::vector<int> out(g.comps.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

inline void require_rel_shape(const model::Protocol& p, const Composite& comp, const lang::RecRel& r) {
  if (r.arity() != p.channels.size())
    throw std::invalid_argument("entry " + comp_str(comp) + " has wrong channel arity");
  for (std::size_t c = 0; c < p.channels.size(); ++c)
    if (r.channels[c] != p.channels[c].id || r.per_channel[c].alphabet != p.channels[c].alphabet)
      throw std::invalid_argument("entry " + comp_str(comp) +
                                  " is not over the protocol's channels in declaration order");
}

inline void require_restriction_shape(const model::Protocol& p, const Restriction& r) {
  if (r.clauses.empty()) throw std::invalid_argument("a restriction needs at least one clause");
  for (const lang::LengthClause& c : r.clauses)
    if (c.size() != p.channels.size())
      throw std::invalid_argument("every restriction clause needs one cap per channel");
}

}  // namespace detail

/// The silent-hop graph over composite states for a designated channel: an
/// edge S₁→S₂ records a matched send/receive exchange on some other channel
/// (two coordinates move, the designated channel's content is untouched).
struct HGraph {
  std::vector<Composite> nodes;       // all composite states, enumeration order
  std::map<Composite, int> id;
  std::vector<std::vector<int>> out;  // deduplicated, ascending adjacency
};

inline HGraph h_graph(const model::Protocol& p, const std::string& beta) {
  detail::Grid g = detail::make_grid(p);
  auto bit = g.ix.channel.find(beta);
  if (bit == g.ix.channel.end()) throw std::invalid_argument("unknown channel '" + beta + "'");
  std::vector<detail::Exchange> ex = detail::exchanges(p, g, bit->second);
  HGraph h;
  h.nodes.reserve(g.comps.size());
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    h.nodes.push_back(detail::grid_names(g, g.comps[i]));
    h.id.emplace(h.nodes.back(), static_cast<int>(i));
  }
  h.out.assign(g.comps.size(), {});
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    const std::vector<int>& c = g.comps[i];
    for (const detail::Exchange& x : ex) {
      if (c[x.send_node] != x.send_from || c[x.recv_node] != x.recv_from) continue;
      std::vector<int> t = c;
      t[x.send_node] = x.send_to;
      t[x.recv_node] = x.recv_to;
      h.out[i].push_back(g.comp_id.at(t));
    }
    std::sort(h.out[i].begin(), h.out[i].end());
    h.out[i].erase(std::unique(h.out[i].begin(), h.out[i].end()), h.out[i].end());
  }
  return h;
}

/// Check a total regular table.  Three obligation families, all inclusions:
/// receive +b on the designated channel must map the left quotient of the
/// source entry into the target entry; send -b must map the appended entry in;
/// and across every silent-hop edge the source entry must be included in the
/// target entry (hop edges suffice for hop *paths*: inclusion is transitive,
/// so any failing multi-hop pair fails on some single edge along the way).
/// Returns the first failed obligation in declaration order, or nullopt.
inline std::optional<Violation> check_regular_consistency(const model::Protocol& p, const std::string& beta,
                                                          const RegularTable& t, int threads = 1) {
  if (t.partial()) throw std::invalid_argument("consistency checking needs a total table; extend it first");
  if (t.channel != beta)
    throw std::invalid_argument("table is over channel '" + t.channel + "', not '" + beta + "'");
  if (!model::classify(p).is_cyclic)
    throw std::invalid_argument("regular content tables require a cyclic protocol");
  detail::Grid g = detail::make_grid(p);
  auto bit = g.ix.channel.find(beta);
  if (bit == g.ix.channel.end()) throw std::invalid_argument("unknown channel '" + beta + "'");
  const int bc = bit->second;
  const lang::Alphabet& mb = p.channels[bc].alphabet;

  std::vector<const lang::Dfa*> q = detail::bind_entries(p, g, t.entries, detail::all_comps(g));
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i]->alphabet != mb)
      throw std::invalid_argument("entry " + detail::comp_str(g, static_cast<int>(i)) +
                                  " is not over channel " + beta + "'s alphabet");

  std::vector<std::string> key(q.size());
  std::vector<lang::Dfa> canon(q.size());
  detail::parallel_for(q.size(), threads, [&](std::size_t i) {
    auto [k, m] = detail::canon_dfa(*q[i]);
    key[i] = std::move(k);
    canon[i] = std::move(m);
  });
  std::map<std::string, const lang::Dfa*> rep;
  for (std::size_t i = 0; i < q.size(); ++i) rep.emplace(key[i], &canon[i]);

  std::vector<detail::Step> steps = detail::steps_on(g, bc);
  std::vector<detail::Exchange> ex = detail::exchanges(p, g, bc);
  struct Oblig {
    int src, dst;
    int step;  // index into steps, or -1-k for exchange k
  };
  std::vector<Oblig> obligs;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const detail::Step& st = steps[s];
    for (std::size_t i = 0; i < g.comps.size(); ++i) {
      if (g.comps[i][st.node] != st.e.state) continue;
      std::vector<int> tc = g.comps[i];
      tc[st.node] = st.e.target;
      obligs.push_back({static_cast<int>(i), g.comp_id.at(tc), static_cast<int>(s)});
    }
  }
  for (std::size_t x = 0; x < ex.size(); ++x) {
    const detail::Exchange& e = ex[x];
    for (std::size_t i = 0; i < g.comps.size(); ++i) {
      if (g.comps[i][e.send_node] != e.send_from || g.comps[i][e.recv_node] != e.recv_from) continue;
      std::vector<int> tc = g.comps[i];
      tc[e.send_node] = e.send_to;
      tc[e.recv_node] = e.recv_to;
      obligs.push_back({static_cast<int>(i), g.comp_id.at(tc), -1 - static_cast<int>(x)});
    }
  }

  // Distinct transforms (source language, step) first, then distinct
  // inclusion queries; obligations are plentiful but languages repeat.
  std::map<std::pair<std::string, int>, int> tjob;
  std::vector<std::pair<std::string, int>> tlist;
  for (const Oblig& o : obligs) {
    if (o.step < 0) continue;
    std::pair<std::string, int> k{key[o.src], o.step};
    if (tjob.emplace(k, static_cast<int>(tlist.size())).second) tlist.push_back(k);
  }
  std::vector<std::string> tkey(tlist.size());
  std::vector<lang::Dfa> tdfa(tlist.size());
  detail::parallel_for(tlist.size(), threads, [&](std::size_t i) {
    const lang::Dfa& src = *rep.at(tlist[i].first);
    const detail::Step& st = steps[tlist[i].second];
    const lang::Symbol& b = mb[st.e.symbol];
    auto [k, m] = detail::canon_dfa(st.e.send ? lang::append_symbol(src, b)
                                              : lang::left_quotient_symbol(src, b));
    tkey[i] = std::move(k);
    tdfa[i] = std::move(m);
  });
  std::map<std::string, const lang::Dfa*> trep;
  for (std::size_t i = 0; i < tlist.size(); ++i) trep.emplace(tkey[i], &tdfa[i]);
  for (const auto& [k, d] : rep) trep.emplace(k, d);

  auto lhs_key = [&](const Oblig& o) -> const std::string& {
    return o.step < 0 ? key[o.src] : tkey[tjob.at({key[o.src], o.step})];
  };
  std::map<std::pair<std::string, std::string>, int> ijob;
  std::vector<std::pair<std::string, std::string>> ilist;
  for (const Oblig& o : obligs) {
    std::pair<std::string, std::string> k{lhs_key(o), key[o.dst]};
    if (k.first == k.second) continue;  // identical languages: trivially included
    if (ijob.emplace(k, static_cast<int>(ilist.size())).second) ilist.push_back(k);
  }
  std::vector<std::optional<lang::Word>> iwitness(ilist.size());
  detail::parallel_for(ilist.size(), threads, [&](std::size_t i) {
    // witness_not_included(a, b) finds a word of L(b) \ L(a): a = superset.
    iwitness[i] = lang::witness_not_included(*trep.at(ilist[i].second), *trep.at(ilist[i].first));
  });

  for (const Oblig& o : obligs) {
    std::pair<std::string, std::string> k{lhs_key(o), key[o.dst]};
    if (k.first == k.second) continue;
    const std::optional<lang::Word>& w = iwitness[ijob.at(k)];
    if (!w) continue;
    std::string where;
    if (o.step >= 0)
      where = detail::step_str(p, g, steps[o.step]) + ", composite " + detail::comp_str(g, o.src) +
              " -> " + detail::comp_str(g, o.dst) + ": the " +
              (steps[o.step].e.send ? "appended" : "left-quotient") +
              " source entry is not included in the target entry";
    else
      where = detail::exchange_str(p, ex[-1 - o.step]) + ", composite " + detail::comp_str(g, o.src) +
              " -> " + detail::comp_str(g, o.dst) +
              ": the source entry is not included in the target entry";
    return Violation{std::move(where), lang::word_to_string(*w)};
  }
  return std::nullopt;
}

/// Complete a partial regular table declared on the product of per-node index
/// sets.  The completion is the smallest candidate: a word y belongs to the
/// computed Q(S) iff some declared composite S' admits a word xy such that the
/// system can move from S' to S by receiving x on the designated channel
/// interleaved with silent exchanges elsewhere.  The completed table is then
/// checked; if even the smallest candidate fails, no consistent completion
/// agreeing with the declared entries exists.
inline RegularExtension extend_regular(const model::Protocol& p, const std::string& beta,
                                       const RegularTable& partial, int threads = 1) {
  if (!partial.partial()) throw std::invalid_argument("extension needs declared index sets");
  if (partial.channel != beta)
    throw std::invalid_argument("table is over channel '" + partial.channel + "', not '" + beta + "'");
  if (!model::classify(p).is_cyclic)
    throw std::invalid_argument("regular content tables require a cyclic protocol");
  detail::Grid g = detail::make_grid(p);
  auto bit = g.ix.channel.find(beta);
  if (bit == g.ix.channel.end()) throw std::invalid_argument("unknown channel '" + beta + "'");
  const int bc = bit->second;
  const lang::Alphabet& mb = p.channels[bc].alphabet;
  detail::require_index_sets(p, g, partial.declared);

  std::vector<int> decl_ids = detail::declared_comps(p, g, partial.declared);
  std::vector<const lang::Dfa*> given = detail::bind_entries(p, g, partial.entries, decl_ids);
  std::vector<char> is_decl(g.comps.size(), 0);
  for (int i : decl_ids) is_decl[i] = 1;
  std::vector<lang::Dfa> decl;  // minimized declared automata, decl_ids order
  std::vector<int> decl_of(g.comps.size(), -1);
  for (std::size_t d = 0; d < decl_ids.size(); ++d) {
    if (given[decl_ids[d]]->alphabet != mb)
      throw std::invalid_argument("entry " + detail::comp_str(g, decl_ids[d]) + " is not over channel " +
                                  beta + "'s alphabet");
    decl.push_back(lang::minimize(*given[decl_ids[d]]));
    decl_of[decl_ids[d]] = static_cast<int>(d);
  }

  // Hop adjacency (silent exchanges) and receive adjacency on the designated
  // channel, per composite.
  std::vector<detail::Exchange> ex = detail::exchanges(p, g, bc);
  std::vector<std::vector<int>> hop(g.comps.size());
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    for (const detail::Exchange& x : ex) {
      if (g.comps[i][x.send_node] != x.send_from || g.comps[i][x.recv_node] != x.recv_from) continue;
      std::vector<int> tc = g.comps[i];
      tc[x.send_node] = x.send_to;
      tc[x.recv_node] = x.recv_to;
      hop[i].push_back(g.comp_id.at(tc));
    }
    std::sort(hop[i].begin(), hop[i].end());
    hop[i].erase(std::unique(hop[i].begin(), hop[i].end()), hop[i].end());
  }
  const int rn = g.ix.node.at(p.channels[bc].to);
  std::vector<std::vector<std::pair<int, int>>> recv(g.comps.size());  // (target comp, symbol)
  for (std::size_t i = 0; i < g.comps.size(); ++i)
    for (const model::Index::Edge& e : g.ix.out[rn][g.comps[i][rn]])
      if (!e.send && e.channel == bc) {
        std::vector<int> tc = g.comps[i];
        tc[rn] = e.target;
        recv[i].emplace_back(g.comp_id.at(tc), e.symbol);
      }

  // Forward closure over (composite, declared automaton state): which residual
  // languages of which declared entries can reach each composite.
  std::vector<std::set<std::pair<int, int>>> hits(g.comps.size());
  std::deque<std::pair<int, std::pair<int, int>>> bfs;
  for (std::size_t d = 0; d < decl_ids.size(); ++d) {
    std::pair<int, int> seed{static_cast<int>(d), decl[d].start};
    if (hits[decl_ids[d]].insert(seed).second) bfs.push_back({decl_ids[d], seed});
  }
  while (!bfs.empty()) {
    auto [c, ds] = bfs.front();
    bfs.pop_front();
    for (int to : hop[c])
      if (hits[to].insert(ds).second) bfs.push_back({to, ds});
    for (auto [to, sym] : recv[c]) {
      std::pair<int, int> nxt{ds.first, decl[ds.first].delta[ds.second][sym]};
      if (hits[to].insert(nxt).second) bfs.push_back({to, nxt});
    }
  }

  // Determinize the union of the reached residual languages per composite;
  // composites sharing a residual signature share the automaton.
  std::map<std::string, lang::Dfa> built;
  auto union_dfa = [&](const std::set<std::pair<int, int>>& starts) -> lang::Dfa {
    if (starts.empty()) return lang::dfa_none(mb);
    std::string sig;
    for (const auto& [d, s] : starts) sig += std::to_string(d) + ":" + std::to_string(s) + ";";
    auto it = built.find(sig);
    if (it != built.end()) return it->second;
    std::map<std::set<std::pair<int, int>>, int> id;
    std::vector<std::set<std::pair<int, int>>> sets{starts};
    id.emplace(starts, 0);
    lang::Dfa out;
    out.alphabet = mb;
    for (std::size_t cur = 0; cur < sets.size(); ++cur) {
      out.delta.emplace_back(mb.size(), 0);
      bool acc = false;
      for (const auto& [d, s] : sets[cur]) acc = acc || decl[d].accepting[s];
      out.accepting.push_back(acc ? 1 : 0);
      for (std::size_t a = 0; a < mb.size(); ++a) {
        std::set<std::pair<int, int>> img;
        for (const auto& [d, s] : sets[cur]) img.emplace(d, decl[d].delta[s][a]);
        auto [iit, fresh] = id.emplace(img, static_cast<int>(sets.size()));
        if (fresh) {
          sets.push_back(std::move(img));
          if (sets.size() > lang::kDefaultVectorCap) throw lang::CapacityError("completion automaton too large");
        }
        out.delta[cur][a] = iit->second;
      }
    }
    out.num_states = static_cast<int>(sets.size());
    out.start = 0;
    lang::Dfa m = lang::minimize(out);
    built.emplace(sig, m);
    return m;
  };

  RegularTable full;
  full.channel = beta;
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    Composite names = detail::grid_names(g, g.comps[i]);
    if (is_decl[i])
      full.entries.emplace(std::move(names), decl[decl_of[i]]);
    else
      full.entries.emplace(std::move(names), union_dfa(hits[i]));
  }
  if (auto vio = check_regular_consistency(p, beta, full, threads)) return {std::nullopt, std::move(vio)};
  return {std::move(full), std::nullopt};
}

/// Read a non-stability certificate off a consistent regular table: if the
/// initial entry contains the empty word but the target entry does not, no
/// reachable configuration has the target composite state with every channel
/// empty.
inline Certificate prove_not_stable(const model::Protocol& p, const RegularTable& t,
                                    const Composite& target) {
  if (t.partial()) throw std::invalid_argument("certificates need a total table; extend it first");
  detail::Grid g = detail::make_grid(p);
  std::vector<int> coords = detail::grid_coords(g, p, target);
  Composite init = detail::grid_names(g, g.comps[detail::initial_comp(g)]);
  auto iit = t.entries.find(init);
  auto tit = t.entries.find(target);
  if (iit == t.entries.end() || tit == t.entries.end())
    throw std::invalid_argument("table is missing an entry for " +
                                detail::comp_str(iit == t.entries.end() ? init : target));
  if (!lang::dfa_member(iit->second, {}))
    return {Certificate::Status::Malformed,
            "the initial entry " + detail::comp_str(init) +
                " does not contain the empty word, so the table does not anchor the initial configuration"};
  if (lang::dfa_member(tit->second, {}))
    return {Certificate::Status::Inapplicable,
            "the table admits empty contents at " + detail::comp_str(target)};
  return {Certificate::Status::Certified,
          "no reachable configuration has composite state " + detail::comp_str(target) +
              " with every channel empty"};
}

/// Check a total recognizable table, optionally under a length restriction.
/// For every machine transition, the transformed source entry (channel
/// quotient for receives, channel append for sends) must be included in the
/// target entry.  Under a restriction, the source entry is restricted before
/// the transform and the transformed relation after it, so the obligation
/// covers exactly the steps between restriction-satisfying contents.
inline std::optional<Violation> check_recognizable_consistency(
    const model::Protocol& p, const RecognizableTable& t,
    const std::optional<Restriction>& restriction = std::nullopt, int threads = 1) {
  if (t.partial()) throw std::invalid_argument("consistency checking needs a total table; extend it first");
  if (restriction) detail::require_restriction_shape(p, *restriction);
  detail::Grid g = detail::make_grid(p);
  std::vector<const lang::RecRel*> r = detail::bind_entries(p, g, t.entries, detail::all_comps(g));
  for (std::size_t i = 0; i < r.size(); ++i)
    detail::require_rel_shape(p, detail::grid_names(g, g.comps[i]), *r[i]);

  auto restrict = [&](const lang::RecRel& rel) {
    return restriction ? lang::rel_restrict_lengths(rel, restriction->clauses) : rel;
  };

  // Canonical target entries, and canonical restricted sources.
  std::vector<std::string> key(r.size()), skey(r.size());
  std::vector<lang::RecRel> canon(r.size()), scanon(r.size());
  detail::parallel_for(r.size(), threads, [&](std::size_t i) {
    auto [k, m] = detail::canon_rel(*r[i]);
    key[i] = std::move(k);
    canon[i] = std::move(m);
    if (restriction) {
      auto [sk, sm] = detail::canon_rel(restrict(canon[i]));
      skey[i] = std::move(sk);
      scanon[i] = std::move(sm);
    } else {
      skey[i] = key[i];
    }
  });
  std::map<std::string, const lang::RecRel*> rep;
  for (std::size_t i = 0; i < r.size(); ++i) {
    rep.emplace(key[i], &canon[i]);
    if (restriction) rep.emplace(skey[i], &scanon[i]);
  }

  std::vector<detail::Step> steps = detail::steps_on(g, -1);
  struct Oblig {
    int src, dst, step;
  };
  std::vector<Oblig> obligs;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const detail::Step& st = steps[s];
    for (std::size_t i = 0; i < g.comps.size(); ++i) {
      if (g.comps[i][st.node] != st.e.state) continue;
      std::vector<int> tc = g.comps[i];
      tc[st.node] = st.e.target;
      obligs.push_back({static_cast<int>(i), g.comp_id.at(tc), static_cast<int>(s)});
    }
  }

  std::map<std::pair<std::string, int>, int> tjob;
  std::vector<std::pair<std::string, int>> tlist;
  for (const Oblig& o : obligs) {
    std::pair<std::string, int> k{skey[o.src], o.step};
    if (tjob.emplace(k, static_cast<int>(tlist.size())).second) tlist.push_back(k);
  }
  std::vector<std::string> tkey(tlist.size());
  std::vector<lang::RecRel> trel(tlist.size());
  detail::parallel_for(tlist.size(), threads, [&](std::size_t i) {
    const lang::RecRel& src = *rep.at(tlist[i].first);
    const detail::Step& st = steps[tlist[i].second];
    const model::Channel& ch = p.channels[st.e.channel];
    const lang::Symbol& b = ch.alphabet[st.e.symbol];
    lang::RecRel moved =
        st.e.send ? lang::rel_append_channel(src, ch.id, b) : lang::rel_quotient_channel(src, ch.id, b);
    auto [k, m] = detail::canon_rel(restrict(moved));
    tkey[i] = std::move(k);
    trel[i] = std::move(m);
  });
  std::map<std::string, const lang::RecRel*> trep;
  for (std::size_t i = 0; i < tlist.size(); ++i) trep.emplace(tkey[i], &trel[i]);
  for (const auto& [k, rl] : rep) trep.emplace(k, rl);

  std::map<std::pair<std::string, std::string>, int> ijob;
  std::vector<std::pair<std::string, std::string>> ilist;
  for (const Oblig& o : obligs) {
    std::pair<std::string, std::string> k{tkey[tjob.at({skey[o.src], o.step})], key[o.dst]};
    if (k.first == k.second) continue;
    if (ijob.emplace(k, static_cast<int>(ilist.size())).second) ilist.push_back(k);
  }
  std::vector<std::optional<std::vector<lang::Word>>> iwitness(ilist.size());
  detail::parallel_for(ilist.size(), threads, [&](std::size_t i) {
    // rel_witness_not_included(a, b) finds a vector of b \ a: a = superset.
    iwitness[i] = lang::rel_witness_not_included(*trep.at(ilist[i].second), *trep.at(ilist[i].first));
  });

  for (const Oblig& o : obligs) {
    std::pair<std::string, std::string> k{tkey[tjob.at({skey[o.src], o.step})], key[o.dst]};
    if (k.first == k.second) continue;
    const auto& w = iwitness[ijob.at(k)];
    if (!w) continue;
    std::string where = detail::step_str(p, g, steps[o.step]) + ", composite " +
                        detail::comp_str(g, o.src) + " -> " + detail::comp_str(g, o.dst) +
                        ": the transformed source entry is not included in the target entry";
    if (restriction) where += " (under the length restriction)";
    return Violation{std::move(where), detail::content_str(*w)};
  }
  return std::nullopt;
}

/// Complete a partial recognizable table declared on the product of per-node
/// index sets, for protocols where every node has at most one input channel.
/// A content vector y belongs to the computed R(S) iff some declared S'
/// admits a vector whose per-channel words are x_ξ·y_ξ, where x_ξ is the
/// label of a receive-only path of channel ξ's receiver from its S' state to
/// its S state (the empty path counts).  Nodes without an input channel
/// cannot move silently, so their coordinate must already agree.  The
/// completed table is then checked.
inline RecognizableExtension extend_recognizable(const model::Protocol& p,
                                                 const RecognizableTable& partial, int threads = 1) {
  if (partial.declared.empty())
    throw std::invalid_argument("extension needs declared index sets");
  if (!partial.feedback.empty())
    throw std::invalid_argument("feedback-indexed tables use the feedback extension");
  detail::Grid g = detail::make_grid(p);
  std::vector<int> in_ch(g.nodes, -1);
  for (std::size_t ch = 0; ch < p.channels.size(); ++ch) {
    int rn = g.ix.node.at(p.channels[ch].to);
    if (in_ch[rn] >= 0)
      throw std::invalid_argument("node " + p.nodes[rn] +
                                  " has more than one input channel; receive-path extension needs at most "
                                  "one (use a feedback-indexed table)");
    in_ch[rn] = static_cast<int>(ch);
  }
  detail::require_index_sets(p, g, partial.declared);
  std::vector<int> decl_ids = detail::declared_comps(p, g, partial.declared);
  std::vector<const lang::RecRel*> given = detail::bind_entries(p, g, partial.entries, decl_ids);
  std::vector<char> is_decl(g.comps.size(), 0);
  std::vector<int> decl_of(g.comps.size(), -1);
  for (std::size_t d = 0; d < decl_ids.size(); ++d) {
    is_decl[decl_ids[d]] = 1;
    decl_of[decl_ids[d]] = static_cast<int>(d);
  }

  std::vector<std::string> chan_ids(p.channels.size());
  std::vector<lang::Alphabet> chan_alpha(p.channels.size());
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    chan_ids[c] = p.channels[c].id;
    chan_alpha[c] = p.channels[c].alphabet;
  }

  // Per declared source and channel: one product closure of (receiver state,
  // entry automaton state) under receives gives, for every receiver state p,
  // the set of automaton states reachable by some receive-path label.
  struct SourceData {
    lang::RecRel rel;  // reduced declared entry
    // reach[ch][p] = automaton states of rel.per_channel[ch] reachable while
    // the receiver moves from its declared state to p by receives only.
    std::vector<std::vector<std::set<int>>> reach;
  };
  std::vector<SourceData> src(decl_ids.size());
  detail::parallel_for(decl_ids.size(), threads, [&](std::size_t d) {
    detail::require_rel_shape(p, detail::grid_names(g, g.comps[decl_ids[d]]), *given[decl_ids[d]]);
    src[d].rel = lang::rel_reduce(*given[decl_ids[d]]);
    src[d].reach.resize(p.channels.size());
    for (std::size_t ch = 0; ch < p.channels.size(); ++ch) {
      int rn = g.ix.node.at(p.channels[ch].to);
      const lang::Dfa& dfa = src[d].rel.per_channel[ch];
      src[d].reach[ch].assign(g.ix.states[rn].size(), {});
      std::deque<std::pair<int, int>> bfs;
      int q0 = g.comps[decl_ids[d]][rn];
      src[d].reach[ch][q0].insert(dfa.start);
      bfs.push_back({q0, dfa.start});
      while (!bfs.empty()) {
        auto [ms, as] = bfs.front();
        bfs.pop_front();
        for (const model::Index::Edge& e : g.ix.out[rn][ms])
          if (!e.send && e.channel == static_cast<int>(ch)) {
            int na = dfa.delta[as][e.symbol];
            if (src[d].reach[ch][e.target].insert(na).second) bfs.push_back({e.target, na});
          }
      }
    }
  });

  // One term per (target, surviving source): per channel, the quotient of the
  // source entry's channel automaton by the receive-path labels is the subset
  // automaton started at the reached state set; a state vector is accepting
  // iff some accepted vector of the source entry is covered componentwise.
  auto term_rel = [&](const SourceData& sd, const std::vector<int>& target) -> std::optional<lang::RecRel> {
    std::vector<std::set<int>> starts(p.channels.size());
    for (int n = 0; n < g.nodes; ++n)
      if (in_ch[n] >= 0) {
        starts[in_ch[n]] = sd.reach[in_ch[n]][target[n]];
        if (starts[in_ch[n]].empty()) return std::nullopt;
      }
    lang::RecRel out;
    out.channels = chan_ids;
    std::vector<std::vector<std::set<int>>> subsets(p.channels.size());
    for (std::size_t ch = 0; ch < p.channels.size(); ++ch) {
      const lang::Dfa& dfa = sd.rel.per_channel[ch];
      lang::Dfa sub;
      sub.alphabet = dfa.alphabet;
      std::map<std::set<int>, int> id;
      std::vector<std::set<int>>& sets = subsets[ch];
      sets.push_back(starts[ch]);
      id.emplace(starts[ch], 0);
      for (std::size_t cur = 0; cur < sets.size(); ++cur) {
        sub.delta.emplace_back(dfa.alphabet.size(), 0);
        sub.accepting.push_back(0);
        for (std::size_t a = 0; a < dfa.alphabet.size(); ++a) {
          std::set<int> img;
          for (int s : sets[cur]) img.insert(dfa.delta[s][a]);
          auto [iit, fresh] = id.emplace(img, static_cast<int>(sets.size()));
          if (fresh) {
            sets.push_back(std::move(img));
            if (sets.size() > 4096) throw lang::CapacityError("receive-path quotient automaton too large");
          }
          sub.delta[cur][a] = iit->second;
        }
      }
      sub.num_states = static_cast<int>(sets.size());
      sub.start = 0;
      out.per_channel.push_back(std::move(sub));
    }
    // Accepted subset vectors: depth-first over channels, keeping only the
    // source acceptance vectors still coverable — prunes hard in practice.
    std::vector<std::vector<int>> alive(sd.rel.acceptance.begin(), sd.rel.acceptance.end());
    std::vector<int> pick(p.channels.size());
    std::size_t work = 0;
    std::function<void(std::size_t, std::vector<std::vector<int>>&)> dig =
        [&](std::size_t ch, std::vector<std::vector<int>>& cand) {
          if (++work > 5000000) throw lang::CapacityError("receive-path quotient acceptance too large");
          if (ch == p.channels.size()) {
            out.acceptance.insert(pick);
            return;
          }
          for (std::size_t u = 0; u < subsets[ch].size(); ++u) {
            std::vector<std::vector<int>> next;
            for (const std::vector<int>& a : cand)
              if (subsets[ch][u].count(a[ch])) next.push_back(a);
            if (next.empty()) continue;
            pick[ch] = static_cast<int>(u);
            dig(ch + 1, next);
          }
        };
    dig(0, alive);
    if (out.acceptance.empty()) return std::nullopt;
    return lang::rel_reduce(out);
  };

  std::vector<lang::RecRel> computed(g.comps.size());
  detail::parallel_for(g.comps.size(), threads, [&](std::size_t i) {
    if (is_decl[i]) return;
    lang::RecRel acc = lang::rel_none(chan_ids, chan_alpha);
    for (std::size_t d = 0; d < decl_ids.size(); ++d) {
      bool gate = true;
      for (int n = 0; n < g.nodes && gate; ++n)
        if (in_ch[n] < 0) gate = g.comps[i][n] == g.comps[decl_ids[d]][n];
      if (!gate) continue;
      if (std::optional<lang::RecRel> term = term_rel(src[d], g.comps[i]))
        acc = lang::rel_reduce(lang::rel_union(acc, *term));
    }
    computed[i] = std::move(acc);
  });

  RecognizableTable full;
  for (std::size_t i = 0; i < g.comps.size(); ++i)
    full.entries.emplace(detail::grid_names(g, g.comps[i]),
                         is_decl[i] ? src[decl_of[i]].rel : computed[i]);
  if (auto vio = check_recognizable_consistency(p, full, std::nullopt, threads))
    return {std::nullopt, std::move(vio)};
  return {std::move(full), std::nullopt};
}

/// Complete a partial recognizable table whose declared composites hit every
/// cycle of the product graph (one machine transition per edge).  Every
/// product path leaving the declared set is then acyclic, so the computed
/// entries follow a single topological sweep: transform along each edge
/// (append for sends, quotient for receives) and union over incoming paths.
/// The completed table is then checked.
inline RecognizableExtension extend_feedback(const model::Protocol& p, const RecognizableTable& partial,
                                             int threads = 1) {
  if (partial.feedback.empty()) throw std::invalid_argument("extension needs a declared composite set");
  if (!partial.declared.empty())
    throw std::invalid_argument("declare either per-node index sets or a feedback set, not both");
  detail::Grid g = detail::make_grid(p);
  std::vector<int> decl_ids;
  for (const Composite& c : partial.feedback) decl_ids.push_back(g.comp_id.at(detail::grid_coords(g, p, c)));
  std::sort(decl_ids.begin(), decl_ids.end());
  std::vector<const lang::RecRel*> given = detail::bind_entries(p, g, partial.entries, decl_ids);
  std::vector<char> is_decl(g.comps.size(), 0);
  for (int i : decl_ids) is_decl[i] = 1;
  for (int i : decl_ids) detail::require_rel_shape(p, detail::grid_names(g, g.comps[i]), *given[i]);

  std::vector<detail::Step> steps = detail::steps_on(g, -1);
  std::vector<std::vector<std::pair<int, int>>> adj(g.comps.size());  // (target comp, step)
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const detail::Step& st = steps[s];
    for (std::size_t i = 0; i < g.comps.size(); ++i) {
      if (g.comps[i][st.node] != st.e.state) continue;
      std::vector<int> tc = g.comps[i];
      tc[st.node] = st.e.target;
      adj[i].emplace_back(g.comp_id.at(tc), static_cast<int>(s));
    }
  }

  // The declared set must hit every product cycle; find any cycle avoiding it.
  {
    std::vector<int> color(g.comps.size(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<int> parent(g.comps.size(), -1);
    for (std::size_t root = 0; root < g.comps.size(); ++root) {
      if (is_decl[root] || color[root]) continue;
      std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(root), 0}};
      color[root] = 1;
      while (!stack.empty()) {
        auto& [u, next] = stack.back();
        if (next == adj[u].size()) {
          color[u] = 2;
          stack.pop_back();
          continue;
        }
        int v = adj[u][next++].first;
        if (is_decl[v]) continue;
        if (color[v] == 1) {
          std::string cyc = detail::comp_str(g, v);
          for (int w = u; w != -1 && w != v; w = parent[w]) cyc = detail::comp_str(g, w) + " -> " + cyc;
          cyc = detail::comp_str(g, v) + " -> " + cyc;
          throw std::invalid_argument("the declared set misses a product-graph cycle: " + cyc);
        }
        if (color[v] == 0) {
          color[v] = 1;
          parent[v] = u;
          stack.push_back({v, 0});
        }
      }
    }
  }

  // Topological order of the undeclared composites.
  std::vector<int> indeg(g.comps.size(), 0);
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    if (is_decl[i]) continue;
    for (auto [to, s] : adj[i])
      if (!is_decl[to]) ++indeg[to];
  }
  std::deque<int> ready;
  for (std::size_t i = 0; i < g.comps.size(); ++i)
    if (!is_decl[i] && indeg[i] == 0) ready.push_back(static_cast<int>(i));
  std::vector<int> topo;
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    topo.push_back(u);
    for (auto [to, s] : adj[u])
      if (!is_decl[to] && --indeg[to] == 0) ready.push_back(to);
  }

  std::vector<std::string> chan_ids(p.channels.size());
  std::vector<lang::Alphabet> chan_alpha(p.channels.size());
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    chan_ids[c] = p.channels[c].id;
    chan_alpha[c] = p.channels[c].alphabet;
  }
  auto transform = [&](const lang::RecRel& rel, int s) {
    const model::Channel& ch = p.channels[steps[s].e.channel];
    const lang::Symbol& b = ch.alphabet[steps[s].e.symbol];
    return steps[s].e.send ? lang::rel_append_channel(rel, ch.id, b)
                           : lang::rel_quotient_channel(rel, ch.id, b);
  };
  std::vector<lang::RecRel> acc(g.comps.size(), lang::rel_none(chan_ids, chan_alpha));
  for (int u : decl_ids)
    for (auto [to, s] : adj[u])
      if (!is_decl[to]) acc[to] = lang::rel_reduce(lang::rel_union(acc[to], transform(*given[u], s)));
  for (int u : topo)
    for (auto [to, s] : adj[u])
      if (!is_decl[to]) acc[to] = lang::rel_reduce(lang::rel_union(acc[to], transform(acc[u], s)));

  RecognizableTable full;
  for (std::size_t i = 0; i < g.comps.size(); ++i)
    full.entries.emplace(detail::grid_names(g, g.comps[i]), is_decl[i] ? *given[i] : acc[i]);
  if (auto vio = check_recognizable_consistency(p, full, std::nullopt, threads))
    return {std::nullopt, std::move(vio)};
  return {std::move(full), std::nullopt};
}

/// Read an unreachability certificate off a consistent recognizable table:
/// if the initial entry admits the all-empty contents but the target entry
/// does not admit the target contents, the configuration is unreachable.
inline Certificate prove_unreachable(const model::Protocol& p, const RecognizableTable& t,
                                     const Composite& target, const std::vector<lang::Word>& contents) {
  if (t.partial()) throw std::invalid_argument("certificates need a total table; extend it first");
  detail::Grid g = detail::make_grid(p);
  detail::grid_coords(g, p, target);
  if (contents.size() != p.channels.size())
    throw std::invalid_argument("contents must list one word per channel");
  for (std::size_t c = 0; c < contents.size(); ++c)
    for (const lang::Symbol& s : contents[c])
      if (lang::alphabet_index(p.channels[c].alphabet, s) < 0)
        throw std::invalid_argument("symbol '" + s + "' is not in channel " + p.channels[c].id +
                                    "'s alphabet");
  Composite init = detail::grid_names(g, g.comps[detail::initial_comp(g)]);
  auto iit = t.entries.find(init);
  auto tit = t.entries.find(target);
  if (iit == t.entries.end() || tit == t.entries.end())
    throw std::invalid_argument("table is missing an entry for " +
                                detail::comp_str(iit == t.entries.end() ? init : target));
  std::vector<lang::Word> empty(p.channels.size());
  if (!lang::rel_member(iit->second, empty))
    return {Certificate::Status::Malformed,
            "the initial entry " + detail::comp_str(init) +
                " does not admit all-empty contents, so the table does not anchor the initial configuration"};
  if (lang::rel_member(tit->second, contents))
    return {Certificate::Status::Inapplicable, "the table admits contents " + detail::content_str(contents) +
                                                   " at " + detail::comp_str(target)};
  return {Certificate::Status::Certified,
          "configuration " + detail::comp_str(target) + " with contents " + detail::content_str(contents) +
              " is unreachable"};
}

/// Read a no-arrival certificate off a consistent recognizable table: message
/// b never sits at the head of the given channel while that channel's
/// receiver is in the given state.
inline Certificate prove_no_arrival(const model::Protocol& p, const RecognizableTable& t,
                                    const std::string& state, const lang::Symbol& b,
                                    const std::string& beta) {
  if (t.partial()) throw std::invalid_argument("certificates need a total table; extend it first");
  detail::Grid g = detail::make_grid(p);
  auto bit = g.ix.channel.find(beta);
  if (bit == g.ix.channel.end()) throw std::invalid_argument("unknown channel '" + beta + "'");
  const int bc = bit->second;
  const int rn = g.ix.node.at(p.channels[bc].to);
  auto sit = g.ix.state_index[rn].find(state);
  if (sit == g.ix.state_index[rn].end())
    throw std::invalid_argument("node " + p.nodes[rn] + " (channel " + beta + "'s receiver) has no state '" +
                                state + "'");
  if (lang::alphabet_index(p.channels[bc].alphabet, b) < 0)
    return {Certificate::Status::Inapplicable,
            "symbol '" + b + "' is not in channel " + beta + "'s alphabet"};

  std::vector<const lang::RecRel*> r = detail::bind_entries(p, g, t.entries, detail::all_comps(g));
  std::vector<lang::Word> empty(p.channels.size());
  if (!lang::rel_member(*r[detail::initial_comp(g)], empty))
    return {Certificate::Status::Malformed,
            "the initial entry does not admit all-empty contents, so the table does not anchor the "
            "initial configuration"};

  // Mask: channel beta starts with b, all other channels unrestricted.
  std::vector<std::string> chan_ids(p.channels.size());
  std::vector<lang::Dfa> mask_parts;
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    chan_ids[c] = p.channels[c].id;
    if (static_cast<int>(c) == bc) {
      lang::Dfa d;
      d.alphabet = p.channels[c].alphabet;
      d.num_states = 3;  // 0: before b, 1: after b (accept), 2: dead
      int ib = lang::alphabet_index(d.alphabet, b);
      d.delta = {std::vector<int>(d.alphabet.size(), 2), std::vector<int>(d.alphabet.size(), 1),
                 std::vector<int>(d.alphabet.size(), 2)};
      d.delta[0][ib] = 1;
      d.start = 0;
      d.accepting = {0, 1, 0};
      mask_parts.push_back(std::move(d));
    } else {
      mask_parts.push_back(lang::dfa_all(p.channels[c].alphabet));
    }
  }
  lang::RecRel mask = lang::rel_product(chan_ids, std::move(mask_parts));
  lang::RecRel none = lang::rel_none(chan_ids, [&] {
    std::vector<lang::Alphabet> as(p.channels.size());
    for (std::size_t c = 0; c < p.channels.size(); ++c) as[c] = p.channels[c].alphabet;
    return as;
  }());

  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    if (g.comps[i][rn] != sit->second) continue;
    lang::RecRel inter = lang::rel_intersect(*r[i], mask);
    if (std::optional<std::vector<lang::Word>> w = lang::rel_witness_not_included(none, inter))
      return {Certificate::Status::Inapplicable,
              "the table admits contents " + detail::content_str(*w) + " at " +
                  detail::comp_str(g, static_cast<int>(i)) + ", where channel " + beta +
                  " starts with " + b};
  }
  return {Certificate::Status::Certified,
          "in every admitted configuration with node " + p.nodes[rn] + " at state " + state +
              ", channel " + beta + " never has " + b + " at its head"};
}

// ---------------------------------------------------------------------------
// Proof file format
//
//   proof regular channel <id>     |   proof recognizable
//   default empty                      (optional; missing entries become empty)
//   V <node> <state,...>               (optional; per-node index sets)
//   feedback <state,...> ...           (recognizable only; composite states)
//   Q <state,...> = <regex>            (regular entries)
//   R <state,...> = (<regex>, ...) + (<regex>, ...)   (recognizable entries)
//
// Blank lines and lines starting with '#' are ignored.  Unmentioned nodes in
// a V declaration default to all of their states.
// ---------------------------------------------------------------------------

/// A parsed proof file, structurally checked but not yet bound to a protocol.
struct ProofFile {
  enum class Kind { Regular, Recognizable };
  struct VLine {
    int line;
    std::string node;
    std::vector<std::string> states;
  };
  struct QLine {
    int line;
    Composite comp;
    std::string regex;
  };
  struct RLine {
    int line;
    Composite comp;
    std::vector<std::vector<std::string>> products;  // one regex text per channel, per term
  };
  struct FLine {
    int line;
    Composite comp;
  };

  Kind kind = Kind::Regular;
  std::string channel;  // regular only
  int header_line = 0;
  bool default_empty = false;
  std::vector<VLine> v;
  std::vector<QLine> q;
  std::vector<RLine> r;
  std::vector<FLine> feedback;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& s, int line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  for (const std::string& f : out)
    if (f.empty()) throw model::FileError("empty name in comma-separated list", line);
  return out;
}

/// Split "(a, b) + (c, d)" into terms at top-level '+', each term into
/// per-channel regex texts at top-level ','.
inline std::vector<std::vector<std::string>> split_products(const std::string& s, int line) {
  std::vector<std::string> terms;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw model::FileError("unbalanced ')' in relation expression", line);
    if (c == '+' && depth == 0) {
      terms.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw model::FileError("unbalanced '(' in relation expression", line);
  terms.push_back(trim(cur));
  std::vector<std::vector<std::string>> out;
  for (const std::string& t : terms) {
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
      throw model::FileError("each relation term must be parenthesized: (regex, regex, ...)", line);
    std::string body = t.substr(1, t.size() - 2);
    std::vector<std::string> parts;
    std::string p;
    int d = 0;
    for (char c : body) {
      if (c == '(') ++d;
      if (c == ')') --d;
      if (c == ',' && d == 0) {
        parts.push_back(trim(p));
        p.clear();
      } else {
        p += c;
      }
    }
    parts.push_back(trim(p));
    for (const std::string& f : parts)
      if (f.empty()) throw model::FileError("empty component in relation term", line);
    out.push_back(std::move(parts));
  }
  return out;
}

}  // namespace detail

inline ProofFile parse_proof(const std::string& text) {
  ProofFile f;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool seen_header = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    std::istringstream t(s);
    std::string tag;
    t >> tag;
    if (!seen_header) {
      if (tag != "proof") throw model::FileError("a proof file must start with a 'proof' header", line);
      std::string kind;
      t >> kind;
      if (kind == "regular") {
        std::string kw;
        t >> kw >> f.channel;
        if (kw != "channel" || f.channel.empty())
          throw model::FileError("expected 'proof regular channel <id>'", line);
        f.kind = ProofFile::Kind::Regular;
      } else if (kind == "recognizable") {
        f.kind = ProofFile::Kind::Recognizable;
      } else {
        throw model::FileError("proof kind must be 'regular' or 'recognizable'", line);
      }
      std::string extra;
      if (t >> extra) throw model::FileError("unexpected text after proof header", line);
      f.header_line = line;
      seen_header = true;
      continue;
    }
    if (tag == "default") {
      std::string what, extra;
      t >> what;
      if (what != "empty" || (t >> extra))
        throw model::FileError("expected 'default empty'", line);
      f.default_empty = true;
    } else if (tag == "V") {
      std::string node, csv, extra;
      t >> node >> csv;
      if (node.empty() || csv.empty())
        throw model::FileError("expected 'V <node> <state,...>'", line);
      if (t >> extra) throw model::FileError("unexpected text after index-set declaration", line);
      f.v.push_back({line, node, detail::split_csv(csv, line)});
    } else if (tag == "feedback") {
      if (f.kind != ProofFile::Kind::Recognizable)
        throw model::FileError("feedback sets apply to recognizable tables", line);
      std::string csv;
      bool any = false;
      while (t >> csv) {
        f.feedback.push_back({line, detail::split_csv(csv, line)});
        any = true;
      }
      if (!any) throw model::FileError("expected 'feedback <state,...> ...'", line);
    } else if (tag == "Q") {
      if (f.kind != ProofFile::Kind::Regular)
        throw model::FileError("Q entries belong to regular tables; use R here", line);
      std::size_t eq = s.find('=');
      if (eq == std::string::npos) throw model::FileError("expected 'Q <state,...> = <regex>'", line);
      std::string lhs = detail::trim(s.substr(1, eq - 1));
      std::string rhs = detail::trim(s.substr(eq + 1));
      if (lhs.empty() || rhs.empty()) throw model::FileError("expected 'Q <state,...> = <regex>'", line);
      f.q.push_back({line, detail::split_csv(lhs, line), rhs});
    } else if (tag == "R") {
      if (f.kind != ProofFile::Kind::Recognizable)
        throw model::FileError("R entries belong to recognizable tables; use Q here", line);
      std::size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw model::FileError("expected 'R <state,...> = (<regex>, ...) + ...'", line);
      std::string lhs = detail::trim(s.substr(1, eq - 1));
      std::string rhs = detail::trim(s.substr(eq + 1));
      if (lhs.empty() || rhs.empty())
        throw model::FileError("expected 'R <state,...> = (<regex>, ...) + ...'", line);
      f.r.push_back({line, detail::split_csv(lhs, line), detail::split_products(rhs, line)});
    } else {
      throw model::FileError("unknown directive '" + tag + "'", line);
    }
  }
  if (!seen_header) throw model::FileError("a proof file must start with a 'proof' header", 1);
  return f;
}

namespace detail {

/// Shared V-line binding: per-node index sets, defaulting unmentioned nodes
/// to all of their states.  Empty result means no V lines (total table).
inline std::vector<std::set<std::string>> bind_index_sets(const model::Protocol& p, const Grid& g,
                                                          const std::vector<ProofFile::VLine>& v) {
  if (v.empty()) return {};
  std::vector<std::set<std::string>> declared(p.nodes.size());
  std::vector<int> seen(p.nodes.size(), 0);
  for (const ProofFile::VLine& vl : v) {
    auto it = g.ix.node.find(vl.node);
    if (it == g.ix.node.end()) throw model::FileError("unknown node '" + vl.node + "'", vl.line);
    if (seen[it->second]++) throw model::FileError("duplicate index set for node " + vl.node, vl.line);
    for (const std::string& st : vl.states) {
      if (!g.ix.state_index[it->second].count(st))
        throw model::FileError("node " + vl.node + " has no state '" + st + "'", vl.line);
      declared[it->second].insert(st);
    }
  }
  for (std::size_t n = 0; n < p.nodes.size(); ++n)
    if (!seen[n])
      for (const std::string& st : g.ix.states[n]) declared[n].insert(st);
  return declared;
}

inline int bind_comp(const model::Protocol& p, const Grid& g, const Composite& comp, int line) {
  try {
    return g.comp_id.at(grid_coords(g, p, comp));
  } catch (const std::invalid_argument& e) {
    throw model::FileError(e.what(), line);
  }
}

/// The composite ids a bound table must cover: the declared product if V
/// lines are present, the feedback set if given, otherwise everything.
inline std::vector<int> bind_domain(const model::Protocol& p, const Grid& g,
                                    const std::vector<std::set<std::string>>& declared,
                                    const std::vector<int>& feedback_ids) {
  if (!declared.empty()) return declared_comps(p, g, declared);
  if (!feedback_ids.empty()) return feedback_ids;
  return all_comps(g);
}

}  // namespace detail

/// Bind a parsed regular proof file to a protocol, compiling entry regexes
/// over the designated channel's alphabet.  Structural and naming problems
/// raise model::FileError with the offending line.
inline RegularTable bind_regular(const model::Protocol& p, const ProofFile& f) {
  if (f.kind != ProofFile::Kind::Regular)
    throw model::FileError("this proof file declares a recognizable table", f.header_line);
  detail::Grid g = detail::make_grid(p);
  auto bit = g.ix.channel.find(f.channel);
  if (bit == g.ix.channel.end())
    throw model::FileError("unknown channel '" + f.channel + "'", f.header_line);
  const lang::Alphabet& mb = p.channels[bit->second].alphabet;

  RegularTable t;
  t.channel = f.channel;
  t.declared = detail::bind_index_sets(p, g, f.v);

  std::vector<int> domain = detail::bind_domain(p, g, t.declared, {});
  std::vector<char> wanted(g.comps.size(), 0);
  for (int i : domain) wanted[i] = 1;
  std::set<int> bound;
  for (const ProofFile::QLine& ql : f.q) {
    int id = detail::bind_comp(p, g, ql.comp, ql.line);
    if (!wanted[id])
      throw model::FileError("entry " + detail::comp_str(ql.comp) + " is outside the declared index sets",
                             ql.line);
    if (!bound.insert(id).second)
      throw model::FileError("duplicate entry for " + detail::comp_str(ql.comp), ql.line);
    try {
      t.entries.emplace(detail::grid_names(g, g.comps[id]),
                        lang::minimize(lang::compile(lang::parse_regex(ql.regex, mb), mb)));
    } catch (const lang::ParseError& e) {
      throw model::FileError(e.what(), ql.line);
    }
  }
  for (int i : domain)
    if (!bound.count(i)) {
      if (!f.default_empty)
        throw model::FileError("missing an entry for " + detail::comp_str(g, i) +
                                   "; add it or declare 'default empty'",
                               f.header_line);
      t.entries.emplace(detail::grid_names(g, g.comps[i]), lang::dfa_none(mb));
    }
  return t;
}

/// Bind a parsed recognizable proof file to a protocol.  Each R term is a
/// product of per-channel regexes in the protocol's channel declaration
/// order; an entry is the union of its terms.
inline RecognizableTable bind_recognizable(const model::Protocol& p, const ProofFile& f) {
  if (f.kind != ProofFile::Kind::Recognizable)
    throw model::FileError("this proof file declares a regular table", f.header_line);
  detail::Grid g = detail::make_grid(p);
  if (!f.v.empty() && !f.feedback.empty())
    throw model::FileError("declare either per-node index sets or a feedback set, not both",
                           f.feedback.front().line);

  RecognizableTable t;
  t.declared = detail::bind_index_sets(p, g, f.v);
  std::vector<int> feedback_ids;
  for (const ProofFile::FLine& fl : f.feedback) {
    int id = detail::bind_comp(p, g, fl.comp, fl.line);
    Composite names = detail::grid_names(g, g.comps[id]);
    if (!t.feedback.insert(names).second)
      throw model::FileError("duplicate feedback composite " + detail::comp_str(names), fl.line);
    feedback_ids.push_back(id);
  }
  std::sort(feedback_ids.begin(), feedback_ids.end());

  std::vector<std::string> chan_ids(p.channels.size());
  std::vector<lang::Alphabet> chan_alpha(p.channels.size());
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    chan_ids[c] = p.channels[c].id;
    chan_alpha[c] = p.channels[c].alphabet;
  }

  std::vector<int> domain = detail::bind_domain(p, g, t.declared, feedback_ids);
  std::vector<char> wanted(g.comps.size(), 0);
  for (int i : domain) wanted[i] = 1;
  std::set<int> bound;
  for (const ProofFile::RLine& rl : f.r) {
    int id = detail::bind_comp(p, g, rl.comp, rl.line);
    if (!wanted[id])
      throw model::FileError("entry " + detail::comp_str(rl.comp) + " is outside the declared domain",
                             rl.line);
    if (!bound.insert(id).second)
      throw model::FileError("duplicate entry for " + detail::comp_str(rl.comp), rl.line);
    lang::RecRel acc = lang::rel_none(chan_ids, chan_alpha);
    for (const std::vector<std::string>& term : rl.products) {
      if (term.size() != p.channels.size())
        throw model::FileError("each relation term needs one regex per channel (" +
                                   std::to_string(p.channels.size()) + " channels declared)",
                               rl.line);
      std::vector<lang::Dfa> parts;
      for (std::size_t c = 0; c < term.size(); ++c) {
        try {
          parts.push_back(lang::compile(lang::parse_regex(term[c], chan_alpha[c]), chan_alpha[c]));
        } catch (const lang::ParseError& e) {
          throw model::FileError(std::string(e.what()) + " (channel " + chan_ids[c] + ")", rl.line);
        }
      }
      acc = lang::rel_union(acc, lang::rel_product(chan_ids, std::move(parts)));
    }
    t.entries.emplace(detail::grid_names(g, g.comps[id]), lang::rel_reduce(acc));
  }
  for (int i : domain)
    if (!bound.count(i)) {
      if (!f.default_empty)
        throw model::FileError("missing an entry for " + detail::comp_str(g, i) +
                                   "; add it or declare 'default empty'",
                               f.header_line);
      t.entries.emplace(detail::grid_names(g, g.comps[i]), lang::rel_none(chan_ids, chan_alpha));
    }
  return t;
}

namespace detail {

inline std::string csv_str(const Composite& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + c[i];
  return s;
}

inline void print_v_lines(std::string& out, const model::Protocol& p,
                          const std::vector<std::set<std::string>>& declared) {
  for (std::size_t n = 0; n < declared.size(); ++n) {
    out += "V " + p.nodes[n] + " ";
    bool first = true;
    for (const std::string& st : declared[n]) {
      out += (first ? "" : ",") + st;
      first = false;
    }
    out += "\n";
  }
}

}  // namespace detail

/// Render a regular table in proof file format; bind_regular(parse_proof(·))
/// recovers an equivalent table.
inline std::string print_proof(const model::Protocol& p, const RegularTable& t) {
  std::string out = "proof regular channel " + t.channel + "\n";
  detail::print_v_lines(out, p, t.declared);
  for (const auto& [comp, dfa] : t.entries)
    out += "Q " + detail::csv_str(comp) + " = " + lang::print_regex(lang::dfa_to_regex(dfa)) + "\n";
  return out;
}

/// Render a recognizable table in proof file format.
inline std::string print_proof(const model::Protocol& p, const RecognizableTable& t) {
  std::string out = "proof recognizable\n";
  detail::print_v_lines(out, p, t.declared);
  for (const Composite& c : t.feedback) out += "feedback " + detail::csv_str(c) + "\n";
  for (const auto& [comp, rel] : t.entries) {
    out += "R " + detail::csv_str(comp) + " = ";
    std::vector<std::vector<lang::Dfa>> prods = lang::rel_to_products(rel);
    if (prods.empty()) {
      out += "(";
      for (std::size_t c = 0; c < rel.arity(); ++c) out += (c ? ", " : "") + std::string("empty");
      out += ")";
    } else {
      for (std::size_t k = 0; k < prods.size(); ++k) {
        out += k ? " + (" : "(";
        for (std::size_t c = 0; c < prods[k].size(); ++c)
          out += (c ? ", " : "") + lang::print_regex(lang::dfa_to_regex(prods[k][c]));
        out += ")";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace cfsm::proofs

// Global state space construction and reachability properties, all under
// explicit budgets: the spaces may be infinite, so every verdict carries a
// definitive flag tied to whether exploration exhausted the space.
#pragma once

#include <cfsm/model.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace cfsm::explore {

/// Composite state (one local state index per node, in protocol node order)
/// plus one FIFO content per channel; bytes are per-channel alphabet indices
/// with the head at position 0.
struct GlobalState {
  std::vector<int> comp;
  std::vector<std::string> chans;
  friend auto operator<=>(const GlobalState&, const GlobalState&) = default;

  std::size_t total_len() const {
    std::size_t t = 0;
    for (const auto& c : chans) t += c.size();
    return t;
  }
};

struct Budget {
  std::size_t max_states = 1000000;
  std::size_t max_channel_len = 64;
  std::size_t max_total_len = SIZE_MAX;
};

/// One executed transition: node that moved, polarity, and the symbol/channel
/// as indices into the protocol's declaration order.
struct Label {
  int node;
  bool send;
  int symbol;
  int channel;
  friend auto operator<=>(const Label&, const Label&) = default;
};

namespace detail {

struct GsHash {
  std::size_t operator()(const GlobalState& g) const {
    std::size_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::size_t v) { h = (h ^ v) * 0x100000001b3ull; };
    for (int c : g.comp) mix(static_cast<std::size_t>(c) + 0x9e37);
    for (const auto& s : g.chans) {
      mix(s.size() + 0x51ed);
      for (char c : s) mix(static_cast<unsigned char>(c));
    }
    return h;
  }
};

}  // namespace detail

struct StateGraph {
  model::Protocol proto;
  model::Index idx;
  std::vector<GlobalState> states;  // BFS discovery order; index 0 = initial
  struct Edge {
    int from;
    Label label;
    int to;
    friend auto operator<=>(const Edge&, const Edge&) = default;
  };
  std::vector<Edge> edges;              // discovery order, kept states only
  std::vector<std::vector<int>> out;    // per state: edge indices
  std::vector<bool> budget_pruned;      // per state: a successor was cut by budget
  bool exhausted = true;                // false iff any budget cut happened
};

inline std::string label_string(const model::Protocol& p, const Label& l) {
  const model::Channel& c = p.channels[l.channel];
  return std::string(l.send ? "-" : "+") + c.alphabet[l.symbol] + "@" + c.id;
}

inline GlobalState initial_state(const model::Index& idx, const model::Protocol& p) {
  return GlobalState{idx.start, std::vector<std::string>(p.channels.size())};
}

namespace detail {

/// Apply one machine edge to a global state if enabled; returns the successor.
inline std::optional<GlobalState> apply(const GlobalState& g, int node, const model::Index::Edge& e) {
  GlobalState nx = g;
  std::string& ch = nx.chans[e.channel];
  if (e.send) {
    ch.push_back(static_cast<char>(e.symbol));
  } else {
    if (ch.empty() || static_cast<unsigned char>(ch[0]) != static_cast<unsigned>(e.symbol))
      return std::nullopt;
    ch.erase(ch.begin());
  }
  nx.comp[node] = e.target;
  return nx;
}

}  // namespace detail

/// Exactly the one-step successors: sends append to the tail of the target
/// queue, receives consume a matching head. Deterministic order: nodes, then
/// that node's transitions, in declaration order.
inline std::vector<std::pair<Label, GlobalState>> successors(const model::Index& idx,
                                                             const GlobalState& g) {
  std::vector<std::pair<Label, GlobalState>> out;
  for (std::size_t n = 0; n < idx.out.size(); ++n)
    for (const model::Index::Edge& e : idx.out[n][g.comp[n]])
      if (auto nx = detail::apply(g, static_cast<int>(n), e))
        out.emplace_back(Label{static_cast<int>(n), e.send, e.symbol, e.channel}, std::move(*nx));
  return out;
}

inline std::vector<std::pair<Label, GlobalState>> successors(const model::Protocol& p,
                                                             const GlobalState& g) {
  return successors(model::build_index(p), g);
}

using Filter = std::function<bool(const GlobalState&)>;

/// Breadth-first closure from (S⁰, C⁰). Budget cuts clear `exhausted`; filter
/// cuts do not (the filter defines a smaller space that can itself be
/// exhausted). Budget overruns are reported via the flag, never an exception.
inline StateGraph reach(const model::Protocol& p, const Budget& b = {}, const Filter& filter = {}) {
  StateGraph sg;
  sg.proto = p;
  sg.idx = model::build_index(p);
  GlobalState init = initial_state(sg.idx, p);
  std::unordered_map<GlobalState, int, detail::GsHash> seen;
  if (filter && !filter(init)) return sg;  // empty space: vacuously exhausted
  sg.states.push_back(init);
  sg.out.emplace_back();
  sg.budget_pruned.push_back(false);
  seen.emplace(std::move(init), 0);
  for (std::size_t qi = 0; qi < sg.states.size(); ++qi) {
    const GlobalState g = sg.states[qi];  // copy: states vector reallocates
    const std::size_t total = g.total_len();
    for (std::size_t n = 0; n < sg.idx.out.size(); ++n) {
      for (const model::Index::Edge& e : sg.idx.out[n][g.comp[n]]) {
        if (e.send && (g.chans[e.channel].size() + 1 > b.max_channel_len ||
                       total + 1 > b.max_total_len)) {
          sg.exhausted = false;
          sg.budget_pruned[qi] = true;
          continue;
        }
        auto nx = detail::apply(g, static_cast<int>(n), e);
        if (!nx) continue;
        int to;
        auto it = seen.find(*nx);
        if (it != seen.end()) {
          to = it->second;
        } else {
          if (filter && !filter(*nx)) continue;
          if (sg.states.size() >= b.max_states) {
            sg.exhausted = false;
            sg.budget_pruned[qi] = true;
            continue;
          }
          to = static_cast<int>(sg.states.size());
          sg.states.push_back(*nx);
          sg.out.emplace_back();
          sg.budget_pruned.push_back(false);
          seen.emplace(std::move(*nx), to);
        }
        sg.out[qi].push_back(static_cast<int>(sg.edges.size()));
        sg.edges.push_back({static_cast<int>(qi), Label{static_cast<int>(n), e.send, e.symbol, e.channel}, to});
      }
    }
  }
  return sg;
}

/// A state is a receive state iff none of its transitions is a send;
/// states without transitions count as receive states.
inline bool is_receive_state(const model::Index& idx, int node, int state) {
  for (const auto& e : idx.out[node][state])
    if (e.send) return false;
  return true;
}

inline std::vector<std::string> composite_names(const StateGraph& sg, int id) {
  std::vector<std::string> out;
  for (std::size_t n = 0; n < sg.states[id].comp.size(); ++n)
    out.push_back(sg.idx.states[n][sg.states[id].comp[n]]);
  return out;
}

struct StableResult {
  std::set<std::vector<std::string>> composites;
  bool definitive;
};

/// Composite states S with (S, C⁰) reachable in sg.
inline StableResult stable_states(const StateGraph& sg) {
  StableResult r{{}, sg.exhausted};
  for (std::size_t i = 0; i < sg.states.size(); ++i)
    if (sg.states[i].total_len() == 0) r.composites.insert(composite_names(sg, static_cast<int>(i)));
  return r;
}

struct DeadlockResult {
  std::vector<int> states;  // ids into sg.states
  bool definitive;
};

/// Reachable states where every machine sits in a receive state and all
/// channels are empty.
inline DeadlockResult deadlocks(const StateGraph& sg) {
  DeadlockResult r{{}, sg.exhausted};
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    const GlobalState& g = sg.states[i];
    if (g.total_len() != 0) continue;
    bool all = true;
    for (std::size_t n = 0; n < g.comp.size() && all; ++n)
      all = is_receive_state(sg.idx, static_cast<int>(n), g.comp[n]);
    if (all) r.states.push_back(static_cast<int>(i));
  }
  return r;
}

struct Reception {
  std::string node, state, channel, symbol;
  friend auto operator<=>(const Reception&, const Reception&) = default;
};

struct ReceptionResult {
  std::set<Reception> receptions;
  bool definitive;
};

/// "b can arrive at p": some reachable global state has the channel's
/// receiver in p with b at the head. A state property: scanned over states,
/// not over executed edges.
inline ReceptionResult executable_receptions(const StateGraph& sg) {
  ReceptionResult r{{}, sg.exhausted};
  for (const GlobalState& g : sg.states)
    for (std::size_t c = 0; c < g.chans.size(); ++c) {
      if (g.chans[c].empty()) continue;
      const model::Channel& ch = sg.proto.channels[c];
      int node = sg.idx.node.at(ch.to);
      r.receptions.insert({ch.to, sg.idx.states[node][g.comp[node]], ch.id,
                           ch.alphabet[static_cast<unsigned char>(g.chans[c][0])]});
    }
  return r;
}

struct WellFormedResult {
  enum class Verdict { Holds, Violated, Unknown } verdict;
  std::vector<Reception> arrivals_without_edge;  // definitive violations
  std::vector<Reception> edges_without_arrival;  // violations only if definitive
};

/// Arrivals must match the transition diagrams both ways: every arriving
/// (p,b) has a +b edge at p, and every +b edge at p sees b arrive.
inline WellFormedResult well_formed(const StateGraph& sg) {
  ReceptionResult er = executable_receptions(sg);
  std::set<Reception> diagram;
  for (std::size_t n = 0; n < sg.idx.out.size(); ++n)
    for (std::size_t s = 0; s < sg.idx.out[n].size(); ++s)
      for (const auto& e : sg.idx.out[n][s])
        if (!e.send)
          diagram.insert({sg.proto.nodes[n], sg.idx.states[n][s], sg.proto.channels[e.channel].id,
                          sg.proto.channels[e.channel].alphabet[e.symbol]});
  WellFormedResult r;
  for (const auto& a : er.receptions)
    if (!diagram.count(a)) r.arrivals_without_edge.push_back(a);
  for (const auto& d : diagram)
    if (!er.receptions.count(d)) r.edges_without_arrival.push_back(d);
  if (!r.arrivals_without_edge.empty())
    r.verdict = WellFormedResult::Verdict::Violated;
  else if (!r.edges_without_arrival.empty())
    r.verdict = er.definitive ? WellFormedResult::Verdict::Violated : WellFormedResult::Verdict::Unknown;
  else
    r.verdict = er.definitive ? WellFormedResult::Verdict::Holds : WellFormedResult::Verdict::Unknown;
  return r;
}

struct BlockedEntry {
  int state;
  std::string channel;
  enum class Verdict { Blocked, Free, Unknown } verdict;
  friend auto operator<=>(const BlockedEntry&, const BlockedEntry&) = default;
};

/// For each reachable state with a nonempty channel, forward-search for a
/// later reception on that channel; FIFO guarantees the pending head is the
/// symbol such a reception consumes first.
inline std::vector<BlockedEntry> blocked_channels(const StateGraph& sg, const Budget& b = {}) {
  std::vector<BlockedEntry> out;
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    for (std::size_t c = 0; c < sg.states[i].chans.size(); ++c) {
      if (sg.states[i].chans[c].empty()) continue;
      std::vector<int> stack{static_cast<int>(i)};
      std::set<int> visited{static_cast<int>(i)};
      bool found = false, cut = false;
      while (!stack.empty() && !found) {
        int s = stack.back();
        stack.pop_back();
        if (sg.budget_pruned[s]) cut = true;
        for (int ei : sg.out[s]) {
          const StateGraph::Edge& e = sg.edges[ei];
          if (!e.label.send && e.label.channel == static_cast<int>(c)) {
            found = true;
            break;
          }
          if (visited.count(e.to)) continue;
          if (visited.size() >= b.max_states) {
            cut = true;
            continue;
          }
          visited.insert(e.to);
          stack.push_back(e.to);
        }
      }
      BlockedEntry::Verdict v = found        ? BlockedEntry::Verdict::Free
                                : cut        ? BlockedEntry::Verdict::Unknown
                                             : BlockedEntry::Verdict::Blocked;
      out.push_back({static_cast<int>(i), sg.proto.channels[c].id, v});
    }
  }
  return out;
}

struct HalfDuplexResult {
  enum class Verdict { Yes, No, Unknown } verdict;
  std::optional<int> counterexample;  // state id with both channels nonempty
};

/// Every reachable state has at least one of the two channels empty.
/// Requires a two-node protocol with one channel in each direction.
inline HalfDuplexResult half_duplex(const StateGraph& sg) {
  const auto& chs = sg.proto.channels;
  if (sg.proto.nodes.size() != 2 || chs.size() != 2 || chs[0].from != chs[1].to ||
      chs[0].to != chs[1].from || chs[0].from == chs[0].to)
    throw std::invalid_argument("half-duplex needs a two-node protocol with one channel each way");
  for (std::size_t i = 0; i < sg.states.size(); ++i)
    if (!sg.states[i].chans[0].empty() && !sg.states[i].chans[1].empty())
      return {HalfDuplexResult::Verdict::No, static_cast<int>(i)};
  return {sg.exhausted ? HalfDuplexResult::Verdict::Yes : HalfDuplexResult::Verdict::Unknown,
          std::nullopt};
}

struct BoundsResult {
  std::optional<std::size_t> bound;      // max Σ|x_ξ|, only when exhausted
  std::vector<std::size_t> per_channel;  // observed maxima (informational)
};

inline BoundsResult bounded_channels(const StateGraph& sg) {
  BoundsResult r;
  r.per_channel.assign(sg.proto.channels.size(), 0);
  std::size_t total = 0;
  for (const GlobalState& g : sg.states) {
    total = std::max(total, g.total_len());
    for (std::size_t c = 0; c < g.chans.size(); ++c)
      r.per_channel[c] = std::max(r.per_channel[c], g.chans[c].size());
  }
  if (sg.exhausted) r.bound = total;
  return r;
}

/// DOT rendering with stable numbering (BFS ids). Node label = composite
/// state + channel contents; edge label = ±sym@channel.
inline std::string to_dot(const StateGraph& sg) {
  std::ostringstream o;
  o << "digraph states {\n";
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    const GlobalState& g = sg.states[i];
    o << "  s" << i << " [label=\"" << i << " (";
    std::vector<std::string> names = composite_names(sg, static_cast<int>(i));
    for (std::size_t n = 0; n < names.size(); ++n) o << (n ? "," : "") << names[n];
    o << ")";
    for (std::size_t c = 0; c < g.chans.size(); ++c) {
      o << " " << sg.proto.channels[c].id << "=";
      if (g.chans[c].empty()) {
        o << "eps";
      } else {
        for (std::size_t k = 0; k < g.chans[c].size(); ++k)
          o << (k ? "." : "")
            << sg.proto.channels[c].alphabet[static_cast<unsigned char>(g.chans[c][k])];
      }
    }
    o << "\"];\n";
  }
  for (const StateGraph::Edge& e : sg.edges)
    o << "  s" << e.from << " -> s" << e.to << " [label=\"" << label_string(sg.proto, e.label)
      << "\"];\n";
  o << "}\n";
  return o.str();
}

/// Channel contents of a state as symbol-name words, one per channel.
inline std::vector<lang::Word> content_words(const StateGraph& sg, int id) {
  std::vector<lang::Word> out(sg.proto.channels.size());
  for (std::size_t c = 0; c < out.size(); ++c)
    for (char b : sg.states[id].chans[c])
      out[c].push_back(sg.proto.channels[c].alphabet[static_cast<unsigned char>(b)]);
  return out;
}

}  // namespace cfsm::explore

// Analyses for pairs of SR-machines: per-channel projections, send/receive
// cycles, channel-growth bounds, and the decidable affinity regime (no send
// cycles, finite balance).
#pragma once

#include <cfsm/explore.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cfsm::sr {

/// π_ξ: the channel-ξ symbols of a label string, in order, signs erased.
/// `labels` is whitespace-separated tokens `+sym` / `-sym`; symbols resolve
/// to channels through the protocol's pairwise disjoint alphabets.
inline lang::Word project(const model::Protocol& p, const std::string& labels,
                          const std::string& channel) {
  const model::Channel* target = nullptr;
  std::map<std::string, const model::Channel*> owner;
  for (const auto& ch : p.channels) {
    if (ch.id == channel) target = &ch;
    for (const auto& s : ch.alphabet) owner[s] = &ch;
  }
  if (!target) throw std::invalid_argument("unknown channel '" + channel + "'");
  lang::Word out;
  std::istringstream in(labels);
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-'))
      throw std::invalid_argument("label token '" + tok + "' must be +sym or -sym");
    std::string sym = tok.substr(1);
    auto it = owner.find(sym);
    if (it == owner.end()) throw std::invalid_argument("unknown symbol '" + sym + "'");
    if (it->second == target) out.push_back(sym);
  }
  return out;
}

namespace detail {

/// A machine's transition diagram as an indexed graph, no protocol context.
struct Diagram {
  std::vector<std::string> states;
  std::map<std::string, int> id;
  std::vector<std::vector<std::pair<int, bool>>> out;  // (target, send?)

  explicit Diagram(const model::Machine& m) {
    auto add = [&](const std::string& s) {
      if (id.emplace(s, static_cast<int>(states.size())).second) {
        states.push_back(s);
        out.emplace_back();
      }
    };
    add(m.start);
    for (const auto& t : m.transitions) {
      add(t.state);
      add(t.target);
    }
    for (const auto& t : m.transitions) out[id.at(t.state)].push_back({id.at(t.target), t.send});
  }
};

/// One representative cycle (as a state list, wrap implied) for every
/// strongly connected component of the subgraph keeping `send`-polarity
/// edges. Empty result = the restricted subgraph is acyclic.
inline std::vector<std::vector<std::string>> polarity_cycles(const model::Machine& m, bool send) {
  Diagram d(m);
  const int n = static_cast<int>(d.states.size());
  std::vector<std::vector<int>> adj(n);
  for (int u = 0; u < n; ++u)
    for (auto [v, s] : d.out[u])
      if (s == send) adj[u].push_back(v);

  // Tarjan's strongly connected components, iteratively.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> onstack(n, false);
  std::vector<int> stk;
  int next = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> call{{root, 0}};
    while (!call.empty()) {
      auto& [u, ei] = call.back();
      if (ei == 0) {
        index[u] = low[u] = next++;
        stk.push_back(u);
        onstack[u] = true;
      }
      if (ei < adj[u].size()) {
        int v = adj[u][ei++];
        if (index[v] < 0)
          call.push_back({v, 0});
        else if (onstack[v])
          low[u] = std::min(low[u], index[v]);
      } else {
        if (low[u] == index[u]) {
          while (true) {
            int v = stk.back();
            stk.pop_back();
            onstack[v] = false;
            comp[v] = ncomp;
            if (v == u) break;
          }
          ++ncomp;
        }
        int done = u;
        call.pop_back();
        if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      }
    }
  }

  std::vector<std::vector<std::string>> cycles;
  std::vector<bool> reported(ncomp, false);
  for (int u = 0; u < n; ++u) {
    if (reported[comp[u]]) continue;
    bool self = false;
    bool bigger = false;
    for (int w = 0; w < n; ++w)
      if (w != u && comp[w] == comp[u]) bigger = true;
    for (int v : adj[u])
      if (v == u) self = true;
    if (!self && !bigger) continue;
    reported[comp[u]] = true;
    if (self) {
      cycles.push_back({d.states[u]});
      continue;
    }
    // Shortest cycle through u inside the component.
    std::vector<int> parent(n, -2);
    std::vector<int> queue{u};
    parent[u] = -1;
    int back = -1;
    for (std::size_t qi = 0; qi < queue.size() && back < 0; ++qi)
      for (int v : adj[queue[qi]]) {
        if (v == u) {
          back = queue[qi];
          break;
        }
        if (comp[v] == comp[u] && parent[v] == -2) {
          parent[v] = queue[qi];
          queue.push_back(v);
        }
      }
    std::vector<std::string> cyc;
    for (int v = back; v != -1; v = parent[v]) cyc.push_back(d.states[v]);
    std::reverse(cyc.begin(), cyc.end());
    cycles.push_back(cyc);
  }
  return cycles;
}

}  // namespace detail

/// Directed cycles whose labels are all sends (one representative per
/// strongly connected component of the send-edge subgraph).
inline std::vector<std::vector<std::string>> send_cycles(const model::Machine& m) {
  return detail::polarity_cycles(m, true);
}

/// Directed cycles whose labels are all receives.
inline std::vector<std::vector<std::string>> receive_cycles(const model::Machine& m) {
  return detail::polarity_cycles(m, false);
}

namespace detail {

inline void require_sr_pair(const model::Protocol& p) {
  if (!model::classify(p).is_sr_pair)
    throw std::invalid_argument("protocol '" + p.name + "' is not a pair of SR-machines");
}

}  // namespace detail

/// k₀(k₁−1)+1 for an SR pair: once the channel sent by machine 0 holds this
/// many symbols while the other channel is empty, machine 0 has a send cycle
/// and machine 1 a receive cycle — if the pair is affine.
inline std::size_t growth_bound(const model::Protocol& p) {
  detail::require_sr_pair(p);
  model::Index idx = model::build_index(p);
  std::size_t k0 = idx.states[idx.node.at(p.machines[0].node)].size();
  std::size_t k1 = idx.states[idx.node.at(p.machines[1].node)].size();
  return k0 * (k1 - 1) + 1;
}

enum class Verdict { Yes, No, Unknown };

/// Outcome of decide_affine_deadlock. Every Yes/No is definitive; Unknown
/// carries the triggering condition in `rationale`.
struct AffineDecision {
  Verdict affine = Verdict::Unknown;
  Verdict deadlock_free = Verdict::Unknown;
  Verdict bounded = Verdict::Unknown;
  std::optional<std::size_t> bound;  // max total channel load, when bounded
  std::string rationale;
  std::optional<std::string> witness;  // unmatched home-to-home word, if affine == No
};

namespace detail {

/// Follower configuration of the balance engine: its state plus, per
/// channel, the residual of the leader's projection it has not matched yet.
struct Member {
  int state;
  std::array<std::string, 2> lag;  // indexed by channel position 0/1
  auto operator<=>(const Member&) const = default;
};

struct InclusionResult {
  enum class Status { Included, Unmatched, Overflow, Budget } status;
  std::string leader_word;  // home-to-home witness when Unmatched (label tokens)
};

/// Edges of one machine as (send?, symbol, channel position, target) per
/// state, with channels renumbered so position 0 is the leader's out-channel.
inline std::vector<std::vector<std::tuple<bool, int, int, int>>> pair_edges(
    const model::Index& idx, int node, const std::array<int, 2>& chanpos) {
  std::vector<std::vector<std::tuple<bool, int, int, int>>> out(idx.states[node].size());
  for (std::size_t s = 0; s < idx.states[node].size(); ++s)
    for (const auto& e : idx.out[node][s])
      out[s].push_back({e.send, e.symbol, chanpos[e.channel], e.target});
  return out;
}

/// Close a member set under follower moves: any edge whose symbol equals the
/// head of its channel's residual consumes that head (signs are irrelevant —
/// only the projections matter for affinity).
inline void close_members(
    std::set<Member>& ms,
    const std::vector<std::vector<std::tuple<bool, int, int, int>>>& fedges) {
  std::vector<Member> work(ms.begin(), ms.end());
  while (!work.empty()) {
    Member m = work.back();
    work.pop_back();
    for (const auto& [send, sym, cp, target] : fedges[m.state]) {
      const std::string& r = m.lag[cp];
      if (r.empty() || r[0] != static_cast<char>(sym)) continue;
      Member nx{target, m.lag};
      nx.lag[cp].erase(0, 1);
      if (ms.insert(nx).second) work.push_back(nx);
    }
  }
}

/// Does some follower home-to-home path have the given per-channel
/// projections? Exact check used to vet Unmatched outcomes of the lag-capped
/// engine (a drop may cause a spurious mismatch, never a spurious match).
inline bool matches_exact(
    const std::vector<std::vector<std::tuple<bool, int, int, int>>>& fedges, int home,
    const std::array<std::string, 2>& want) {
  std::set<std::tuple<int, std::size_t, std::size_t>> seen;
  std::vector<std::tuple<int, std::size_t, std::size_t>> work{{home, 0, 0}};
  seen.insert(work[0]);
  while (!work.empty()) {
    auto [s, i, j] = work.back();
    work.pop_back();
    if (s == home && i == want[0].size() && j == want[1].size()) return true;
    for (const auto& [send, sym, cp, target] : fedges[s]) {
      std::size_t k = cp == 0 ? i : j;
      const std::string& w = want[cp];
      if (k >= w.size() || w[k] != static_cast<char>(sym)) continue;
      std::tuple<int, std::size_t, std::size_t> nx{target, cp == 0 ? i + 1 : i,
                                                   cp == 1 ? j + 1 : j};
      if (seen.insert(nx).second) work.push_back(nx);
    }
  }
  return false;
}

/// One inclusion direction: every home-to-home word of the leader has a
/// follower word with equal per-channel projections, tracking followers
/// lazily (they only ever lag, since a fixed matching word can always be
/// scheduled after the leader's corresponding letters). Residuals longer
/// than `lag_bound` are dropped; a resulting mismatch is re-checked exactly.
inline InclusionResult projection_inclusion(
    const model::Index& idx, const model::Protocol& p, int leader, std::size_t lag_bound,
    std::size_t max_nodes) {
  // Channel positions: 0 = sent by machine `leader`, 1 = the reverse channel.
  std::array<int, 2> chanpos{};
  std::array<int, 2> chan_of_pos{};
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    chanpos[c] = p.channels[c].from == p.machines[leader].node ? 0 : 1;
    chan_of_pos[chanpos[c]] = static_cast<int>(c);
  }
  const int lnode = idx.node.at(p.machines[leader].node);
  const int fnode = idx.node.at(p.machines[1 - leader].node);
  auto ledges = pair_edges(idx, lnode, chanpos);
  auto fedges = pair_edges(idx, fnode, chanpos);
  const int lhome = idx.start[lnode];
  const int fhome = idx.start[fnode];

  struct Node {
    int lstate;
    std::set<Member> members;
  };
  std::map<std::pair<int, std::set<Member>>, int> ids;
  std::vector<Node> nodes;
  std::vector<std::pair<int, std::tuple<bool, int, int, int>>> parent;  // (node, leader edge)
  std::set<Member> init{{fhome, {"", ""}}};
  close_members(init, fedges);
  ids.emplace(std::make_pair(lhome, init), 0);
  nodes.push_back({lhome, std::move(init)});
  parent.push_back({-1, {}});

  auto leader_word = [&](int v) {
    std::vector<std::string> toks;
    for (int u = v; parent[u].first >= 0; u = parent[u].first) {
      auto [send, sym, cp, target] = parent[u].second;
      toks.push_back((send ? "-" : "+") + p.channels[chan_of_pos[cp]].alphabet[sym]);
    }
    std::reverse(toks.begin(), toks.end());
    std::string w;
    for (const auto& t : toks) w += (w.empty() ? "" : " ") + t;
    return w;
  };

  for (std::size_t qi = 0; qi < nodes.size(); ++qi) {
    if (nodes[qi].lstate == lhome) {
      bool matched = false;
      for (const auto& m : nodes[qi].members)
        if (m.state == fhome && m.lag[0].empty() && m.lag[1].empty()) matched = true;
      if (!matched) {
        std::string w = leader_word(static_cast<int>(qi));
        // The leader's per-channel projections along the witness path.
        std::array<std::string, 2> want{};
        for (int u = static_cast<int>(qi); parent[u].first >= 0; u = parent[u].first) {
          auto [send, sym, cp, target] = parent[u].second;
          want[cp].insert(want[cp].begin(), static_cast<char>(sym));
        }
        if (matches_exact(fedges, fhome, want)) return {InclusionResult::Status::Overflow, w};
        return {InclusionResult::Status::Unmatched, w};
      }
    }
    const auto snapshot = nodes[qi];  // nodes vector reallocates below
    for (const auto& [send, sym, cp, target] : ledges[snapshot.lstate]) {
      std::set<Member> ms;
      for (const auto& m : snapshot.members) {
        Member nx{m.state, m.lag};
        nx.lag[cp].push_back(static_cast<char>(sym));
        if (nx.lag[cp].size() > lag_bound) continue;  // vetted by matches_exact on mismatch
        ms.insert(std::move(nx));
      }
      close_members(ms, fedges);
      auto key = std::make_pair(target, ms);
      auto it = ids.find(key);
      if (it == ids.end()) {
        if (nodes.size() >= max_nodes) return {InclusionResult::Status::Budget, ""};
        it = ids.emplace(key, static_cast<int>(nodes.size())).first;
        nodes.push_back({target, std::move(ms)});
        parent.push_back({static_cast<int>(qi), {send, sym, cp, target}});
      }
    }
  }
  return {InclusionResult::Status::Included, ""};
}

}  // namespace detail

/// Decide affinity, deadlock-freedom, and boundedness for an SR pair.
/// Send cycles put the pair outside the decidable regime (everything
/// Unknown). With no send cycles: a receive cycle refutes affinity outright;
/// exploration capped at the per-direction growth bounds either hits a
/// threshold (refuting affinity) or exhausts the finite space, where
/// deadlock-freedom and boundedness are exact and affinity is decided by the
/// lag-bounded projection-matching engine (both directions, with exact
/// re-verification and two bound doublings before giving up).
inline AffineDecision decide_affine_deadlock(const model::Protocol& p,
                                             std::size_t max_states = 200000) {
  detail::require_sr_pair(p);
  model::Index idx = model::build_index(p);
  AffineDecision d;

  auto join = [&](const std::string& s) {
    if (!d.rationale.empty()) d.rationale += "; ";
    d.rationale += s;
  };

  for (int j = 0; j < 2; ++j) {
    auto sc = send_cycles(p.machines[j]);
    if (!sc.empty()) {
      std::string states;
      for (const auto& s : sc[0]) states += (states.empty() ? "" : ",") + s;
      join("machine " + p.machines[j].node + " has a send cycle (" + states +
           "): outside the finite-balance regime; were the pair affine, it could not be "
           "both deadlock-free and bounded");
      return d;
    }
  }

  for (int j = 0; j < 2; ++j) {
    if (d.affine == Verdict::No) break;
    if (!receive_cycles(p.machines[j]).empty()) {
      d.affine = Verdict::No;
      join("machine " + p.machines[j].node +
           " has a receive cycle but neither machine has a send cycle, which no affine "
           "pair allows");
    }
  }

  const std::size_t k0 = idx.states[idx.node.at(p.machines[0].node)].size();
  const std::size_t k1 = idx.states[idx.node.at(p.machines[1].node)].size();
  std::array<std::size_t, 2> threshold{};  // per channel, by list position
  for (std::size_t c = 0; c < 2; ++c)
    threshold[c] =
        p.channels[c].from == p.machines[0].node ? k0 * (k1 - 1) + 1 : k1 * (k0 - 1) + 1;

  explore::Budget b;
  b.max_channel_len = std::max(threshold[0], threshold[1]);
  b.max_states = max_states;
  explore::StateGraph sg = explore::reach(p, b);

  std::optional<std::size_t> hit;  // channel position that reached its threshold
  for (const auto& g : sg.states)
    for (std::size_t c = 0; c < 2 && !hit; ++c)
      if (g.chans[c].size() >= threshold[c]) hit = c;

  auto deadlocks = explore::deadlocks(sg);
  if (!deadlocks.states.empty()) {
    d.deadlock_free = Verdict::No;
    std::string comp;
    for (const auto& s : explore::composite_names(sg, deadlocks.states[0]))
      comp += (comp.empty() ? "" : ",") + s;
    join("a reachable global state has both machines in receive states with empty "
         "channels (" + comp + ")");
  } else if (sg.exhausted) {
    d.deadlock_free = Verdict::Yes;
    join("the complete reachable space has no deadlock");
  } else {
    join("deadlock search cut off by the exploration budget");
  }

  if (hit) {
    if (d.affine != Verdict::No) {
      d.affine = Verdict::No;
      join("channel " + p.channels[*hit].id + " reaches " +
           std::to_string(threshold[*hit]) +
           " queued symbols with no send cycle present, beyond the growth bound of any "
           "affine pair");
    }
    if (sg.exhausted) {
      d.bounded = Verdict::Yes;
      d.bound = explore::bounded_channels(sg).bound;
      join("the reachable space is finite with total channel load at most " +
           std::to_string(*d.bound));
    } else {
      join("boundedness undecided: exploration cut off at the growth-bound cap");
    }
    return d;
  }

  if (!sg.exhausted) {
    join("exploration cut off by the state budget before the growth bounds were "
         "separated");
    return d;
  }

  // Below every growth bound and exhausted: the space is complete.
  d.bounded = Verdict::Yes;
  d.bound = explore::bounded_channels(sg).bound;
  join("every channel stays below its growth bound, so the space is finite (total load "
       "at most " + std::to_string(*d.bound) + ")");

  if (d.affine == Verdict::No) return d;

  const std::size_t base = std::max(threshold[0], threshold[1]);
  for (int leader = 0; leader < 2; ++leader) {
    bool settled = false;
    for (std::size_t bound = base; bound <= 4 * base && !settled; bound *= 2) {
      auto r = detail::projection_inclusion(idx, p, leader, bound, max_states);
      switch (r.status) {
        case detail::InclusionResult::Status::Included:
          settled = true;
          break;
        case detail::InclusionResult::Status::Unmatched:
          d.affine = Verdict::No;
          d.witness = r.leader_word;
          join("machine " + p.machines[leader].node + " runs \"" + r.leader_word +
               "\" home to home with no counterpart in the other machine");
          return d;
        case detail::InclusionResult::Status::Overflow:
          break;  // lag bound too small for this witness: retry doubled
        case detail::InclusionResult::Status::Budget:
          join("projection matching cut off by the state budget");
          return d;
      }
    }
    if (!settled) {
      join("projection matching exceeded the lag bound twice; affinity undecided");
      return d;
    }
  }
  d.affine = Verdict::Yes;
  join("each machine's home-to-home projections are matched by the other within a "
       "bounded lag");
  return d;
}

}  // namespace cfsm::sr

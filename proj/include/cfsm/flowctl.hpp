// Abstract flow control: priority-scheduled exploration and filters that
// preserve reachability of empty-channel global states while shrinking the
// explored space.
#pragma once

#include <cfsm/explore.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cfsm::flowctl {

/// Channels crossing into (negative) and out of (positive) a node set.
struct Boundary {
  std::set<std::string> negative;  // receiver inside, sender outside
  std::set<std::string> positive;  // sender inside, receiver outside
};

namespace detail {

inline void require_nodes(const model::Protocol& p, const std::set<std::string>& a) {
  for (const auto& n : a)
    if (std::find(p.nodes.begin(), p.nodes.end(), n) == p.nodes.end())
      throw std::invalid_argument("unknown node '" + n + "' in node set");
}

}  // namespace detail

inline Boundary boundary(const model::Protocol& p, const std::set<std::string>& a) {
  detail::require_nodes(p, a);
  Boundary b;
  for (const auto& ch : p.channels) {
    bool tailIn = a.count(ch.from) > 0, headIn = a.count(ch.to) > 0;
    if (headIn && !tailIn) b.negative.insert(ch.id);
    if (tailIn && !headIn) b.positive.insert(ch.id);
  }
  return b;
}

struct SmoothResult {
  bool smooth = true;
  // Offending pair of indices into the checked family when not smooth.
  std::optional<std::pair<std::size_t, std::size_t>> counterexample;
};

/// A family is smooth iff every pair is nested, or disjoint with an additive
/// negative boundary: ∂⁻(A∪B) = ∂⁻(A) ∪ ∂⁻(B) (no channels between A and B).
inline SmoothResult check_smooth(const model::Protocol& p,
                                 const std::vector<std::set<std::string>>& psi) {
  for (const auto& a : psi) detail::require_nodes(p, a);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (std::size_t j = i + 1; j < psi.size(); ++j) {
      const auto& a = psi[i];
      const auto& b = psi[j];
      if (std::includes(a.begin(), a.end(), b.begin(), b.end()) ||
          std::includes(b.begin(), b.end(), a.begin(), a.end()))
        continue;
      std::set<std::string> both;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::inserter(both, both.end()));
      if (!both.empty()) return {false, {{i, j}}};
      std::set<std::string> uni = a;
      uni.insert(b.begin(), b.end());
      std::set<std::string> parts = boundary(p, a).negative;
      auto bn = boundary(p, b).negative;
      parts.insert(bn.begin(), bn.end());
      if (boundary(p, uni).negative != parts) return {false, {{i, j}}};
    }
  }
  return {};
}

/// State predicate Σ_{ξ≠β} |x_ξ| ≤ 1, for use as the filter of reach:
/// on cyclic protocols this preserves exactly the reachable (S, C⁰).
inline explore::Filter cyclic_filter(const model::Protocol& p, const std::string& beta) {
  if (!model::classify(p).is_cyclic)
    throw std::invalid_argument("cyclic_filter requires a cyclic protocol");
  int bi = -1;
  for (std::size_t c = 0; c < p.channels.size(); ++c)
    if (p.channels[c].id == beta) bi = static_cast<int>(c);
  if (bi < 0) throw std::invalid_argument("unknown channel '" + beta + "'");
  return [bi](const explore::GlobalState& g) {
    std::size_t sum = 0;
    for (std::size_t c = 0; c < g.chans.size(); ++c)
      if (static_cast<int>(c) != bi) sum += g.chans[c].size();
    return sum <= 1;
  };
}

/// Priority blocks of a smooth family: order the sets so subsets come first,
/// then peel B₀ = A₀, B_k = A_k minus everything earlier. Highest first.
/// Deterministic: sets ordered by size, then lexicographically.
inline std::vector<std::set<std::string>> smooth_schedule(
    const model::Protocol& p, const std::vector<std::set<std::string>>& psi) {
  SmoothResult sr = check_smooth(p, psi);
  if (!sr.smooth) throw std::invalid_argument("node sets are not smooth");
  std::vector<std::set<std::string>> ordered = psi;
  std::sort(ordered.begin(), ordered.end(),
            [](const std::set<std::string>& a, const std::set<std::string>& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  std::vector<std::set<std::string>> blocks;
  std::set<std::string> seen;
  for (const auto& a : ordered) {
    std::set<std::string> block;
    std::set_difference(a.begin(), a.end(), seen.begin(), seen.end(),
                        std::inserter(block, block.end()));
    if (!block.empty()) blocks.push_back(block);
    seen.insert(a.begin(), a.end());
  }
  return blocks;
}

struct PriorityScheme {
  enum class Kind { Cyclic, Smooth, BlockingChain };
  Kind kind;
  std::string channel;                     // Cyclic: the designated channel β
  std::vector<std::set<std::string>> psi;  // Smooth: the smooth family
  std::vector<std::string> order;          // BlockingChain: highest first
};

inline PriorityScheme cyclic_scheme(std::string beta) {
  return {PriorityScheme::Kind::Cyclic, std::move(beta), {}, {}};
}
inline PriorityScheme smooth_scheme(std::vector<std::set<std::string>> psi) {
  return {PriorityScheme::Kind::Smooth, "", std::move(psi), {}};
}
inline PriorityScheme chain_scheme(std::vector<std::string> order) {
  return {PriorityScheme::Kind::BlockingChain, "", {}, std::move(order)};
}

namespace detail {

/// Per-node priority block (0 = highest) for the two standard schemes.
/// Cyclic: singleton blocks walking the ring backwards from tail(β), so
/// tail(β) is highest and head(β) lowest. Smooth: the scheduled blocks, with
/// every node outside the family sharing one trailing (lowest) block.
inline std::vector<int> priority_blocks(const model::Protocol& p, const model::Index& idx,
                                        const PriorityScheme& s) {
  std::vector<int> block(p.nodes.size(), -1);
  if (s.kind == PriorityScheme::Kind::Cyclic) {
    if (!model::classify(p).is_cyclic)
      throw std::invalid_argument("cyclic scheme requires a cyclic protocol");
    const model::Channel* beta = nullptr;
    for (const auto& ch : p.channels)
      if (ch.id == s.channel) beta = &ch;
    if (!beta) throw std::invalid_argument("unknown channel '" + s.channel + "'");
    std::map<std::string, std::string> prev;
    for (const auto& ch : p.channels) prev[ch.to] = ch.from;
    std::string cur = beta->from;
    int k = 0;
    do {
      block[idx.node.at(cur)] = k++;
      cur = prev.at(cur);
    } while (cur != beta->from);
    return block;
  }
  std::vector<std::set<std::string>> blocks = smooth_schedule(p, s.psi);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (const auto& n : blocks[k]) block[idx.node.at(n)] = static_cast<int>(k);
  for (auto& b : block)
    if (b < 0) b = static_cast<int>(blocks.size());
  return block;
}

inline std::vector<std::pair<explore::Label, explore::GlobalState>> enabled_moves(
    const model::Index& idx, const explore::GlobalState& g, int n) {
  std::vector<std::pair<explore::Label, explore::GlobalState>> out;
  for (const model::Index::Edge& e : idx.out[n][g.comp[n]])
    if (auto nx = explore::detail::apply(g, n, e))
      out.emplace_back(explore::Label{n, e.send, e.symbol, e.channel}, std::move(*nx));
  return out;
}

/// Blocking-chain resolution: start from the top-priority node; while the
/// current node is blocked, follow it to the sender of the first channel
/// (declaration order) it is waiting to receive on. A node with no pending
/// receive edges, or a cycle of mutually waiting nodes, yields no move.
inline std::vector<std::pair<explore::Label, explore::GlobalState>> chain_moves(
    const model::Protocol& p, const model::Index& idx, const explore::GlobalState& g,
    int top) {
  std::set<int> visited;
  int cur = top;
  while (visited.insert(cur).second) {
    auto moves = enabled_moves(idx, g, cur);
    if (!moves.empty()) return moves;
    std::set<int> waiting;  // channels with a receive edge at the current state
    for (const model::Index::Edge& e : idx.out[cur][g.comp[cur]])
      if (!e.send) waiting.insert(e.channel);
    int next = -1;
    for (std::size_t c = 0; c < p.channels.size() && next < 0; ++c)
      if (waiting.count(static_cast<int>(c))) next = idx.node.at(p.channels[c].from);
    if (next < 0) return {};  // nothing to wait on: globally stuck here
    cur = next;
  }
  return {};  // mutually blocked cycle
}

}  // namespace detail

/// Unfolding of the admitted paths. The state graph returned by
/// scheduled_reach merges scheduling contexts per global state; path-level
/// properties (which runs can still drain their channels) live here. Node 0
/// is the initial context; `out` pairs a state-graph edge id with the target
/// context.
struct ScheduleTrace {
  struct Node {
    int state;       // index into StateGraph::states
    int last_block;  // priority block of the step that produced this context
    int filled;      // channel the step filled from empty, or -1
  };
  std::vector<Node> nodes;
  std::vector<std::vector<std::pair<int, int>>> out;  // (edge id, target node)
};

/// Priority-restricted exploration. Under the standard schemes the admitted
/// paths are exactly those along which a step of a strictly higher-priority
/// block never immediately follows a step of a lower block, except for the
/// reception consuming a symbol the previous step sent onto an empty channel
/// (the data dependence that forbids reordering the pair). Every run ending
/// with empty channels reorders into such a path, so the scheduled graph
/// reaches every empty-channel configuration of the unrestricted exploration,
/// budget permitting. Under a blocking chain, from each state only the node
/// the top-priority node transitively waits on runs. All enabled moves of an
/// admitted node are branched. Budgets behave as in reach.
inline explore::StateGraph scheduled_reach(const model::Protocol& p, const PriorityScheme& s,
                                           const explore::Budget& b = {},
                                           ScheduleTrace* trace = nullptr) {
  explore::StateGraph sg;
  sg.proto = p;
  sg.idx = model::build_index(p);
  explore::GlobalState init = explore::initial_state(sg.idx, p);
  std::unordered_map<explore::GlobalState, int, explore::detail::GsHash> seen;
  sg.states.push_back(init);
  sg.out.emplace_back();
  sg.budget_pruned.push_back(false);
  seen.emplace(std::move(init), 0);

  // Appends one admitted move; returns {target state id, edge id}, or
  // {-1, -1} when the budget prunes the move.
  auto emit = [&](int from, const explore::Label& label,
                  explore::GlobalState&& nx) -> std::pair<int, int> {
    const explore::GlobalState& g = sg.states[from];
    if (label.send && (g.chans[label.channel].size() + 1 > b.max_channel_len ||
                       g.total_len() + 1 > b.max_total_len)) {
      sg.exhausted = false;
      sg.budget_pruned[from] = true;
      return {-1, -1};
    }
    int to;
    auto it = seen.find(nx);
    if (it != seen.end()) {
      to = it->second;
    } else {
      if (sg.states.size() >= b.max_states) {
        sg.exhausted = false;
        sg.budget_pruned[from] = true;
        return {-1, -1};
      }
      to = static_cast<int>(sg.states.size());
      sg.states.push_back(nx);
      sg.out.emplace_back();
      sg.budget_pruned.push_back(false);
      seen.emplace(std::move(nx), to);
    }
    explore::StateGraph::Edge e{from, label, to};
    for (int ei : sg.out[from])
      if (sg.edges[ei] == e) return {to, ei};
    int id = static_cast<int>(sg.edges.size());
    sg.out[from].push_back(id);
    sg.edges.push_back(e);
    return {to, id};
  };

  if (s.kind == PriorityScheme::Kind::BlockingChain) {
    std::set<std::string> all(p.nodes.begin(), p.nodes.end()), given(s.order.begin(), s.order.end());
    if (s.order.size() != p.nodes.size() || given != all)
      throw std::invalid_argument("blocking chain must order every node exactly once");
    const int top = sg.idx.node.at(s.order[0]);
    for (std::size_t qi = 0; qi < sg.states.size(); ++qi) {
      const explore::GlobalState g = sg.states[qi];  // copy: states vector reallocates
      for (auto& [label, nx] : detail::chain_moves(p, sg.idx, g, top))
        emit(static_cast<int>(qi), label, std::move(nx));
    }
    if (trace) {
      // One scheduling context per state: the chain looks only at the state.
      trace->nodes.clear();
      trace->out.assign(sg.states.size(), {});
      for (std::size_t i = 0; i < sg.states.size(); ++i)
        trace->nodes.push_back({static_cast<int>(i), 0, -1});
      for (std::size_t ei = 0; ei < sg.edges.size(); ++ei)
        trace->out[sg.edges[ei].from].push_back({static_cast<int>(ei), sg.edges[ei].to});
    }
    return sg;
  }

  // Standard schemes: breadth-first search over (state, last block, channel
  // the last step filled). A move of block j is admitted after a step of
  // block j1 > j only when it receives on the just-filled channel.
  const std::vector<int> blocks = detail::priority_blocks(p, sg.idx, s);
  std::map<std::tuple<int, int, int>, int> ctx_ids;
  std::vector<ScheduleTrace::Node> queue{{0, 0, -1}};
  std::vector<std::vector<std::pair<int, int>>> ctx_out(1);
  ctx_ids.emplace(std::make_tuple(0, 0, -1), 0);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const ScheduleTrace::Node c = queue[qi];
    const explore::GlobalState g = sg.states[c.state];  // copy: states vector reallocates
    for (int n = 0; n < static_cast<int>(p.nodes.size()); ++n) {
      if (c.last_block > blocks[n]) {
        // Only the reception consuming the just-filled channel may jump the
        // priority order; skip nodes that cannot be its receiver.
        if (c.filled < 0 || sg.idx.node.at(p.channels[c.filled].to) != n) continue;
      }
      for (auto& [label, nx] : detail::enabled_moves(sg.idx, g, n)) {
        if (c.last_block > blocks[n] && !(!label.send && label.channel == c.filled)) continue;
        int filled = (label.send && g.chans[label.channel].empty()) ? label.channel : -1;
        auto [to, edge] = emit(c.state, label, std::move(nx));
        if (to < 0) continue;
        auto [it, fresh] = ctx_ids.emplace(std::make_tuple(to, blocks[n], filled),
                                           static_cast<int>(queue.size()));
        if (fresh) {
          queue.push_back({to, blocks[n], filled});
          ctx_out.emplace_back();
        }
        ctx_out[qi].push_back({edge, it->second});
      }
    }
  }
  if (trace) {
    trace->nodes = std::move(queue);
    trace->out = std::move(ctx_out);
  }
  return sg;
}

}  // namespace cfsm::flowctl

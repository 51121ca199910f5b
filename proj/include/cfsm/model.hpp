// Protocol data model: a directed network of nodes joined by directed
// channels with pairwise-disjoint alphabets, one finite state machine per
// node whose transitions send to the tail of a channel or receive from its
// head. Includes the text format, structural validation, and classification.

#pragma once

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsm/lang.hpp"

namespace cfsm::model {

/// A directed channel: messages enter at `from` (tail) and are consumed at
/// `to` (head), FIFO, unbounded.
struct Channel {
  std::string id;
  std::string from;
  std::string to;
  lang::Alphabet alphabet;
};

/// One machine transition: from `state`, send (`send`=true) or receive
/// `symbol` on `channel`, moving to `target`.
struct Transition {
  std::string state;
  bool send = false;
  lang::Symbol symbol;
  std::string channel;
  std::string target;
};

/// The finite state machine of one node. States are scoped to the node.
struct Machine {
  std::string node;
  std::string start;
  std::vector<Transition> transitions;
};

/// A full protocol: nodes, channels, alphabets, and one machine per node.
struct Protocol {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<Channel> channels;
  std::vector<Machine> machines;
};

/// Validation/classification message.
struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string message;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Diagnostic::Severity::Error) return true;
  return false;
}

/// Error with the 1-based line number of the offending protocol-file line.
struct FileError : std::runtime_error {
  std::size_t line;
  FileError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Parse the protocol text format:
///   protocol <name>
///   node <id>
///   channel <id> from <node> to <node>
///   alphabet <channel> <symbol>...
///   machine <node> start <state>
///   trans <node> <state> (+|-)<symbol>@<channel> <state>
/// `#` starts a comment; blank lines are ignored.
inline Protocol parse_protocol(const std::string& text) {
  Protocol p;
  bool sawName = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  auto machine_for = [&](const std::string& node) -> Machine* {
    for (auto& m : p.machines)
      if (m.node == node) return &m;
    return nullptr;
  };
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "protocol") {
      if (tok.size() != 2) throw FileError("expected: protocol <name>", lineNo);
      if (sawName) throw FileError("duplicate protocol line", lineNo);
      p.name = tok[1];
      sawName = true;
    } else if (kw == "node") {
      if (tok.size() != 2) throw FileError("expected: node <id>", lineNo);
      p.nodes.push_back(tok[1]);
    } else if (kw == "channel") {
      if (tok.size() != 6 || tok[2] != "from" || tok[4] != "to")
        throw FileError("expected: channel <id> from <node> to <node>", lineNo);
      p.channels.push_back(Channel{tok[1], tok[3], tok[5], {}});
    } else if (kw == "alphabet") {
      if (tok.size() < 3) throw FileError("expected: alphabet <channel> <symbol>...", lineNo);
      Channel* ch = nullptr;
      for (auto& c : p.channels)
        if (c.id == tok[1]) ch = &c;
      if (!ch) throw FileError("alphabet for unknown channel '" + tok[1] + "'", lineNo);
      for (std::size_t i = 2; i < tok.size(); ++i) ch->alphabet.push_back(tok[i]);
    } else if (kw == "machine") {
      if (tok.size() != 4 || tok[2] != "start")
        throw FileError("expected: machine <node> start <state>", lineNo);
      if (machine_for(tok[1])) throw FileError("duplicate machine for node '" + tok[1] + "'", lineNo);
      p.machines.push_back(Machine{tok[1], tok[3], {}});
    } else if (kw == "trans") {
      if (tok.size() != 5)
        throw FileError("expected: trans <node> <state> (+|-)<symbol>@<channel> <state>", lineNo);
      Machine* m = machine_for(tok[1]);
      if (!m) throw FileError("trans before machine line for node '" + tok[1] + "'", lineNo);
      const std::string& act = tok[3];
      auto at = act.find('@');
      if (act.size() < 4 || (act[0] != '+' && act[0] != '-') || at == std::string::npos || at < 2 ||
          at + 1 >= act.size())
        throw FileError("action must be (+|-)<symbol>@<channel>", lineNo);
      Transition t;
      t.state = tok[2];
      t.send = (act[0] == '-');
      t.symbol = act.substr(1, at - 1);
      t.channel = act.substr(at + 1);
      t.target = tok[4];
      m->transitions.push_back(std::move(t));
    } else {
      throw FileError("unknown keyword '" + kw + "'", lineNo);
    }
  }
  if (!sawName) throw FileError("missing protocol line", 1);
  return p;
}

/// Serialize back to the text format; parse_protocol round-trips it.
inline std::string print_protocol(const Protocol& p) {
  std::ostringstream out;
  out << "protocol " << p.name << "\n";
  for (const auto& n : p.nodes) out << "node " << n << "\n";
  for (const auto& c : p.channels) out << "channel " << c.id << " from " << c.from << " to " << c.to << "\n";
  for (const auto& c : p.channels) {
    if (c.alphabet.empty()) continue;
    out << "alphabet " << c.id;
    for (const auto& s : c.alphabet) out << ' ' << s;
    out << "\n";
  }
  for (const auto& m : p.machines) {
    out << "machine " << m.node << " start " << m.start << "\n";
    for (const auto& t : m.transitions)
      out << "trans " << m.node << ' ' << t.state << ' ' << (t.send ? '-' : '+') << t.symbol << '@'
          << t.channel << ' ' << t.target << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Indexing
// ---------------------------------------------------------------------------

/// Integer-indexed view of a structurally valid protocol. State indices are
/// per node, in order of first appearance (start state first, then as named
/// by transitions).
struct Index {
  std::map<std::string, int> node;
  std::map<std::string, int> channel;
  std::vector<int> machine_of_node;                    // node -> machine position
  std::vector<std::vector<std::string>> states;        // node -> state names
  std::vector<std::map<std::string, int>> state_index; // node -> name -> index
  std::vector<int> start;                              // node -> start state index

  struct Edge {
    int state;
    bool send;
    int symbol;   // index into the channel's alphabet
    int channel;  // channel index
    int target;
  };
  std::vector<std::vector<std::vector<Edge>>> out;  // node -> state -> edges (declaration order)
};

/// Build the indexed view. Precondition: validate() reported no errors.
inline Index build_index(const Protocol& p) {
  Index ix;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) ix.node[p.nodes[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < p.channels.size(); ++i) ix.channel[p.channels[i].id] = static_cast<int>(i);
  ix.machine_of_node.assign(p.nodes.size(), -1);
  for (std::size_t i = 0; i < p.machines.size(); ++i)
    ix.machine_of_node[ix.node.at(p.machines[i].node)] = static_cast<int>(i);
  ix.states.resize(p.nodes.size());
  ix.state_index.resize(p.nodes.size());
  ix.start.assign(p.nodes.size(), 0);
  ix.out.resize(p.nodes.size());
  for (std::size_t n = 0; n < p.nodes.size(); ++n) {
    const Machine& m = p.machines[ix.machine_of_node[n]];
    auto intern = [&](const std::string& name) {
      auto it = ix.state_index[n].find(name);
      if (it != ix.state_index[n].end()) return it->second;
      int id = static_cast<int>(ix.states[n].size());
      ix.state_index[n].emplace(name, id);
      ix.states[n].push_back(name);
      ix.out[n].emplace_back();
      return id;
    };
    ix.start[n] = intern(m.start);
    for (const Transition& t : m.transitions) {
      intern(t.state);
      intern(t.target);
    }
    for (const Transition& t : m.transitions) {
      int ch = ix.channel.at(t.channel);
      Index::Edge e;
      e.state = ix.state_index[n].at(t.state);
      e.send = t.send;
      e.symbol = lang::alphabet_index(p.channels[ch].alphabet, t.symbol);
      e.channel = ch;
      e.target = ix.state_index[n].at(t.target);
      ix.out[n][e.state].push_back(e);
    }
  }
  return ix;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Structural checks. Errors make the protocol unusable; warnings do not.
/// Rules: unique ids; channel endpoints and transition references must
/// resolve; channels may not loop a node to itself (parallel channels are
/// allowed); channel alphabets are pairwise disjoint and duplicate-free;
/// every node has exactly one machine; sends must use a channel leaving the
/// node and receives a channel entering it; transition symbols must belong to
/// the channel's alphabet. Unreachable machine states are warnings.
inline std::vector<Diagnostic> validate(const Protocol& p) {
  std::vector<Diagnostic> ds;
  auto error = [&](std::string m) { ds.push_back({Diagnostic::Severity::Error, std::move(m)}); };
  auto warning = [&](std::string m) { ds.push_back({Diagnostic::Severity::Warning, std::move(m)}); };

  std::set<std::string> nodeIds;
  for (const auto& n : p.nodes)
    if (!nodeIds.insert(n).second) error("duplicate node id '" + n + "'");
  std::set<std::string> chanIds;
  for (const auto& c : p.channels) {
    if (!chanIds.insert(c.id).second) error("duplicate channel id '" + c.id + "'");
    if (!nodeIds.count(c.from)) error("channel '" + c.id + "' tail references unknown node '" + c.from + "'");
    if (!nodeIds.count(c.to)) error("channel '" + c.id + "' head references unknown node '" + c.to + "'");
    if (c.from == c.to && nodeIds.count(c.from))
      error("channel '" + c.id + "' connects node '" + c.from + "' to itself");
    if (c.alphabet.empty()) warning("channel '" + c.id + "' has an empty alphabet");
  }
  // Alphabet disjointness and per-channel uniqueness.
  std::map<std::string, std::string> symbolOwner;
  for (const auto& c : p.channels) {
    std::set<std::string> local;
    for (const auto& s : c.alphabet) {
      if (!local.insert(s).second) error("channel '" + c.id + "' repeats symbol '" + s + "'");
      auto [it, fresh] = symbolOwner.emplace(s, c.id);
      if (!fresh && it->second != c.id)
        error("symbol '" + s + "' appears on channels '" + it->second + "' and '" + c.id +
              "' (alphabets must be disjoint)");
    }
  }
  // Machines: exactly one per node.
  std::set<std::string> machineNodes;
  for (const auto& m : p.machines) {
    if (!nodeIds.count(m.node)) error("machine references unknown node '" + m.node + "'");
    if (!machineNodes.insert(m.node).second) error("duplicate machine for node '" + m.node + "'");
  }
  for (const auto& n : p.nodes)
    if (!machineNodes.count(n)) error("node '" + n + "' has no machine");
  if (has_errors(ds)) return ds;  // transition checks need resolvable structure

  std::map<std::string, const Channel*> chan;
  for (const auto& c : p.channels) chan[c.id] = &c;
  for (const auto& m : p.machines) {
    for (const Transition& t : m.transitions) {
      auto it = chan.find(t.channel);
      if (it == chan.end()) {
        error("node '" + m.node + "': transition uses unknown channel '" + t.channel + "'");
        continue;
      }
      const Channel& c = *it->second;
      if (lang::alphabet_index(c.alphabet, t.symbol) < 0)
        error("node '" + m.node + "': symbol '" + t.symbol + "' not in alphabet of channel '" + c.id + "'");
      if (t.send && c.from != m.node)
        error("node '" + m.node + "': send on channel '" + c.id + "' which does not leave the node");
      if (!t.send && c.to != m.node)
        error("node '" + m.node + "': receive on channel '" + c.id + "' which does not enter the node");
    }
  }
  if (has_errors(ds)) return ds;

  // Reachability warnings on each machine's local graph.
  Index ix = build_index(p);
  for (std::size_t n = 0; n < p.nodes.size(); ++n) {
    std::vector<char> seen(ix.states[n].size(), 0);
    std::vector<int> stack{ix.start[n]};
    seen[ix.start[n]] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (const auto& e : ix.out[n][s])
        if (!seen[e.target]) {
          seen[e.target] = 1;
          stack.push_back(e.target);
        }
    }
    for (std::size_t s = 0; s < seen.size(); ++s)
      if (!seen[s])
        warning("node '" + p.nodes[n] + "': state '" + ix.states[n][s] + "' is unreachable from the start state");
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Shape summary of the channel network.
struct Classification {
  bool is_cyclic = false;   // nodes form one directed ring (one channel in, one out, single cycle)
  bool is_sr_pair = false;  // two nodes, one channel each way, both machines pass all SR checks
  std::map<std::string, int> node_in_degrees;
};

/// Per-machine results of the three SR-machine conditions.
struct SrReport {
  std::string node;
  std::vector<std::string> mixed_states;  // states with both send and receive edges
  std::vector<std::string> nondet_labels; // "state (+|-)sym@chan" with multiple targets
  bool strongly_connected = false;
};

/// Evaluate the SR conditions for every machine (order follows p.machines).
/// Precondition: validate() reported no errors.
inline std::vector<SrReport> sr_checks(const Protocol& p) {
  Index ix = build_index(p);
  std::vector<SrReport> reports;
  for (const auto& m : p.machines) {
    int n = ix.node.at(m.node);
    SrReport r;
    r.node = m.node;
    std::size_t k = ix.states[n].size();
    for (std::size_t s = 0; s < k; ++s) {
      bool hasSend = false, hasRecv = false;
      std::map<std::string, std::set<int>> byLabel;
      for (const auto& e : ix.out[n][s]) {
        (e.send ? hasSend : hasRecv) = true;
        std::string label = std::string(e.send ? "-" : "+") + p.channels[e.channel].alphabet[e.symbol] +
                            "@" + p.channels[e.channel].id;
        byLabel[label].insert(e.target);
      }
      if (hasSend && hasRecv) r.mixed_states.push_back(ix.states[n][s]);
      for (const auto& [label, targets] : byLabel)
        if (targets.size() > 1) r.nondet_labels.push_back(ix.states[n][s] + " " + label);
    }
    // Strong connectivity over all states (two sweeps: forward and reverse).
    auto sweep = [&](bool reverse) {
      std::vector<std::vector<int>> adj(k);
      for (std::size_t s = 0; s < k; ++s)
        for (const auto& e : ix.out[n][s])
          reverse ? adj[e.target].push_back(static_cast<int>(s))
                  : adj[s].push_back(e.target);
      std::vector<char> seen(k, 0);
      std::vector<int> stack{0};
      if (k) seen[0] = 1;
      while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : adj[s])
          if (!seen[t]) {
            seen[t] = 1;
            stack.push_back(t);
          }
      }
      for (char c : seen)
        if (!c) return false;
      return true;
    };
    r.strongly_connected = k == 0 || (sweep(false) && sweep(true));
    reports.push_back(std::move(r));
  }
  return reports;
}

/// Classify the network shape. Precondition: validate() reported no errors.
inline Classification classify(const Protocol& p) {
  Classification c;
  std::map<std::string, int> inDeg, outDeg;
  for (const auto& n : p.nodes) inDeg[n] = outDeg[n] = 0;
  for (const auto& ch : p.channels) {
    ++outDeg[ch.from];
    ++inDeg[ch.to];
  }
  c.node_in_degrees = inDeg;
  // Ring: every node has exactly one channel in and one out, and following
  // the out-channels from any node visits all nodes before returning.
  bool ring = !p.nodes.empty() && p.channels.size() == p.nodes.size();
  for (const auto& n : p.nodes)
    if (inDeg[n] != 1 || outDeg[n] != 1) ring = false;
  if (ring) {
    std::map<std::string, std::string> next;
    for (const auto& ch : p.channels) next[ch.from] = ch.to;
    std::string cur = p.nodes[0];
    std::set<std::string> seen;
    while (seen.insert(cur).second) cur = next[cur];
    ring = (cur == p.nodes[0] && seen.size() == p.nodes.size());
  }
  c.is_cyclic = ring;
  if (p.nodes.size() == 2 && p.channels.size() == 2) {
    bool oneEachWay = (p.channels[0].from == p.channels[1].to && p.channels[0].to == p.channels[1].from &&
                       p.channels[0].from != p.channels[0].to);
    if (oneEachWay) {
      bool allSr = true;
      for (const auto& r : sr_checks(p))
        if (!r.mixed_states.empty() || !r.nondet_labels.empty() || !r.strongly_connected) allSr = false;
      c.is_sr_pair = allSr;
    }
  }
  return c;
}

}  // namespace cfsm::model

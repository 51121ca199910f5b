// Generators and fixtures: tag systems, the derived protocol constructions,
// and the built-in example protocols with their proof tables.
#pragma once

#include <cfsm/model.hpp>

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfsm::gen {

// ---------------------------------------------------------------------------
// Tag systems (deletion number 2)
// ---------------------------------------------------------------------------

struct TagSystem {
  lang::Alphabet alphabet;                       // Σ, in declaration order
  std::map<lang::Symbol, lang::Word> productions;  // g, total on Σ
  lang::Word start;                              // w₀
};

inline std::size_t min_production_len(const TagSystem& t) {
  std::size_t m = SIZE_MAX;
  for (const auto& [sym, word] : t.productions) m = std::min(m, word.size());
  return t.productions.empty() ? 0 : m;
}

inline std::size_t max_production_len(const TagSystem& t) {
  std::size_t m = 0;
  for (const auto& [sym, word] : t.productions) m = std::max(m, word.size());
  return m;
}

/// Parse the tag-system file format:
///   tag
///   prod <sym> <sym>... | prod <sym> eps
///   start <sym>... | start eps
inline TagSystem parse_tag(const std::string& text) {
  TagSystem t;
  bool sawTag = false, sawStart = false;
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = model::detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "tag") {
      if (tok.size() != 1) throw model::FileError("expected: tag", lineNo);
      if (sawTag) throw model::FileError("duplicate tag line", lineNo);
      sawTag = true;
    } else if (tok[0] == "prod") {
      if (tok.size() < 3) throw model::FileError("expected: prod <sym> <word|eps>", lineNo);
      const std::string& sym = tok[1];
      if (sym == "eps") throw model::FileError("'eps' is reserved and cannot name a symbol", lineNo);
      if (t.productions.count(sym)) throw model::FileError("duplicate production for '" + sym + "'", lineNo);
      lang::Word w;
      if (!(tok.size() == 3 && tok[2] == "eps"))
        for (std::size_t i = 2; i < tok.size(); ++i) w.push_back(tok[i]);
      t.alphabet.push_back(sym);
      t.productions[sym] = std::move(w);
    } else if (tok[0] == "start") {
      if (sawStart) throw model::FileError("duplicate start line", lineNo);
      sawStart = true;
      if (!(tok.size() == 2 && tok[1] == "eps"))
        for (std::size_t i = 1; i < tok.size(); ++i) t.start.push_back(tok[i]);
    } else {
      throw model::FileError("unknown keyword '" + tok[0] + "'", lineNo);
    }
  }
  if (!sawTag) throw model::FileError("missing tag line", 1);
  auto known = [&](const lang::Symbol& s) { return t.productions.count(s) > 0; };
  for (const auto& [sym, word] : t.productions)
    for (const auto& s : word)
      if (!known(s)) throw model::FileError("production uses undeclared symbol '" + s + "'", 1);
  for (const auto& s : t.start)
    if (!known(s)) throw model::FileError("start word uses undeclared symbol '" + s + "'", 1);
  return t;
}

inline std::string print_tag(const TagSystem& t) {
  std::ostringstream out;
  out << "tag\n";
  for (const auto& sym : t.alphabet) {
    out << "prod " << sym;
    const lang::Word& w = t.productions.at(sym);
    if (w.empty()) {
      out << " eps";
    } else {
      for (const auto& s : w) out << " " << s;
    }
    out << "\n";
  }
  out << "start";
  if (t.start.empty()) {
    out << " eps";
  } else {
    for (const auto& s : t.start) out << " " << s;
  }
  out << "\n";
  return out.str();
}

/// One step: λ for |w| ≤ 1, else drop the first two symbols and append g(b₀).
inline lang::Word tag_step(const TagSystem& t, const lang::Word& w) {
  if (w.size() <= 1) return {};
  lang::Word out(w.begin() + 2, w.end());
  const lang::Word& g = t.productions.at(w[0]);
  out.insert(out.end(), g.begin(), g.end());
  return out;
}

struct TagRun {
  enum class End { Halted, Cycled, Budget };
  std::vector<lang::Word> words;  // s₀, s₁, …, ending at λ / first repeat / cap
  End end = End::Budget;
  std::size_t cycle_start = 0;  // index of the repeated word's first occurrence
};

/// Iterate the step function with a word memo until λ, a repeat, or the cap.
inline TagRun tag_run(const TagSystem& t, std::size_t maxSteps = 10000) {
  TagRun run;
  std::map<lang::Word, std::size_t> seen;
  lang::Word w = t.start;
  for (;;) {
    auto [it, fresh] = seen.emplace(w, run.words.size());
    if (!fresh) {
      run.end = TagRun::End::Cycled;
      run.cycle_start = it->second;
      return run;
    }
    run.words.push_back(w);
    if (w.empty()) {
      run.end = TagRun::End::Halted;
      return run;
    }
    if (run.words.size() > maxSteps) {
      run.end = TagRun::End::Budget;
      return run;
    }
    w = tag_step(t, w);
  }
}

// ---------------------------------------------------------------------------
// Tag system → repeater/simulator protocol
// ---------------------------------------------------------------------------

/// Two-node protocol whose channel-content evolution simulates the tag run:
/// node 0 echoes every received b_b back as b_a; node 1 plays out the tag
/// system: send the start word, then repeatedly receive two symbols and send
/// the production of the first. A never-taken +f edge closes node 1's cycle.
inline model::Protocol tag_to_protocol(const TagSystem& t) {
  model::Protocol p;
  p.name = "tag";
  p.nodes = {"0", "1"};
  lang::Alphabet alphaSyms, betaSyms;
  for (const auto& s : t.alphabet) alphaSyms.push_back(s + "_a");
  alphaSyms.push_back("f");
  for (const auto& s : t.alphabet) betaSyms.push_back(s + "_b");
  p.channels.push_back({"alpha", "0", "1", alphaSyms});
  p.channels.push_back({"beta", "1", "0", betaSyms});

  model::Machine m0;
  m0.node = "0";
  m0.start = "h0";
  for (const auto& b : t.alphabet) {
    m0.transitions.push_back({"h0", false, b + "_b", "beta", "p_" + b});
    m0.transitions.push_back({"p_" + b, true, b + "_a", "alpha", "h0"});
  }

  model::Machine m1;
  m1.node = "1";
  m1.start = "h1";
  // Send chain for the start word; its end state is q (h1 itself when empty).
  std::string q = t.start.empty() ? "h1" : "q";
  std::string cur = "h1";
  for (std::size_t i = 0; i < t.start.size(); ++i) {
    std::string nxt = (i + 1 == t.start.size()) ? q : "c" + std::to_string(i + 1);
    m1.transitions.push_back({cur, true, t.start[i] + "_b", "beta", nxt});
    cur = nxt;
  }
  for (const auto& d : t.alphabet) {
    std::string qd = "q_" + d;
    m1.transitions.push_back({q, false, d + "_a", "alpha", qd});
    const lang::Word& g = t.productions.at(d);
    std::string firstOfChain = g.empty() ? q : "u_" + d + "_0";
    for (const auto& b : t.alphabet) m1.transitions.push_back({qd, false, b + "_a", "alpha", firstOfChain});
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::string from = "u_" + d + "_" + std::to_string(i);
      std::string to = (i + 1 == g.size()) ? q : "u_" + d + "_" + std::to_string(i + 1);
      m1.transitions.push_back({from, true, g[i] + "_b", "beta", to});
    }
  }
  // The dummy reception that makes node 1 strongly connected; f is never sent.
  m1.transitions.push_back({q, false, "f", "alpha", "h1"});

  p.machines.push_back(std::move(m0));
  p.machines.push_back(std::move(m1));
  return p;
}

// ---------------------------------------------------------------------------
// Affinization surgeries on a two-node machine pair
// ---------------------------------------------------------------------------

namespace detail {

/// A fresh name not used by any state of the machine: base, base_, base__, …
inline std::string fresh_state(const model::Machine& m, std::string base) {
  auto used = [&](const std::string& s) {
    if (m.start == s) return true;
    for (const auto& t : m.transitions)
      if (t.state == s || t.target == s) return true;
    return false;
  };
  while (used(base)) base += "_";
  return base;
}

inline std::vector<std::string> machine_states(const model::Machine& m) {
  std::vector<std::string> out{m.start};
  auto add = [&](const std::string& s) {
    for (const auto& x : out)
      if (x == s) return;
    out.push_back(s);
  };
  for (const auto& t : m.transitions) {
    add(t.state);
    add(t.target);
  }
  return out;
}

/// Detach the initial state: a new copy state takes over all incoming edges
/// and mirrors the start state's outgoing edges, so runs "return" to the copy
/// while the start state becomes source-only.
inline std::string detach_start(model::Machine& m) {
  std::string copy = fresh_state(m, "home_copy");
  std::vector<model::Transition> extra;
  for (auto& t : m.transitions) {
    if (t.target == m.start) t.target = copy;
    if (t.state == m.start) extra.push_back({copy, t.send, t.symbol, t.channel, t.target});
  }
  m.transitions.insert(m.transitions.end(), extra.begin(), extra.end());
  return copy;
}

struct MachineSides {
  std::string sendChannel, recvChannel;  // leaving / entering this node
  lang::Alphabet sendSyms, recvSyms;     // original alphabets (no marker)
};

inline MachineSides sides_for(const model::Protocol& p, const std::string& node) {
  MachineSides s;
  for (const auto& c : p.channels) {
    if (c.from == node) {
      s.sendChannel = c.id;
      s.sendSyms = c.alphabet;
    }
    if (c.to == node) {
      s.recvChannel = c.id;
      s.recvSyms = c.alphabet;
    }
  }
  return s;
}

inline void require_sr_pair_shape(const model::Protocol& p) {
  if (p.nodes.size() != 2 || p.channels.size() != 2 ||
      p.channels[0].from == p.channels[0].to || p.channels[1].from == p.channels[1].to ||
      p.channels[0].from != p.channels[1].to || p.channels[0].to != p.channels[1].from)
    throw std::invalid_argument("affinization needs a two-node pair with one channel each way");
  for (const auto& m : p.machines)
    for (const auto& s : machine_states(m)) {
      bool hasSend = false, hasRecv = false, any = false;
      for (const auto& t : m.transitions)
        if (t.state == s) {
          any = true;
          (t.send ? hasSend : hasRecv) = true;
        }
      if (!any) throw std::invalid_argument("state '" + s + "' has no transitions");
      if (hasSend && hasRecv) throw std::invalid_argument("state '" + s + "' mixes sends and receives");
    }
}

/// A marker symbol name unused on either channel.
inline std::string fresh_marker(const model::Protocol& p, std::string base) {
  auto used = [&](const std::string& s) {
    for (const auto& c : p.channels)
      if (lang::alphabet_index(c.alphabet, s) >= 0) return true;
    return false;
  };
  while (used(base)) base += "x";
  return base;
}

/// Drop states the start can no longer reach (sink states that received no
/// in-edges because every original state already covered its full alphabet);
/// keeping them would break the machine's strong connectivity.
inline void trim_unreachable(model::Machine& m) {
  std::set<std::string> reach{m.start};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& t : m.transitions)
      if (reach.count(t.state) && reach.insert(t.target).second) grew = true;
  }
  std::vector<model::Transition> kept;
  for (auto& t : m.transitions)
    if (reach.count(t.state)) kept.push_back(t);
  m.transitions = std::move(kept);
}

}  // namespace detail

/// Deadlock-preserving affinization: detach the start state, then route every
/// unexpected symbol to sinks that drain the channels and restart via marker
/// symbols; a run segment becomes (u·mark, v·mark) on the two channels.
inline model::Protocol affinize_deadlock(const model::Protocol& p0) {
  detail::require_sr_pair_shape(p0);
  model::Protocol p = p0;
  p.name = p0.name + "_affine_deadlock";
  std::map<std::string, std::string> markerOf;  // channel → marker symbol
  for (auto& c : p.channels) {
    markerOf[c.id] = detail::fresh_marker(p, "mark_" + c.id);
    c.alphabet.push_back(markerOf[c.id]);
  }
  for (auto& m : p.machines) {
    detail::MachineSides sides = detail::sides_for(p0, m.node);  // marker-free alphabets
    const std::string sendMark = markerOf[sides.sendChannel];
    const std::string recvMark = markerOf[sides.recvChannel];
    std::string home = m.start;
    detail::detach_start(m);
    std::string s = detail::fresh_state(m, "s");
    std::string sp = detail::fresh_state(m, "sp");
    std::string r = detail::fresh_state(m, "r");
    for (const auto& st : detail::machine_states(m)) {
      if (st == s || st == sp || st == r) continue;
      bool isSend = false;
      std::set<lang::Symbol> present;
      for (const auto& t : m.transitions)
        if (t.state == st) {
          isSend = t.send;
          present.insert(t.symbol);
        }
      if (isSend) {
        m.transitions.push_back({st, true, sendMark, sides.sendChannel, r});
        for (const auto& b : sides.sendSyms)
          if (!present.count(b)) m.transitions.push_back({st, true, b, sides.sendChannel, sp});
      } else {
        m.transitions.push_back({st, false, recvMark, sides.recvChannel, s});
        for (const auto& b : sides.recvSyms)
          if (!present.count(b)) m.transitions.push_back({st, false, b, sides.recvChannel, sp});
      }
    }
    m.transitions.push_back({sp, true, sendMark, sides.sendChannel, r});
    m.transitions.push_back({r, false, recvMark, sides.recvChannel, home});
    m.transitions.push_back({s, true, sendMark, sides.sendChannel, home});
    for (const auto& b : sides.sendSyms) {
      m.transitions.push_back({sp, true, b, sides.sendChannel, sp});
      m.transitions.push_back({s, true, b, sides.sendChannel, s});
    }
    for (const auto& b : sides.recvSyms) m.transitions.push_back({r, false, b, sides.recvChannel, r});
    detail::trim_unreachable(m);
  }
  return p;
}

/// Boundedness-preserving affinization: same detachment, but with double
/// markers and receive-side sinks so the drained run segment becomes
/// (u·mark·mark, v·mark·mark) and all new behavior stays bounded.
inline model::Protocol affinize_bounded(const model::Protocol& p0) {
  detail::require_sr_pair_shape(p0);
  model::Protocol p = p0;
  p.name = p0.name + "_affine_bounded";
  std::map<std::string, std::string> markerOf;
  for (auto& c : p.channels) {
    markerOf[c.id] = detail::fresh_marker(p, "mark_" + c.id);
    c.alphabet.push_back(markerOf[c.id]);
  }
  for (auto& m : p.machines) {
    detail::MachineSides sides = detail::sides_for(p0, m.node);  // marker-free alphabets
    const std::string sendMark = markerOf[sides.sendChannel];
    const std::string recvMark = markerOf[sides.recvChannel];
    std::string home = m.start;
    detail::detach_start(m);
    std::string r = detail::fresh_state(m, "r");
    std::string rp = detail::fresh_state(m, "rp");
    std::string rpp = detail::fresh_state(m, "rpp");
    std::string rppp = detail::fresh_state(m, "rppp");
    std::string s = detail::fresh_state(m, "s");
    std::string sp = detail::fresh_state(m, "sp");
    for (const auto& st : detail::machine_states(m)) {
      if (st == r || st == rp || st == rpp || st == rppp || st == s || st == sp) continue;
      bool isSend = false;
      std::set<lang::Symbol> present;
      for (const auto& t : m.transitions)
        if (t.state == st) {
          isSend = t.send;
          present.insert(t.symbol);
        }
      if (isSend) {
        m.transitions.push_back({st, true, sendMark, sides.sendChannel, rpp});
        for (const auto& b : sides.sendSyms)
          if (!present.count(b)) m.transitions.push_back({st, true, b, sides.sendChannel, r});
      } else {
        m.transitions.push_back({st, false, recvMark, sides.recvChannel, rp});
        for (const auto& b : sides.recvSyms)
          if (!present.count(b)) m.transitions.push_back({st, false, b, sides.recvChannel, r});
      }
    }
    m.transitions.push_back({r, false, recvMark, sides.recvChannel, rp});
    m.transitions.push_back({rp, false, recvMark, sides.recvChannel, s});
    m.transitions.push_back({s, true, sendMark, sides.sendChannel, sp});
    m.transitions.push_back({rpp, false, recvMark, sides.recvChannel, rppp});
    m.transitions.push_back({rppp, false, recvMark, sides.recvChannel, sp});
    m.transitions.push_back({sp, true, sendMark, sides.sendChannel, home});
    for (const auto& b : sides.recvSyms) {
      m.transitions.push_back({r, false, b, sides.recvChannel, r});
      m.transitions.push_back({rpp, false, b, sides.recvChannel, rpp});
    }
    for (const auto& b : sides.sendSyms) m.transitions.push_back({s, true, b, sides.sendChannel, s});
    detail::trim_unreachable(m);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Built-in fixtures
// ---------------------------------------------------------------------------

namespace detail {

inline model::Protocol access_fixture() {
  return model::parse_protocol(R"(protocol access
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha REQUEST RELINQUISH
alphabet beta GRANT REFUSE
machine 0 start 00
trans 0 00 -REQUEST@alpha 01
trans 0 01 +GRANT@beta 02
trans 0 01 +REFUSE@beta 00
trans 0 02 -RELINQUISH@alpha 00
machine 1 start 10
trans 1 10 +REQUEST@alpha 11
trans 1 11 -GRANT@beta 12
trans 1 11 -REFUSE@beta 10
trans 1 12 +RELINQUISH@alpha 10
)");
}

inline model::Protocol counter_fixture() {
  return model::parse_protocol(R"(protocol counter
node 0
node 1
channel alpha from 0 to 1
channel beta from 0 to 1
alphabet alpha d
alphabet beta b
machine 0 start 00
trans 0 00 -d@alpha 01
trans 0 01 -b@beta 00
machine 1 start 10
trans 1 10 +d@alpha 11
trans 1 11 +b@beta 10
)");
}

/// Two identical stations exchanging data (D), resets (R) and acks (A); each
/// station acknowledges received data and may reset. Reconstructed from the
/// flow-control example; the exploration goldens pin it down.
inline model::Protocol flowctl2_fixture() {
  return model::parse_protocol(R"(protocol flowctl2
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha D_a R_a A_a
alphabet beta D_b R_b A_b
machine 0 start 00
trans 0 00 -D_a@alpha 03
trans 0 00 -R_a@alpha 03
trans 0 00 +D_b@beta 01
trans 0 00 +R_b@beta 02
trans 0 00 +A_b@beta 02
trans 0 01 -A_a@alpha 00
trans 0 02 -D_a@alpha 00
trans 0 02 -R_a@alpha 00
trans 0 03 +D_b@beta 04
trans 0 03 +R_b@beta 00
trans 0 03 +A_b@beta 00
trans 0 04 -A_a@alpha 03
machine 1 start 10
trans 1 10 -D_b@beta 13
trans 1 10 -R_b@beta 13
trans 1 10 +D_a@alpha 11
trans 1 10 +R_a@alpha 12
trans 1 10 +A_a@alpha 12
trans 1 11 -A_b@beta 10
trans 1 12 -D_b@beta 10
trans 1 12 -R_b@beta 10
trans 1 13 +D_a@alpha 14
trans 1 13 +R_a@alpha 10
trans 1 13 +A_a@alpha 10
trans 1 14 -A_b@beta 13
)");
}

/// Alternating bit protocol with lossy "demon" relays on the data and ack
/// rings: a demon either forwards a message or deletes it. Reconstructed;
/// the four declared relations and their consistency pin it down.
inline model::Protocol altbit_demons_fixture() {
  return model::parse_protocol(R"(protocol altbit-demons
node 0
node 1
node 2
node 3
channel alpha from 0 to 2
channel beta from 2 to 1
channel gamma from 1 to 3
channel delta from 3 to 0
alphabet alpha EV_a OD_a ED_a
alphabet beta EV_b OD_b ED_b
alphabet gamma EVA_g ODA_g EDA_g
alphabet delta EVA_d ODA_d EDA_d
machine 0 start 00
trans 0 00 -EV_a@alpha 00
trans 0 00 +EVA_d@delta 01
trans 0 00 +EVA_d@delta 02
trans 0 01 -OD_a@alpha 01
trans 0 01 +ODA_d@delta 00
trans 0 01 +ODA_d@delta 02
trans 0 02 -ED_a@alpha 02
trans 0 02 +EDA_d@delta 03
trans 0 03 -EV_a@alpha 00
trans 0 03 +EDA_d@delta 03
machine 1 start 10
trans 1 10 +EV_b@beta 11
trans 1 10 +OD_b@beta 12
trans 1 10 +ED_b@beta 13
trans 1 11 -EVA_g@gamma 10
trans 1 12 -ODA_g@gamma 10
trans 1 13 -EDA_g@gamma 10
machine 2 start 20
trans 2 20 +EV_a@alpha 21
trans 2 20 +EV_a@alpha 20
trans 2 20 +OD_a@alpha 22
trans 2 20 +OD_a@alpha 20
trans 2 20 +ED_a@alpha 23
trans 2 20 +ED_a@alpha 20
trans 2 21 -EV_b@beta 20
trans 2 22 -OD_b@beta 20
trans 2 23 -ED_b@beta 20
machine 3 start 30
trans 3 30 +EVA_g@gamma 31
trans 3 30 +EVA_g@gamma 30
trans 3 30 +ODA_g@gamma 32
trans 3 30 +ODA_g@gamma 30
trans 3 30 +EDA_g@gamma 33
trans 3 30 +EDA_g@gamma 30
trans 3 31 -EVA_d@delta 30
trans 3 32 -ODA_d@delta 30
trans 3 33 -EDA_d@delta 30
)");
}

/// Turn-taking alternating bit variant: both stations run the same diagram
/// (different start states) and every channel carries all six message types;
/// each demon can hold any one message. Reconstructed; the declared proof
/// table and its consistency pin it down.
inline model::Protocol altbit_turns_fixture() {
  return model::parse_protocol(R"(protocol altbit-turns
node 0
node 1
node 2
node 3
channel alpha from 0 to 2
channel beta from 2 to 1
channel gamma from 1 to 3
channel delta from 3 to 0
alphabet alpha EV_a OD_a ED_a EVA_a ODA_a EDA_a
alphabet beta EV_b OD_b ED_b EVA_b ODA_b EDA_b
alphabet gamma EV_g OD_g ED_g EVA_g ODA_g EDA_g
alphabet delta EV_d OD_d ED_d EVA_d ODA_d EDA_d
machine 0 start 00
trans 0 00 -EV_a@alpha 00
trans 0 00 +EVA_d@delta 01
trans 0 00 +EVA_d@delta 02
trans 0 01 -OD_a@alpha 01
trans 0 01 +ODA_d@delta 00
trans 0 01 +ODA_d@delta 02
trans 0 02 -ED_a@alpha 02
trans 0 02 +EV_d@delta 03
trans 0 03 -EVA_a@alpha 04
trans 0 04 +EV_d@delta 03
trans 0 04 +OD_d@delta 05
trans 0 04 +ED_d@delta 00
trans 0 05 -ODA_a@alpha 04
machine 1 start 14
trans 1 10 -EV_g@gamma 10
trans 1 10 +EVA_b@beta 11
trans 1 10 +EVA_b@beta 12
trans 1 11 -OD_g@gamma 11
trans 1 11 +ODA_b@beta 10
trans 1 11 +ODA_b@beta 12
trans 1 12 -ED_g@gamma 12
trans 1 12 +EV_b@beta 13
trans 1 13 -EVA_g@gamma 14
trans 1 14 +EV_b@beta 13
trans 1 14 +OD_b@beta 15
trans 1 14 +ED_b@beta 10
trans 1 15 -ODA_g@gamma 14
machine 2 start 20
trans 2 20 +EV_a@alpha 21
trans 2 20 +EV_a@alpha 20
trans 2 20 +OD_a@alpha 22
trans 2 20 +OD_a@alpha 20
trans 2 20 +ED_a@alpha 23
trans 2 20 +ED_a@alpha 20
trans 2 20 +EVA_a@alpha 24
trans 2 20 +EVA_a@alpha 20
trans 2 20 +ODA_a@alpha 25
trans 2 20 +ODA_a@alpha 20
trans 2 20 +EDA_a@alpha 26
trans 2 20 +EDA_a@alpha 20
trans 2 21 -EV_b@beta 20
trans 2 22 -OD_b@beta 20
trans 2 23 -ED_b@beta 20
trans 2 24 -EVA_b@beta 20
trans 2 25 -ODA_b@beta 20
trans 2 26 -EDA_b@beta 20
machine 3 start 30
trans 3 30 +EV_g@gamma 31
trans 3 30 +EV_g@gamma 30
trans 3 30 +OD_g@gamma 32
trans 3 30 +OD_g@gamma 30
trans 3 30 +ED_g@gamma 33
trans 3 30 +ED_g@gamma 30
trans 3 30 +EVA_g@gamma 34
trans 3 30 +EVA_g@gamma 30
trans 3 30 +ODA_g@gamma 35
trans 3 30 +ODA_g@gamma 30
trans 3 30 +EDA_g@gamma 36
trans 3 30 +EDA_g@gamma 30
trans 3 31 -EV_d@delta 30
trans 3 32 -OD_d@delta 30
trans 3 33 -ED_d@delta 30
trans 3 34 -EVA_d@delta 30
trans 3 35 -ODA_d@delta 30
trans 3 36 -EDA_d@delta 30
)");
}

}  // namespace detail

inline std::vector<std::string> fixture_names() {
  return {"access", "altbit-demons", "altbit-turns", "counter", "flowctl2"};
}

inline model::Protocol fixture(const std::string& name) {
  if (name == "access") return detail::access_fixture();
  if (name == "counter") return detail::counter_fixture();
  if (name == "flowctl2") return detail::flowctl2_fixture();
  if (name == "altbit-demons") return detail::altbit_demons_fixture();
  if (name == "altbit-turns") return detail::altbit_turns_fixture();
  std::string names;
  for (const auto& n : fixture_names()) names += (names.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown fixture '" + name + "' (available: " + names + ")");
}

/// Declared proof table shipped with a fixture (empty set for the others):
/// altbit-turns carries a regular table for channel alpha, altbit-demons a
/// recognizable table per channel ring.
inline std::string fixture_proof(const std::string& name) {
  if (name == "altbit-turns")
    return R"(proof regular channel alpha
default empty
V 0 00,01,02,04
V 1 10,11,12,14
V 2 20
V 3 30
Q 00,12,20,30 = EVA_a* . EV_a* | ODA_a* . EV_a*
Q 00,14,20,30 = OD_a* . EV_a*
Q 01,14,20,30 = EV_a* . OD_a*
Q 02,10,20,30 = ED_a*
Q 02,14,20,30 = EV_a* . ED_a* | OD_a* . ED_a*
Q 04,10,20,30 = ED_a* . EVA_a* | ODA_a* . EVA_a*
Q 04,11,20,30 = EVA_a* . ODA_a*
Q 04,12,20,30 = EVA_a* | ODA_a*
)";
  if (name == "altbit-demons")
    return R"(proof recognizable
default empty
V 0 00,01,02,03
V 1 10
V 2 20
V 3 30
R 00,10,20,30 = (ED_a* . EV_a*, ED_b*, EDA_g*, EDA_d*) + (EV_a*, ED_b* . EV_b*, EDA_g*, EDA_d*) + (EV_a*, EV_b*, EDA_g* . EVA_g*, EDA_d*) + (EV_a*, EV_b*, EVA_g*, EDA_d* . EVA_d*) + (OD_a* . EV_a*, OD_b*, ODA_g*, ODA_d*) + (EV_a*, OD_b* . EV_b*, ODA_g*, ODA_d*) + (EV_a*, EV_b*, ODA_g* . EVA_g*, ODA_d*) + (EV_a*, EV_b*, EVA_g*, ODA_d* . EVA_d*)
R 01,10,20,30 = (EV_a* . OD_a*, EV_b*, EVA_g*, EVA_d*) + (OD_a*, EV_b* . OD_b*, EVA_g*, EVA_d*) + (OD_a*, OD_b*, EVA_g* . ODA_g*, EVA_d*) + (OD_a*, OD_b*, ODA_g*, EVA_d* . ODA_d*)
R 02,10,20,30 = (EV_a* . ED_a*, EV_b*, EVA_g*, EVA_d*) + (ED_a*, EV_b* . ED_b*, EVA_g*, EVA_d*) + (ED_a*, ED_b*, EVA_g* . EDA_g*, EVA_d*) + (ED_a*, ED_b*, EDA_g*, EVA_d* . EDA_d*) + (OD_a* . ED_a*, OD_b*, ODA_g*, ODA_d*) + (ED_a*, OD_b* . ED_b*, ODA_g*, ODA_d*) + (ED_a*, ED_b*, ODA_g* . EDA_g*, ODA_d*) + (ED_a*, ED_b*, EDA_g*, ODA_d* . EDA_d*)
R 03,10,20,30 = (ED_a*, ED_b*, EDA_g*, EDA_d*)
)";
  return "";
}

}  // namespace cfsm::gen

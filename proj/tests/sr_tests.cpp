#include <catch2/catch_amalgamated.hpp>

#include <cfsm/gen.hpp>
#include <cfsm/sr.hpp>

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"

using namespace cfsm;

namespace {

// Two channels, two symbols each; no machines needed for projections.
model::Protocol two_channel_protocol() {
  return model::parse_protocol(
      "protocol proj\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d1 d2\n"
      "alphabet beta b1 b2\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d1@alpha h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 -b1@beta h1\n");
}

// F0 sends one d and waits for one b; F1 mirrors. The canonical affine,
// deadlock-free, bounded pair.
model::Protocol ping_pair() {
  return model::parse_protocol(
      "protocol ping\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha p\n"
      "trans 0 p +b@beta h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 +d@alpha q\n"
      "trans 1 q -b@beta h1\n");
}

// Like ping_pair, but machine 1 answers every d with two b's: its home
// loops put twice as many symbols on beta as machine 0's consume.
model::Protocol double_reply_pair() {
  return model::parse_protocol(
      "protocol doubler\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha p\n"
      "trans 0 p +b@beta h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 +d@alpha q\n"
      "trans 1 q -b@beta q2\n"
      "trans 1 q2 -b@beta h1\n");
}

// Machine 0 sends a burst of three d's before collecting its single b;
// machine 1 pays the b up front and then drains the burst. Affine (the
// home loops project to (ddd, b) on both sides), but matching machine 0's
// burst forces the engine to buffer all three d's.
model::Protocol burst_pair() {
  return model::parse_protocol(
      "protocol burst\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha a1\n"
      "trans 0 a1 -d@alpha a2\n"
      "trans 0 a2 -d@alpha a3\n"
      "trans 0 a3 +b@beta h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 -b@beta r1\n"
      "trans 1 r1 +d@alpha r2\n"
      "trans 1 r2 +d@alpha r3\n"
      "trans 1 r3 +d@alpha h1\n");
}

bool has_all_send_path(const model::Machine& m, std::size_t length) {
  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::string> states{m.start};
  for (const auto& t : m.transitions) {
    states.insert(t.state);
    states.insert(t.target);
    if (t.send) adj[t.state].push_back(t.target);
  }
  // Depth-limited walk: a path of `length` send edges exists iff some state
  // can start one.
  std::function<bool(const std::string&, std::size_t)> go =
      [&](const std::string& s, std::size_t left) {
        if (left == 0) return true;
        for (const auto& t : adj[s])
          if (go(t, left - 1)) return true;
        return false;
      };
  for (const auto& s : states)
    if (go(s, length)) return true;
  return false;
}

}  // namespace

TEST_CASE("projections erase signs and other channels") {
  model::Protocol p = two_channel_protocol();
  CHECK(sr::project(p, "+d1 +d2 -b1 +d1 -b2 -b2", "alpha") == oracles::w("d1 d2 d1"));
  CHECK(sr::project(p, "+d1 +d2 -b1 +d1 -b2 -b2", "beta") == oracles::w("b1 b2 b2"));
  CHECK(sr::project(p, "", "alpha").empty());
  CHECK(sr::project(p, "   ", "beta").empty());
  CHECK_THROWS_AS(sr::project(p, "+d1", "gamma"), std::invalid_argument);
  CHECK_THROWS_AS(sr::project(p, "+zz", "alpha"), std::invalid_argument);
  CHECK_THROWS_AS(sr::project(p, "d1", "alpha"), std::invalid_argument);
}

TEST_CASE("projection distributes over concatenation") {
  model::Protocol p = two_channel_protocol();
  std::mt19937 rng(7);
  std::vector<std::string> toks{"+d1", "-d1", "+d2", "-d2", "+b1", "-b1", "+b2", "-b2"};
  auto word = [&] {
    int len = std::uniform_int_distribution<int>(0, 6)(rng);
    std::string s;
    for (int i = 0; i < len; ++i)
      s += (s.empty() ? "" : " ") + toks[std::uniform_int_distribution<std::size_t>(
                                        0, toks.size() - 1)(rng)];
    return s;
  };
  for (int iter = 0; iter < 50; ++iter) {
    std::string u = word(), v = word();
    for (const std::string& ch : {"alpha", "beta"}) {
      lang::Word cat = sr::project(p, u, ch);
      lang::Word right = sr::project(p, v, ch);
      cat.insert(cat.end(), right.begin(), right.end());
      CHECK(sr::project(p, u + " " + v, ch) == cat);
    }
  }
}

TEST_CASE("send and receive cycles") {
  model::Machine selfSend{"0", "s", {{"s", true, "b", "alpha", "s"}}};
  auto sc = sr::send_cycles(selfSend);
  REQUIRE(sc.size() == 1);
  CHECK(sc[0] == std::vector<std::string>{"s"});
  CHECK(sr::receive_cycles(selfSend).empty());

  // A two-state send loop plus a receive detour: one send cycle, no receive
  // cycle, and the representative walks real send edges back to its start.
  model::Machine loop{"0",
                      "s",
                      {{"s", true, "x", "alpha", "t"},
                       {"t", true, "y", "alpha", "s"},
                       {"t", false, "z", "beta", "s"}}};
  auto lc = sr::send_cycles(loop);
  REQUIRE(lc.size() == 1);
  CHECK(lc[0].size() == 2);
  for (std::size_t i = 0; i < lc[0].size(); ++i) {
    const std::string& from = lc[0][i];
    const std::string& to = lc[0][(i + 1) % lc[0].size()];
    bool edge = false;
    for (const auto& t : loop.transitions)
      if (t.send && t.state == from && t.target == to) edge = true;
    CHECK(edge);
  }
  CHECK(sr::receive_cycles(loop).empty());

  // The mirror image has the cycles swapped.
  model::Machine mirror{"1",
                        "s",
                        {{"s", false, "x", "alpha", "t"},
                         {"t", false, "y", "alpha", "s"},
                         {"t", true, "z", "beta", "s"}}};
  CHECK(sr::send_cycles(mirror).empty());
  CHECK(sr::receive_cycles(mirror).size() == 1);

  // Ping machines alternate polarity: no monochrome cycle at all.
  model::Protocol ping = ping_pair();
  for (const auto& m : ping.machines) {
    CHECK(sr::send_cycles(m).empty());
    CHECK(sr::receive_cycles(m).empty());
  }
}

TEST_CASE("pumping: a long all-send path needs a send cycle") {
  std::mt19937 rng(99);
  int withCycle = 0;
  for (int iter = 0; iter < 200; ++iter) {
    // Random machine over one out-channel and one in-channel.
    auto pick = [&rng](int lo, int hi) {
      return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    int k = pick(1, 4);
    model::Machine m{"0", "s0", {}};
    int edges = pick(0, 6);
    for (int e = 0; e < edges; ++e)
      m.transitions.push_back({"s" + std::to_string(pick(0, k - 1)), pick(0, 1) == 1,
                               "x" + std::to_string(e), "alpha",
                               "s" + std::to_string(pick(0, k - 1))});
    std::set<std::string> states{m.start};
    for (const auto& t : m.transitions) {
      states.insert(t.state);
      states.insert(t.target);
    }
    bool cyc = !sr::send_cycles(m).empty();
    withCycle += cyc ? 1 : 0;
    CHECK(cyc == has_all_send_path(m, states.size() + 1));
  }
  CHECK(withCycle > 20);
  CHECK(withCycle < 180);
}

TEST_CASE("growth bounds") {
  CHECK(sr::growth_bound(ping_pair()) == 3);        // 2·(2−1)+1
  CHECK(sr::growth_bound(double_reply_pair()) == 5);  // 2·(3−1)+1
  CHECK_THROWS_AS(sr::growth_bound(gen::fixture("flowctl2")), std::invalid_argument);
}

TEST_CASE("the ping pair is certified affine, deadlock-free, and bounded") {
  auto d = sr::decide_affine_deadlock(ping_pair());
  CHECK(d.affine == sr::Verdict::Yes);
  CHECK(d.deadlock_free == sr::Verdict::Yes);
  CHECK(d.bounded == sr::Verdict::Yes);
  REQUIRE(d.bound.has_value());
  CHECK(*d.bound == 1);
  CHECK_FALSE(d.witness.has_value());
}

TEST_CASE("a double reply refutes affinity by channel growth") {
  auto d = sr::decide_affine_deadlock(double_reply_pair());
  CHECK(d.affine == sr::Verdict::No);
  // Beta keeps one extra b per round, so the space never exhausts under the
  // growth-bound cap: the other two verdicts stay open.
  CHECK(d.deadlock_free == sr::Verdict::Unknown);
  CHECK(d.bounded == sr::Verdict::Unknown);
  CHECK(d.rationale.find("beta") != std::string::npos);
}

TEST_CASE("a finite imbalance refutes affinity with a witness word") {
  // Machine 1 only ever completes double rounds, so machine 0's single
  // round (d, b) has no counterpart. Every run stays far below the growth
  // bounds, so the refutation must come from projection matching.
  model::Protocol p = model::parse_protocol(
      "protocol halfstep\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha p\n"
      "trans 0 p +b@beta h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 +d@alpha q\n"
      "trans 1 q -b@beta q2\n"
      "trans 1 q2 +d@alpha q3\n"
      "trans 1 q3 -b@beta h1\n");
  auto d = sr::decide_affine_deadlock(p);
  CHECK(d.affine == sr::Verdict::No);
  REQUIRE(d.witness.has_value());
  CHECK(*d.witness == "-d +b");
  // Globally the pair still behaves like ping: affinity is a property of
  // the machines' loop languages, not of the reachable space.
  CHECK(d.deadlock_free == sr::Verdict::Yes);
  CHECK(d.bounded == sr::Verdict::Yes);
}

TEST_CASE("the burst pair is certified affine") {
  auto d = sr::decide_affine_deadlock(burst_pair());
  CHECK(d.affine == sr::Verdict::Yes);
  CHECK(d.deadlock_free == sr::Verdict::Yes);
  CHECK(d.bounded == sr::Verdict::Yes);
}

TEST_CASE("send cycles leave every verdict open") {
  model::Protocol p = model::parse_protocol(
      "protocol pump\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 +d@alpha h1\n");
  auto d = sr::decide_affine_deadlock(p);
  CHECK(d.affine == sr::Verdict::Unknown);
  CHECK(d.deadlock_free == sr::Verdict::Unknown);
  CHECK(d.bounded == sr::Verdict::Unknown);
  CHECK(d.rationale.find("send cycle") != std::string::npos);
}

TEST_CASE("a receive cycle without send cycles refutes affinity") {
  model::Protocol p = model::parse_protocol(
      "protocol sink\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha d\n"
      "alphabet beta b\n"
      "machine 0 start h0\n"
      "trans 0 h0 -d@alpha p\n"
      "trans 0 p +b@beta h0\n"
      "machine 1 start h1\n"
      "trans 1 h1 +d@alpha h1\n");
  auto d = sr::decide_affine_deadlock(p);
  CHECK(d.affine == sr::Verdict::No);
  CHECK(d.rationale.find("receive cycle") != std::string::npos);
  // Machine 0 sends one d and then waits for a b that never comes.
  CHECK(d.deadlock_free == sr::Verdict::No);
  CHECK(d.bounded == sr::Verdict::Yes);
}

TEST_CASE("tag pairs decide deadlock by halting") {
  model::Protocol halting = gen::tag_to_protocol(
      gen::parse_tag("tag\nprod a b b\nprod b a\nstart a a a\n"));
  auto dh = sr::decide_affine_deadlock(halting);
  CHECK(dh.deadlock_free == sr::Verdict::No);
  CHECK(dh.bounded == sr::Verdict::Yes);

  gen::TagSystem pad;
  pad.alphabet = {"m"};
  pad.productions["m"] = oracles::w("m m");
  pad.start = oracles::w("m m");
  auto dc = sr::decide_affine_deadlock(gen::tag_to_protocol(pad));
  CHECK(dc.deadlock_free == sr::Verdict::Yes);
  CHECK(dc.bounded == sr::Verdict::Yes);
}

TEST_CASE("long queues coexist with an empty reverse channel") {
  // On a complete reachable space: for every reachable state, some reachable
  // state keeps the sender's component and at least as long a queue while
  // the reverse channel is empty. No affinity needed.
  std::vector<model::Protocol> subjects{ping_pair(), burst_pair()};
  std::mt19937 rng(4242);
  for (int i = 0; i < 5; ++i) subjects.push_back(generators::mirrored_sr_pair(rng));
  std::size_t longest = 0;
  for (const auto& p : subjects) {
    explore::Budget b;
    b.max_channel_len = 16;
    b.max_states = 200000;
    explore::StateGraph sg = explore::reach(p, b);
    REQUIRE(sg.exhausted);
    model::Index idx = model::build_index(p);
    for (std::size_t c = 0; c < 2; ++c) {
      int sender = idx.node.at(p.channels[c].from);
      for (const auto& g : sg.states) {
        longest = std::max(longest, g.chans[c].size());
        if (g.chans[c].empty() || g.chans[1 - c].empty()) continue;
        bool found = false;
        for (const auto& h : sg.states)
          if (h.comp[sender] == g.comp[sender] && h.chans[c].size() >= g.chans[c].size() &&
              h.chans[1 - c].empty())
            found = true;
        CHECK(found);
      }
    }
  }
  CHECK(longest >= 3);  // the burst pair queues a full burst
}

TEST_CASE("mirrored pairs are affine and never outgrow their bound") {
  std::mt19937 rng(20260815);
  for (int iter = 0; iter < 10; ++iter) {
    model::Protocol p = generators::mirrored_sr_pair(rng);
    INFO(model::print_protocol(p));
    REQUIRE(model::classify(p).is_sr_pair);
    for (const auto& m : p.machines) {
      CHECK(sr::send_cycles(m).empty());
      CHECK(sr::receive_cycles(m).empty());
    }
    auto d = sr::decide_affine_deadlock(p);
    CHECK(d.affine == sr::Verdict::Yes);
    CHECK(d.bounded == sr::Verdict::Yes);
  }
}

TEST_CASE("the matching engine retries when the lag bound clips") {
  // Deciding the lopsided pair with a lag bound of 1 clips the follower set
  // before the mismatch is real; the exact check classifies it as overflow
  // rather than a refutation.
  model::Protocol p = double_reply_pair();
  model::Index idx = model::build_index(p);
  auto tight = sr::detail::projection_inclusion(idx, p, 1, 1, 100000);
  auto roomy = sr::detail::projection_inclusion(idx, p, 1, 8, 100000);
  // Machine 1's home loop projects (d, bb); machine 0 can only match (d, b).
  CHECK(roomy.status == sr::detail::InclusionResult::Status::Unmatched);
  CHECK_FALSE(roomy.leader_word.empty());
  CHECK((tight.status == sr::detail::InclusionResult::Status::Unmatched ||
         tight.status == sr::detail::InclusionResult::Status::Overflow));

  // Machine 0's loops are matched by machine 1 in this direction? No: the
  // (d, b) loop of machine 0 has no counterpart either. Both directions
  // refute.
  auto other = sr::detail::projection_inclusion(idx, p, 0, 8, 100000);
  CHECK(other.status == sr::detail::InclusionResult::Status::Unmatched);

  // On the burst pair the follower must buffer three d's before its first
  // move, so a clipped run is an overflow (the exact check finds the match)
  // and a roomier bound settles the same direction as included.
  model::Protocol burst = burst_pair();
  model::Index bidx = model::build_index(burst);
  auto clipped = sr::detail::projection_inclusion(bidx, burst, 0, 1, 100000);
  CHECK(clipped.status == sr::detail::InclusionResult::Status::Overflow);
  auto settled = sr::detail::projection_inclusion(bidx, burst, 0, 3, 100000);
  CHECK(settled.status == sr::detail::InclusionResult::Status::Included);
}

TEST_CASE("decisions are deterministic") {
  auto a = sr::decide_affine_deadlock(double_reply_pair());
  auto b = sr::decide_affine_deadlock(double_reply_pair());
  CHECK(a.rationale == b.rationale);
  CHECK(a.witness == b.witness);
}

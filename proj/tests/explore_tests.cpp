#include <catch2/catch_amalgamated.hpp>

#include <cfsm/explore.hpp>
#include <cfsm/gen.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "goldens.hpp"
#include "oracles.hpp"

using namespace cfsm;

namespace {

// (composite names, per-channel contents as symbol words) — id-independent
// view of a state for set comparisons.
using StateView = std::pair<std::vector<std::string>, std::vector<lang::Word>>;

StateView view(const explore::StateGraph& sg, int id) {
  return {explore::composite_names(sg, id), explore::content_words(sg, id)};
}

std::set<StateView> view_set(const explore::StateGraph& sg) {
  std::set<StateView> out;
  for (std::size_t i = 0; i < sg.states.size(); ++i) out.insert(view(sg, static_cast<int>(i)));
  return out;
}

// flowctl2 golden letters -> symbol words ("DA" on alpha -> D_a A_a).
lang::Word letters(const std::string& s, const std::string& suffix) {
  lang::Word w;
  for (char c : s) w.push_back(std::string(1, c) + suffix);
  return w;
}

std::set<StateView> golden_flowctl2_views() {
  std::set<StateView> out;
  for (const auto& g : goldens::flowctl2_states())
    out.insert({{g.p0, g.p1}, {letters(g.xa, "_a"), letters(g.xb, "_b")}});
  return out;
}

model::Protocol send_loop_protocol() {
  return model::parse_protocol(
      "protocol loop\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m\nalphabet beta n\n"
      "machine 0 start s\n"
      "trans 0 s -m@alpha s\n"
      "machine 1 start t\n"
      "trans 1 t +m@alpha t\n");
}

// Each side sends one message and halts in an edge-less (receive) state.
model::Protocol one_shot_protocol() {
  return model::parse_protocol(
      "protocol oneshot\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m\nalphabet beta n\n"
      "machine 0 start a0\n"
      "trans 0 a0 -m@alpha a1\n"
      "machine 1 start b0\n"
      "trans 1 b0 -n@beta b1\n");
}

}  // namespace

TEST_CASE("successors follow the send and receive rules") {
  model::Protocol p = gen::fixture("flowctl2");
  model::Index idx = model::build_index(p);
  explore::GlobalState init = explore::initial_state(idx, p);

  auto succ = explore::successors(p, init);
  REQUIRE(succ.size() == 4);  // sends of D and R from each side; no receives
  CHECK(explore::label_string(p, succ[0].first) == "-D_a@alpha");
  CHECK(explore::label_string(p, succ[1].first) == "-R_a@alpha");
  CHECK(explore::label_string(p, succ[2].first) == "-D_b@beta");
  CHECK(explore::label_string(p, succ[3].first) == "-R_b@beta");
  CHECK(succ[0].second.chans[0] == std::string(1, char(0)));
  CHECK(succ[0].second.comp == std::vector<int>{idx.state_index[0].at("03"), idx.start[1]});

  model::Protocol c = gen::fixture("counter");
  auto csucc = explore::successors(c, explore::initial_state(model::build_index(c), c));
  REQUIRE(csucc.size() == 1);
  CHECK(explore::label_string(c, csucc[0].first) == "-d@alpha");
}

TEST_CASE("flowctl2 space at total cap 4 matches the golden table") {
  explore::Budget b;
  b.max_total_len = 4;
  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"), b);

  CHECK(sg.states.size() == 59);
  CHECK(sg.exhausted);
  CHECK(view_set(sg) == golden_flowctl2_views());

  // Group by composite and compare against the content-set table.
  std::map<goldens::Composite, std::set<goldens::ContentPair>> grouped;
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    auto names = explore::composite_names(sg, static_cast<int>(i));
    auto words = explore::content_words(sg, static_cast<int>(i));
    std::string xa, xb;
    for (const auto& s : words[0]) xa += s.substr(0, 1);
    for (const auto& s : words[1]) xb += s.substr(0, 1);
    grouped[{names[0], names[1]}].insert({xa, xb});
  }
  CHECK(grouped == goldens::flowctl2_contents());
  CHECK(grouped.at({"03", "13"}) == goldens::two_in_flight_pairs());
  CHECK(grouped.at({"00", "13"}) == goldens::one_in_flight_pairs());
  CHECK(grouped.at({"04", "13"}) == goldens::one_in_flight_pairs());

  // The space is bounded, so default generous caps find the same set.
  explore::StateGraph sg2 = explore::reach(gen::fixture("flowctl2"));
  CHECK(sg2.exhausted);
  CHECK(view_set(sg2) == golden_flowctl2_views());
}

TEST_CASE("counter contents are the budgeted diagonals") {
  explore::Budget b;
  b.max_channel_len = 5;
  explore::StateGraph sg = explore::reach(gen::fixture("counter"), b);
  CHECK_FALSE(sg.exhausted);  // the diagonal grows past any cap

  std::set<std::pair<std::string, std::string>> at0010;
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    auto names = explore::composite_names(sg, static_cast<int>(i));
    auto words = explore::content_words(sg, static_cast<int>(i));
    if (names == std::vector<std::string>{"00", "10"})
      at0010.insert({lang::word_to_string(words[0]), lang::word_to_string(words[1])});
  }
  std::set<std::pair<std::string, std::string>> expect;
  for (int n = 0; n <= 5; ++n) {
    lang::Word d(n, "d"), bb(n, "b");
    expect.insert({lang::word_to_string(d), lang::word_to_string(bb)});
  }
  CHECK(at0010 == expect);

  explore::Budget b3;
  b3.max_channel_len = 3;
  explore::StateGraph sg3 = explore::reach(gen::fixture("counter"), b3);
  CHECK(sg3.states.size() == 14);  // 4+3+4+3 across the four composites
  CHECK_FALSE(sg3.exhausted);

  auto stable = explore::stable_states(sg3);
  CHECK(stable.composites ==
        std::set<std::vector<std::string>>{{"00", "10"}, {"01", "11"}});
  CHECK_FALSE(stable.definitive);
}

TEST_CASE("budget overruns clear exhausted without exceptions") {
  explore::Budget b;
  b.max_channel_len = 4;
  explore::StateGraph sg = explore::reach(send_loop_protocol(), b);
  CHECK_FALSE(sg.exhausted);
  CHECK(sg.states.size() == 5);  // m^0..m^4
  CHECK_FALSE(explore::bounded_channels(sg).bound.has_value());

  explore::Budget tiny;
  tiny.max_states = 3;
  explore::StateGraph sg2 = explore::reach(gen::fixture("flowctl2"), tiny);
  CHECK(sg2.states.size() == 3);
  CHECK_FALSE(sg2.exhausted);
}

TEST_CASE("stable states and deadlocks on the fixtures") {
  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"));
  auto stable = explore::stable_states(sg);
  CHECK(stable.definitive);
  CHECK(stable.composites == goldens::flowctl2_stable());

  auto dead = explore::deadlocks(sg);
  CHECK(dead.definitive);
  CHECK(dead.states.empty());

  // By hand: the 7 obvious states plus ((01,12),(RELINQUISH REQUEST, eps)) —
  // the client may fire its next REQUEST before RELINQUISH is consumed.
  explore::StateGraph acc = explore::reach(gen::fixture("access"));
  CHECK(acc.exhausted);
  CHECK(acc.states.size() == 8);
  auto astable = explore::stable_states(acc);
  CHECK(astable.composites ==
        std::set<std::vector<std::string>>{{"00", "10"}, {"01", "11"}, {"02", "12"}});
  CHECK(explore::deadlocks(acc).states.empty());
  CHECK(explore::bounded_channels(acc).bound == std::size_t(2));

  // Both machines start in edge-less receive states: the initial state is
  // already deadlocked.
  model::Protocol idle = model::parse_protocol(
      "protocol idle\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m\nalphabet beta n\n"
      "machine 0 start a\n"
      "trans 0 a +n@beta a\n"
      "machine 1 start b\n"
      "trans 1 b +m@alpha b\n");
  explore::StateGraph isg = explore::reach(idle);
  auto idead = explore::deadlocks(isg);
  REQUIRE(idead.states.size() == 1);
  CHECK(idead.states[0] == 0);
  CHECK(idead.definitive);
}

TEST_CASE("executable receptions") {
  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"));
  auto er = explore::executable_receptions(sg);
  CHECK(er.definitive);
  for (const auto& r : er.receptions) {
    CHECK(r.state != "02");  // no message can arrive at 02
    CHECK(r.state != "12");
  }

  // Both counter channels feed node 1. The sender can run ahead, so every
  // (state, head) combination shows up even though the receive edges only
  // cover half of them.
  explore::Budget b;
  b.max_channel_len = 3;
  explore::StateGraph csg = explore::reach(gen::fixture("counter"), b);
  auto cr = explore::executable_receptions(csg);
  auto has = [&](const std::string& st, const std::string& sym, const std::string& ch) {
    return cr.receptions.count({"1", st, ch, sym}) > 0;
  };
  CHECK(has("10", "d", "alpha"));
  CHECK(has("11", "b", "beta"));
  CHECK(has("10", "b", "beta"));
  CHECK(has("11", "d", "alpha"));

  auto cwf = explore::well_formed(csg);
  CHECK(cwf.verdict == explore::WellFormedResult::Verdict::Violated);  // despite the budget cut
  std::set<std::pair<std::string, std::string>> extra;
  for (const auto& a : cwf.arrivals_without_edge) extra.insert({a.state, a.symbol});
  CHECK(extra == std::set<std::pair<std::string, std::string>>{{"10", "b"}, {"11", "d"}});
}

TEST_CASE("well-formedness comparisons") {
  // flowctl2 is not well-formed: a second beta message can sit at the head
  // while station 0 is mid-acknowledge at 04 (similarly 14), where no receive
  // edge exists. Derive the full expected violation set from the golden table.
  explore::StateGraph fsg = explore::reach(gen::fixture("flowctl2"));
  auto fwf = explore::well_formed(fsg);
  CHECK(fwf.verdict == explore::WellFormedResult::Verdict::Violated);
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& a : fwf.arrivals_without_edge) got.insert({a.state, a.symbol});
  std::set<std::string> rxStates{"00", "03", "10", "13"};  // states with receive edges
  std::set<std::pair<std::string, std::string>> expect;
  for (const auto& g : goldens::flowctl2_states()) {
    std::string xa = g.xa, xb = g.xb;
    if (!xb.empty() && !rxStates.count(g.p0)) expect.insert({g.p0, xb.substr(0, 1) + "_b"});
    if (!xa.empty() && !rxStates.count(g.p1)) expect.insert({g.p1, xa.substr(0, 1) + "_a"});
  }
  REQUIRE_FALSE(expect.empty());
  CHECK(got == expect);
  CHECK(fwf.edges_without_arrival.empty());

  CHECK(explore::well_formed(explore::reach(gen::fixture("access"))).verdict ==
        explore::WellFormedResult::Verdict::Holds);

  // A reception edge that is never fed is a definitive violation once the
  // space is exhausted.
  model::Protocol useless = model::parse_protocol(
      "protocol useless\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m k\nalphabet beta n\n"
      "machine 0 start a0\n"
      "trans 0 a0 -m@alpha a0\n"
      "machine 1 start b0\n"
      "trans 1 b0 +m@alpha b0\n"
      "trans 1 b0 +k@alpha b0\n");
  explore::Budget b;
  b.max_channel_len = 2;
  auto wf = explore::well_formed(explore::reach(useless, b));
  CHECK(wf.verdict == explore::WellFormedResult::Verdict::Unknown);  // not exhausted

  // A halting variant makes the verdict definitive.
  model::Protocol useless2 = useless;
  useless2.machines[0].transitions[0].target = "a1";
  auto wf2 = explore::well_formed(explore::reach(useless2));
  REQUIRE(wf2.verdict == explore::WellFormedResult::Verdict::Violated);
  REQUIRE(wf2.edges_without_arrival.size() == 1);
  CHECK(wf2.edges_without_arrival[0].symbol == "k");
  CHECK(wf2.arrivals_without_edge.empty());

  // The tag construction's dummy +f edge is never used.
  model::Protocol tagp = gen::tag_to_protocol(gen::parse_tag("tag\nprod a b b\nprod b a\nstart a a a\n"));
  explore::StateGraph tsg = explore::reach(tagp);
  REQUIRE(tsg.exhausted);
  auto twf = explore::well_formed(tsg);
  CHECK(twf.verdict == explore::WellFormedResult::Verdict::Violated);
  bool sawF = false;
  for (const auto& d : twf.edges_without_arrival) sawF = sawF || (d.symbol == "f" && d.state == "q");
  CHECK(sawF);
}

TEST_CASE("blocked channel analysis") {
  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"));
  for (const auto& e : explore::blocked_channels(sg))
    CHECK(e.verdict == explore::BlockedEntry::Verdict::Free);

  explore::StateGraph once = explore::reach(one_shot_protocol());
  REQUIRE(once.exhausted);
  auto entries = explore::blocked_channels(once);
  CHECK(entries.size() == 4);  // (m,-), (-,n) and (m,n) twice over
  for (const auto& e : entries) CHECK(e.verdict == explore::BlockedEntry::Verdict::Blocked);

  explore::Budget b;
  b.max_channel_len = 4;
  explore::StateGraph loop = explore::reach(send_loop_protocol(), b);
  // The receiver consumes everything: every pending state has a reception.
  for (const auto& e : explore::blocked_channels(loop))
    CHECK(e.verdict == explore::BlockedEntry::Verdict::Free);

  // A receiver that only accepts the wrong symbol never executes a reception,
  // but the sender's frontier is budget-cut, so no definitive verdict.
  model::Protocol wrong = model::parse_protocol(
      "protocol wrong\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m k\nalphabet beta n\n"
      "machine 0 start a0\n"
      "trans 0 a0 -m@alpha a0\n"
      "machine 1 start b0\n"
      "trans 1 b0 +k@alpha b0\n");
  explore::Budget wb;
  wb.max_channel_len = 3;
  auto wentries = explore::blocked_channels(explore::reach(wrong, wb));
  REQUIRE_FALSE(wentries.empty());
  for (const auto& e : wentries) CHECK(e.verdict == explore::BlockedEntry::Verdict::Unknown);
}

TEST_CASE("half duplex checks") {
  CHECK(explore::half_duplex(explore::reach(gen::fixture("access"))).verdict ==
        explore::HalfDuplexResult::Verdict::Yes);

  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"));
  auto hd = explore::half_duplex(sg);
  REQUIRE(hd.verdict == explore::HalfDuplexResult::Verdict::No);
  REQUIRE(hd.counterexample.has_value());
  CHECK_FALSE(sg.states[*hd.counterexample].chans[0].empty());
  CHECK_FALSE(sg.states[*hd.counterexample].chans[1].empty());

  CHECK(explore::half_duplex(explore::reach(one_shot_protocol())).verdict ==
        explore::HalfDuplexResult::Verdict::No);

  // One-directional finite protocol: beta never used.
  model::Protocol oneway = model::parse_protocol(
      "protocol oneway\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m\nalphabet beta n\n"
      "machine 0 start a0\n"
      "trans 0 a0 -m@alpha a1\n"
      "machine 1 start b0\n"
      "trans 1 b0 +m@alpha b1\n");
  CHECK(explore::half_duplex(explore::reach(oneway)).verdict ==
        explore::HalfDuplexResult::Verdict::Yes);

  CHECK_THROWS_AS(explore::half_duplex(explore::reach(gen::fixture("counter"))),
                  std::invalid_argument);
}

TEST_CASE("channel bounds") {
  CHECK(explore::bounded_channels(explore::reach(gen::fixture("flowctl2"))).bound ==
        std::size_t(2));
  CHECK(explore::bounded_channels(explore::reach(gen::fixture("access"))).bound ==
        std::size_t(2));
  explore::Budget b;
  b.max_channel_len = 10;
  CHECK_FALSE(explore::bounded_channels(explore::reach(send_loop_protocol(), b)).bound.has_value());
}

TEST_CASE("determinism, incoming edges, and monotonicity") {
  explore::Budget b;
  b.max_total_len = 4;
  explore::StateGraph a = explore::reach(gen::fixture("flowctl2"), b);
  explore::StateGraph c = explore::reach(gen::fixture("flowctl2"), b);
  CHECK(a.states == c.states);
  CHECK(a.edges == c.edges);

  std::vector<bool> incoming(a.states.size(), false);
  incoming[0] = true;
  for (const auto& e : a.edges) incoming[e.to] = true;
  CHECK(std::all_of(incoming.begin(), incoming.end(), [](bool x) { return x; }));

  explore::Budget small, big;
  small.max_channel_len = 3;
  big.max_channel_len = 5;
  auto s1 = view_set(explore::reach(gen::fixture("counter"), small));
  auto s2 = view_set(explore::reach(gen::fixture("counter"), big));
  CHECK(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));

  explore::Budget t2, t4;
  t2.max_total_len = 2;
  t4.max_total_len = 4;
  auto f1 = view_set(explore::reach(gen::fixture("flowctl2"), t2));
  auto f2 = view_set(explore::reach(gen::fixture("flowctl2"), t4));
  CHECK(std::includes(f2.begin(), f2.end(), f1.begin(), f1.end()));
}

TEST_CASE("dot export is stable and complete") {
  explore::Budget b;
  b.max_channel_len = 3;
  explore::StateGraph sg = explore::reach(gen::fixture("counter"), b);
  std::string dot = explore::to_dot(sg);
  CHECK(dot == explore::to_dot(explore::reach(gen::fixture("counter"), b)));
  CHECK(dot.rfind("digraph states {\n", 0) == 0);
  CHECK(dot.find("  s0 [label=\"0 (00,10) alpha=eps beta=eps\"];\n") != std::string::npos);
  CHECK(dot.find("  s0 -> s1 [label=\"-d@alpha\"];\n") != std::string::npos);

  std::size_t nodeLines = 0, edgeLines = 0, pos = 0;
  for (std::string::size_type at; (at = dot.find('\n', pos)) != std::string::npos; pos = at + 1) {
    std::string line = dot.substr(pos, at - pos);
    if (line.find(" -> ") != std::string::npos)
      ++edgeLines;
    else if (line.find("[label=") != std::string::npos)
      ++nodeLines;
  }
  CHECK(nodeLines == sg.states.size());
  CHECK(edgeLines == sg.edges.size());

  // Multi-symbol contents join with dots.
  explore::StateGraph fg = explore::reach(gen::fixture("flowctl2"));
  std::string fdot = explore::to_dot(fg);
  CHECK(fdot.find("alpha=D_a.A_a") != std::string::npos);
}

TEST_CASE("replayed per-node images reconstruct path endpoints") {
  explore::StateGraph sg = explore::reach(gen::fixture("flowctl2"));

  // Enumerate a few short paths from the initial state.
  struct Path {
    std::vector<int> edges;
    int end;
  };
  std::vector<Path> paths;
  std::function<void(int, Path&)> walk = [&](int at, Path& cur) {
    if (paths.size() >= 40) return;
    if (cur.edges.size() == 5) {
      cur.end = at;
      paths.push_back(cur);
      return;
    }
    for (int ei : sg.out[at]) {
      cur.edges.push_back(ei);
      walk(sg.edges[ei].to, cur);
      cur.edges.pop_back();
      if (paths.size() >= 40) return;
    }
  };
  Path seed{{}, 0};
  walk(0, seed);
  REQUIRE(paths.size() >= 10);

  model::Index idx = sg.idx;
  for (const Path& path : paths) {
    // Per-node label sequences of the path.
    std::vector<std::vector<explore::Label>> img(sg.proto.nodes.size());
    for (int ei : path.edges) img[sg.edges[ei].label.node].push_back(sg.edges[ei].label);

    // Every complete interleaving of the images must end at the same state.
    std::set<explore::GlobalState> ends;
    std::function<void(const explore::GlobalState&, std::vector<std::size_t>&)> go =
        [&](const explore::GlobalState& g, std::vector<std::size_t>& posn) {
          bool done = true;
          for (std::size_t n = 0; n < img.size(); ++n) {
            if (posn[n] == img[n].size()) continue;
            done = false;
            const explore::Label& l = img[n][posn[n]];
            // Find the machine edge for this label at the current state.
            for (const auto& e : idx.out[n][g.comp[n]]) {
              if (e.send != l.send || e.symbol != l.symbol || e.channel != l.channel) continue;
              if (auto nx = explore::detail::apply(g, static_cast<int>(n), e)) {
                posn[n]++;
                go(*nx, posn);
                posn[n]--;
              }
              break;
            }
          }
          if (done) ends.insert(g);
        };
    std::vector<std::size_t> posn(img.size(), 0);
    go(sg.states[0], posn);
    REQUIRE(ends.size() == 1);
    CHECK(*ends.begin() == sg.states[path.end]);
  }
}

TEST_CASE("tag protocol deadlock matches halting") {
  model::Protocol halting = gen::tag_to_protocol(
      gen::parse_tag("tag\nprod a b b\nprod b a\nstart a a a\n"));
  explore::StateGraph hsg = explore::reach(halting);
  REQUIRE(hsg.exhausted);
  CHECK_FALSE(explore::deadlocks(hsg).states.empty());

  gen::TagSystem pad;
  pad.alphabet = {"m"};
  pad.productions["m"] = oracles::w("m m");
  pad.start = oracles::w("m m");
  explore::StateGraph csg = explore::reach(gen::tag_to_protocol(pad));
  REQUIRE(csg.exhausted);
  CHECK(explore::deadlocks(csg).states.empty());
}

TEST_CASE("affinization preserves deadlock at the initial state") {
  model::Protocol idle = model::parse_protocol(
      "protocol idle\n"
      "node 0\nnode 1\n"
      "channel alpha from 0 to 1\n"
      "channel beta from 1 to 0\n"
      "alphabet alpha m\nalphabet beta n\n"
      "machine 0 start a\n"
      "trans 0 a +n@beta a\n"
      "machine 1 start b\n"
      "trans 1 b +m@alpha b\n");
  model::Protocol aff = gen::affinize_deadlock(idle);
  explore::StateGraph sg = explore::reach(aff);
  auto dead = explore::deadlocks(sg);
  REQUIRE_FALSE(dead.states.empty());
  CHECK(dead.states[0] == 0);
}

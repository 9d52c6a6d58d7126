#include <doctest.h>

#include <algorithm>

#include "asearch/agents.hpp"
#include "oracles.hpp"

using namespace asearch;

namespace {

DecisionContext ctx_for(const SearchRegion& r) {
    DecisionContext c;
    c.region = &r;
    return c;
}

}  // namespace

TEST_CASE("coverage starts where it stands and sweeps new cells") {
    const SearchRegion r = oracle::square(5);
    const DecisionContext ctx = ctx_for(r);
    const GroundTruth truth = truth_from_cells(r, {});
    AgentState a(0, AgentKind::UGV, Algorithm::COVERAGE, Pose{r.index({4, 0}), Heading::N}, r.size(), 1);
    auto d = agent_decide(a, ctx);
    REQUIRE(d);
    CHECK(d->chosen.pose == Pose{r.index({4, 0}), Heading::N});
    CHECK(d->chosen.travel_cost == 0.0);
    CHECK_FALSE(d->wrap_around);
    CHECK(a.em_calls == 0);

    int steps = 0;
    while (std::count(a.visited.begin(), a.visited.end(), 0) > 0 && steps < 200) {
        d = agent_decide(a, ctx);
        REQUIRE(d);
        CHECK_FALSE(d->wrap_around);
        agent_observe(a, *d, truth, ctx, 0, 0.0);
        ++steps;
    }
    CHECK(std::count(a.visited.begin(), a.visited.end(), 0) == 0);
    d = agent_decide(a, ctx);
    REQUIRE(d);
    CHECK(d->wrap_around);
    CHECK_FALSE(d->chosen.pose == a.pose);
}

TEST_CASE("sampling policies run EM once per decision") {
    const SearchRegion r = oracle::square(6);
    const DecisionContext ctx = ctx_for(r);
    for (Algorithm alg : {Algorithm::GUTS, Algorithm::NATS}) {
        AgentState a(0, AgentKind::UGV, alg, Pose{0, Heading::S}, r.size(), 3);
        for (int k = 0; k < 3; ++k) REQUIRE(agent_decide(a, ctx));
        CHECK(a.em_calls == 3);
        CHECK(a.decisions == 3);
        CHECK(a.gamma.size() == 36);
    }
}

TEST_CASE("ground agents sense along the route and announce themselves") {
    const SearchRegion r = oracle::square(6);
    const DecisionContext ctx = ctx_for(r);
    const GroundTruth truth = truth_from_cells(r, {r.index({0, 5})});
    AgentState a(2, AgentKind::UGV, Algorithm::GUTS, Pose{r.index({5, 0}), Heading::N}, r.size(), 3);

    Decision d;
    d.chosen.action = ugv_fov(r, Pose{r.index({2, 3}), Heading::E});
    d.chosen.pose = Pose{r.index({2, 3}), Heading::E};
    d.path = traversal_path(r, a.pose.cell, d.chosen.pose.cell);
    REQUIRE(d.path);
    const std::size_t hops = d.path->cells.size() - 1;

    const ObserveResult res = agent_observe(a, d, truth, ctx, 4, 90.0);
    // One reading per intermediate cell plus the final action.
    CHECK(res.observations.size() == hops);
    CHECK(a.pose == d.chosen.pose);
    REQUIRE(res.outbox.size() == 2);
    CHECK(res.outbox[0].kind == MessageKind::LOCATION);
    CHECK(res.outbox[0].location.pose == d.chosen.pose);
    CHECK(res.outbox[0].location.time_s == 90.0);
    CHECK(res.outbox[1].kind == MessageKind::OBSERVATION);
    CHECK(res.outbox[1].observations == res.observations);
    CHECK(res.outbox[1].send_epoch == 4);
    CHECK(res.outbox[0].seq != res.outbox[1].seq);

    SufficientStats expect(r.size());
    for (const auto& o : res.observations) expect.add(o);
    CHECK(a.stats == expect);
    CHECK(res.observations.back().visible_cells == d.chosen.action.visible_cells);
}

TEST_CASE("delivery merges peers' data once") {
    const SearchRegion r = oracle::square(5);
    const DecisionContext ctx = ctx_for(r);
    const GroundTruth truth = truth_from_cells(r, {7});
    AgentState a(0, AgentKind::UGV, Algorithm::GUTS, Pose{20, Heading::N}, r.size(), 1);
    AgentState b(1, AgentKind::UGV, Algorithm::GUTS, Pose{24, Heading::N}, r.size(), 1);
    auto db = agent_decide(b, ctx);
    REQUIRE(db);
    const ObserveResult rb = agent_observe(b, *db, truth, ctx, 0, 0.0);

    agent_deliver(a, rb.outbox);
    agent_deliver(a, rb.outbox);  // a duplicate is ignored
    CHECK(a.stats == b.stats);
    REQUIRE(a.peers.count(1));
    CHECK(a.peers.at(1).pose == b.pose);

    // Own messages echoed back are ignored as well.
    agent_deliver(b, rb.outbox);
    CHECK(a.stats == b.stats);
}

TEST_CASE("an agent with nowhere to go is retired") {
    std::vector<double> cm(9, 1.0);
    cm[1] = cm[3] = cm[5] = cm[7] = SearchRegion::kImpassable;
    cm[0] = cm[2] = cm[6] = cm[8] = SearchRegion::kImpassable;
    const SearchRegion r = SearchRegion::build({{0, 0}, {90, 0}, {90, 90}, {0, 90}}, 30.0, cm);
    const DecisionContext ctx = ctx_for(r);
    // Boxed in at the centre: the only pose has views of walls only, which
    // still counts as sensing. A fully blocked start is not standable.
    AgentState a(0, AgentKind::UGV, Algorithm::GUTS, Pose{4, Heading::N}, r.size(), 1);
    const auto d = agent_decide(a, ctx);
    REQUIRE(d);
    CHECK(d->chosen.pose.cell == 4);

    std::vector<double> none(9, SearchRegion::kImpassable);
    const SearchRegion blocked = SearchRegion::build({{0, 0}, {90, 0}, {90, 90}, {0, 90}}, 30.0, none);
    const DecisionContext ctx2 = ctx_for(blocked);
    AgentState b(0, AgentKind::UGV, Algorithm::GUTS, Pose{4, Heading::N}, blocked.size(), 1);
    CHECK_FALSE(agent_decide(b, ctx2).has_value());
    CHECK_FALSE(b.alive);
    CHECK_FALSE(agent_decide(b, ctx2).has_value());
}

TEST_CASE("agents sharing a start still pick diverse first actions") {
    const SearchRegion r = oracle::square(8);
    const DecisionContext ctx = ctx_for(r);
    int differ = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        AgentState a(0, AgentKind::UGV, Algorithm::GUTS, Pose{r.index({7, 3}), Heading::N}, r.size(), seed);
        AgentState b(1, AgentKind::UGV, Algorithm::GUTS, Pose{r.index({7, 3}), Heading::N}, r.size(), seed);
        const auto da = agent_decide(a, ctx);
        const auto db = agent_decide(b, ctx);
        REQUIRE(da);
        REQUIRE(db);
        if (!(da->chosen.pose == db->chosen.pose)) ++differ;
    }
    CHECK(differ > 50);
}

TEST_CASE("recovery rule") {
    const SearchRegion r = oracle::square(3);
    const GroundTruth t = truth_from_cells(r, {1, 4});
    Posterior p;
    p.mu.assign(9, 0.0);
    p.mu[1] = 0.86;
    p.mu[4] = 0.7;
    p.mu[5] = 0.99;  // not an OOI
    CHECK(recovered_cells(p, t, 0.85) == std::vector<CellIndex>{1});
    CHECK(recovered_cells(p, t, 0.7) == std::vector<CellIndex>{1, 4});
    CHECK(recovered_cells(p, t, 1.01).empty());
}

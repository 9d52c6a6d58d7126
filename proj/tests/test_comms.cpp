#include <doctest.h>

#include <algorithm>

#include "asearch/comms.hpp"

using namespace asearch;

namespace {

Message obs_msg(AgentId origin, long long seq, long long epoch) {
    Message m;
    m.origin = origin;
    m.seq = seq;
    m.kind = MessageKind::OBSERVATION;
    m.send_epoch = epoch;
    m.observations.push_back(Observation{{1, 2}, {0.25, 0.5}, {0.1, 0.2}});
    return m;
}

Message loc_msg(AgentId origin, long long seq, long long epoch) {
    Message m;
    m.origin = origin;
    m.seq = seq;
    m.kind = MessageKind::LOCATION;
    m.send_epoch = epoch;
    m.location = {Pose{7, Heading::W}, 12.5};
    return m;
}

}  // namespace

TEST_CASE("perfect channel delivers to every other live agent") {
    MessageBus bus(3, keyed_delivery_draw(1));
    const std::vector<std::uint8_t> alive{1, 1, 1};
    const std::vector<Message> out{obs_msg(0, 0, 2), loc_msg(0, 1, 2)};
    bus.route(out, alive, CommsConfig{});
    CHECK(bus.collect(0, 10).empty());
    CHECK(bus.collect(1, 1).empty());
    const auto got = bus.collect(1, 2);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == out[0]);
    CHECK(got[1] == out[1]);
    CHECK(bus.collect(1, 2).empty());
    CHECK(bus.collect(2, 5).size() == 2);
    CHECK(bus.pending() == 0);
}

TEST_CASE("latency shifts arrival") {
    MessageBus bus(2, keyed_delivery_draw(1));
    CommsConfig cfg;
    cfg.latency_epochs = 3;
    const std::vector<std::uint8_t> alive{1, 1};
    bus.route(std::vector<Message>{obs_msg(0, 0, 4)}, alive, cfg);
    CHECK(bus.collect(1, 6).empty());
    CHECK(bus.collect(1, 7).size() == 1);
}

TEST_CASE("kind-specific loss, and drops are permanent") {
    CommsConfig cfg;
    cfg.p_deliver_obs = 0.0;
    cfg.p_deliver_loc = 1.0;
    MessageBus bus(2, keyed_delivery_draw(9), true);
    const std::vector<std::uint8_t> alive{1, 1};
    bus.route(std::vector<Message>{obs_msg(0, 0, 0), loc_msg(0, 1, 0)}, alive, cfg);
    const auto got = bus.collect(1, 100);
    REQUIRE(got.size() == 1);
    CHECK(got[0].kind == MessageKind::LOCATION);
    CHECK(bus.collect(1, 1000).empty());
    REQUIRE(bus.trace().size() == 2);
    CHECK_FALSE(bus.trace()[0].delivered);
    CHECK(bus.trace()[1].delivered);
}

TEST_CASE("delivery rate tracks the configured probability") {
    CommsConfig cfg;
    cfg.p_deliver_obs = 0.3;
    MessageBus bus(2, keyed_delivery_draw(4));
    const std::vector<std::uint8_t> alive{1, 1};
    std::vector<Message> out;
    for (int i = 0; i < 20000; ++i) out.push_back(obs_msg(0, i, 0));
    bus.route(out, alive, cfg);
    const double rate = static_cast<double>(bus.collect(1, 0).size()) / 20000.0;
    CHECK(rate == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("delivery outcome depends only on message identity and recipient") {
    const DeliveryDraw d = keyed_delivery_draw(42);
    const Message a = obs_msg(1, 5, 3);
    Message b = a;
    b.send_epoch = 9;
    b.observations.clear();
    CHECK(d(a, 2) == d(b, 2));
    CHECK(d(a, 2) != d(a, 3));
    CHECK(d(a, 2) != keyed_delivery_draw(43)(a, 2));

    CommsConfig cfg;
    cfg.p_deliver_obs = 0.5;
    const std::vector<std::uint8_t> alive{1, 1, 1, 1};
    std::vector<Message> msgs;
    for (int i = 0; i < 50; ++i) msgs.push_back(obs_msg(i % 3, i, 0));
    std::vector<Message> rev(msgs.rbegin(), msgs.rend());
    MessageBus b1(4, keyed_delivery_draw(7)), b2(4, keyed_delivery_draw(7));
    b1.route(msgs, alive, cfg);
    b2.route(rev, alive, cfg);
    for (AgentId r = 0; r < 4; ++r) CHECK(b1.collect(r, 0) == b2.collect(r, 0));
}

TEST_CASE("dead agents receive nothing") {
    MessageBus bus(3, keyed_delivery_draw(1));
    const std::vector<std::uint8_t> alive{1, 0, 1};
    bus.route(std::vector<Message>{obs_msg(0, 0, 0)}, alive, CommsConfig{});
    CHECK(bus.collect(1, 5).empty());
    CHECK(bus.collect(2, 5).size() == 1);
}

TEST_CASE("duplicate delivery doubles the inbox") {
    CommsConfig cfg;
    cfg.duplicate_delivery = true;
    MessageBus bus(2, keyed_delivery_draw(1));
    const std::vector<std::uint8_t> alive{1, 1};
    bus.route(std::vector<Message>{obs_msg(0, 0, 0)}, alive, cfg);
    CHECK(bus.collect(1, 0).size() == 2);
}

TEST_CASE("failure schedule") {
    CommsConfig cfg;
    cfg.failure_schedule = {{1, 5}, {0, 8}, {7, 1}};
    std::vector<std::uint8_t> alive{1, 1, 1};
    CHECK(apply_failures(alive, 4, cfg).empty());
    CHECK(apply_failures(alive, 5, cfg) == std::vector<AgentId>{1});
    CHECK(apply_failures(alive, 6, cfg).empty());
    CHECK(apply_failures(alive, 20, cfg) == std::vector<AgentId>{0});
    CHECK(alive == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("config validation") {
    CommsConfig c;
    CHECK_NOTHROW(c.validate());
    c.p_deliver_obs = 1.5;
    CHECK_THROWS(c.validate());
    c = CommsConfig{};
    c.latency_epochs = -1;
    CHECK_THROWS(c.validate());
    c = CommsConfig{};
    c.failure_schedule = {{-1, 2}};
    CHECK_THROWS(c.validate());
}

TEST_CASE("messages round trip through JSON") {
    for (const Message& m : {obs_msg(3, 11, 4), loc_msg(2, 0, 1)}) {
        CHECK(message_from_json(message_to_json(m)) == m);
        CHECK(message_from_json(nlohmann::json::parse(message_to_json(m).dump())) == m);
    }
    CHECK_THROWS(message_from_json(nlohmann::json{{"origin", 1}}));
}

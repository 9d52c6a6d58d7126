#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asearch/grid_world.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

using AgentId = int;

struct FailureEvent {
    AgentId agent = 0;
    long long epoch = 0;
};

struct CommsConfig {
    double p_deliver_obs = 1.0;
    double p_deliver_loc = 1.0;
    int latency_epochs = 0;
    std::vector<FailureEvent> failure_schedule;
    // Deliver every accepted message twice (at-least-once experiments).
    bool duplicate_delivery = false;

    void validate() const;
};

enum class MessageKind : std::uint8_t { LOCATION, OBSERVATION };

struct LocationPayload {
    Pose pose;
    double time_s = 0.0;
    friend bool operator==(const LocationPayload&, const LocationPayload&) = default;
};

struct Message {
    AgentId origin = 0;
    long long seq = 0;
    MessageKind kind = MessageKind::LOCATION;
    long long send_epoch = 0;
    LocationPayload location;               // LOCATION
    std::vector<Observation> observations;  // OBSERVATION

    friend bool operator==(const Message&, const Message&) = default;
};

nlohmann::json message_to_json(const Message& m);
Message message_from_json(const nlohmann::json& j);

// Uniform [0,1) draw deciding whether `m` reaches `recipient`.
using DeliveryDraw = std::function<double(const Message& m, AgentId recipient)>;

// Draw keyed only by (seed, origin, seq, recipient), so outcomes do not depend
// on the order in which messages or agents are processed.
DeliveryDraw keyed_delivery_draw(std::uint64_t seed);

struct TraceEntry {
    AgentId origin;
    long long seq;
    MessageKind kind;
    AgentId recipient;
    long long send_epoch;
    long long arrival_epoch;
    bool delivered;
};

// Lossy broadcast channel between agents. Drops are permanent.
class MessageBus {
   public:
    MessageBus(int num_agents, DeliveryDraw draw, bool keep_trace = false);

    // Schedules each message for every other live agent with its kind's
    // probability, arriving at send_epoch + latency.
    void route(std::span<const Message> messages, std::span<const std::uint8_t> alive,
               const CommsConfig& cfg);

    // Removes and returns the messages for `agent` that have arrived by `epoch`,
    // in (arrival, origin, seq) order.
    std::vector<Message> collect(AgentId agent, long long epoch);

    std::size_t pending() const;
    const std::vector<TraceEntry>& trace() const { return trace_; }

   private:
    struct Pending {
        long long arrival;
        Message msg;
    };
    std::vector<std::vector<Pending>> inbox_;
    DeliveryDraw draw_;
    bool keep_trace_;
    std::vector<TraceEntry> trace_;
};

// Marks agents scheduled to fail at or before `epoch` as dead. Returns the ids
// that changed state.
std::vector<AgentId> apply_failures(std::span<std::uint8_t> alive, long long epoch,
                                    const CommsConfig& cfg);

nlohmann::json trace_to_json(std::span<const TraceEntry> trace);

}  // namespace asearch

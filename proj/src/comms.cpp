#include "asearch/comms.hpp"

#include <algorithm>
#include <stdexcept>

#include "asearch/rng.hpp"

namespace asearch {

void CommsConfig::validate() const {
    if (!(p_deliver_obs >= 0.0 && p_deliver_obs <= 1.0 && p_deliver_loc >= 0.0 &&
          p_deliver_loc <= 1.0))
        throw std::invalid_argument("comms: delivery probabilities must lie in [0, 1]");
    if (latency_epochs < 0) throw std::invalid_argument("comms: latency must be >= 0");
    for (const auto& f : failure_schedule)
        if (f.agent < 0 || f.epoch < 0)
            throw std::invalid_argument("comms: failure events need agent >= 0 and epoch >= 0");
}

namespace {

const char* kind_name(MessageKind k) { return k == MessageKind::LOCATION ? "LOCATION" : "OBSERVATION"; }

MessageKind kind_from_name(const std::string& s) {
    if (s == "LOCATION") return MessageKind::LOCATION;
    if (s == "OBSERVATION") return MessageKind::OBSERVATION;
    throw std::invalid_argument("unknown message kind '" + s + "'");
}

}  // namespace

nlohmann::json message_to_json(const Message& m) {
    nlohmann::json j;
    j["origin"] = m.origin;
    j["seq"] = m.seq;
    j["kind"] = kind_name(m.kind);
    j["send_epoch"] = m.send_epoch;
    if (m.kind == MessageKind::LOCATION) {
        j["pose"] = {{"cell", m.location.pose.cell}, {"heading", to_string(m.location.pose.heading)}};
        j["time_s"] = m.location.time_s;
    } else {
        nlohmann::json obs = nlohmann::json::array();
        for (const auto& o : m.observations)
            obs.push_back({{"cells", o.visible_cells}, {"y", o.y}, {"var", o.noise_var}});
        j["observations"] = std::move(obs);
    }
    return j;
}

Message message_from_json(const nlohmann::json& j) {
    Message m;
    m.origin = j.at("origin").get<AgentId>();
    m.seq = j.at("seq").get<long long>();
    m.kind = kind_from_name(j.at("kind").get<std::string>());
    m.send_epoch = j.at("send_epoch").get<long long>();
    if (m.kind == MessageKind::LOCATION) {
        m.location.pose.cell = j.at("pose").at("cell").get<CellIndex>();
        m.location.pose.heading = heading_from_string(j.at("pose").at("heading").get<std::string>());
        m.location.time_s = j.at("time_s").get<double>();
    } else {
        for (const auto& o : j.at("observations")) {
            Observation ob;
            ob.visible_cells = o.at("cells").get<std::vector<CellIndex>>();
            ob.y = o.at("y").get<std::vector<double>>();
            ob.noise_var = o.at("var").get<std::vector<double>>();
            m.observations.push_back(std::move(ob));
        }
    }
    return m;
}

DeliveryDraw keyed_delivery_draw(std::uint64_t seed) {
    return [seed](const Message& m, AgentId recipient) {
        std::uint64_t h = splitmix64(seed ^ stream_tag::kBus);
        h = splitmix64(h ^ static_cast<std::uint64_t>(m.origin));
        h = splitmix64(h ^ static_cast<std::uint64_t>(m.seq));
        h = splitmix64(h ^ static_cast<std::uint64_t>(recipient));
        return unit_from_bits(h);
    };
}

MessageBus::MessageBus(int num_agents, DeliveryDraw draw, bool keep_trace)
    : inbox_(static_cast<std::size_t>(num_agents)), draw_(std::move(draw)), keep_trace_(keep_trace) {}

void MessageBus::route(std::span<const Message> messages, std::span<const std::uint8_t> alive,
                       const CommsConfig& cfg) {
    for (const Message& m : messages) {
        const double p = m.kind == MessageKind::OBSERVATION ? cfg.p_deliver_obs : cfg.p_deliver_loc;
        const long long arrival = m.send_epoch + cfg.latency_epochs;
        for (AgentId r = 0; r < static_cast<AgentId>(inbox_.size()); ++r) {
            if (r == m.origin) continue;
            if (!alive[static_cast<std::size_t>(r)]) continue;
            const bool ok = draw_(m, r) < p;
            if (keep_trace_)
                trace_.push_back({m.origin, m.seq, m.kind, r, m.send_epoch, arrival, ok});
            if (!ok) continue;
            auto& box = inbox_[static_cast<std::size_t>(r)];
            box.push_back({arrival, m});
            if (cfg.duplicate_delivery) box.push_back({arrival, m});
        }
    }
}

std::vector<Message> MessageBus::collect(AgentId agent, long long epoch) {
    auto& box = inbox_[static_cast<std::size_t>(agent)];
    auto split = std::stable_partition(box.begin(), box.end(),
                                       [epoch](const Pending& p) { return p.arrival > epoch; });
    std::vector<Pending> ready(std::make_move_iterator(split), std::make_move_iterator(box.end()));
    box.erase(split, box.end());
    std::stable_sort(ready.begin(), ready.end(), [](const Pending& a, const Pending& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.msg.origin != b.msg.origin) return a.msg.origin < b.msg.origin;
        return a.msg.seq < b.msg.seq;
    });
    std::vector<Message> out;
    out.reserve(ready.size());
    for (auto& p : ready) out.push_back(std::move(p.msg));
    return out;
}

std::size_t MessageBus::pending() const {
    std::size_t n = 0;
    for (const auto& b : inbox_) n += b.size();
    return n;
}

std::vector<AgentId> apply_failures(std::span<std::uint8_t> alive, long long epoch,
                                    const CommsConfig& cfg) {
    std::vector<AgentId> changed;
    for (const auto& f : cfg.failure_schedule) {
        if (f.epoch > epoch) continue;
        if (f.agent < 0 || static_cast<std::size_t>(f.agent) >= alive.size()) continue;
        auto& a = alive[static_cast<std::size_t>(f.agent)];
        if (a) {
            a = 0;
            changed.push_back(f.agent);
        }
    }
    std::sort(changed.begin(), changed.end());
    return changed;
}

nlohmann::json trace_to_json(std::span<const TraceEntry> trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trace)
        arr.push_back({{"origin", t.origin},
                       {"seq", t.seq},
                       {"kind", kind_name(t.kind)},
                       {"recipient", t.recipient},
                       {"send_epoch", t.send_epoch},
                       {"arrival_epoch", t.arrival_epoch},
                       {"delivered", t.delivered}});
    return arr;
}

}  // namespace asearch

#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "asearch/comms.hpp"
#include "asearch/grid_world.hpp"
#include "asearch/planner.hpp"
#include "asearch/posterior.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

// Everything an agent needs besides its own state; shared read-only.
struct DecisionContext {
    const SearchRegion* region = nullptr;
    RewardConfig reward;
    NoiseConfig noise;
    SblHyper hyper;
};

struct AgentState {
    AgentId id = 0;
    AgentKind kind = AgentKind::UGV;
    Algorithm policy = Algorithm::GUTS;
    Pose pose;
    bool alive = true;

    SufficientStats stats;
    std::vector<double> gamma;  // warm start for the next EM
    std::set<std::pair<AgentId, long long>> seen;  // (origin, seq) already ingested
    std::vector<Message> log;   // own and delivered observation messages
    std::map<AgentId, LocationPayload> peers;
    std::vector<std::uint8_t> visited;

    Rng decide_rng;
    Rng sense_rng;
    long long next_seq = 0;
    int decisions = 0;
    int em_calls = 0;  // EM runs made by the policy itself

    AgentState(AgentId id, AgentKind kind, Algorithm policy, Pose start, int num_cells,
               std::uint64_t episode_seed);
};

struct Decision {
    Candidate chosen;
    std::optional<Path> path;  // UGV route to the chosen pose
    std::size_t num_candidates = 0;
    bool wrap_around = false;  // coverage found nothing unvisited
};

// Chooses the next sensing action. Returns nullopt (and marks the agent dead)
// when the agent has no reachable action.
std::optional<Decision> agent_decide(AgentState& state, const DecisionContext& ctx);

struct ObserveResult {
    std::vector<Observation> observations;
    std::vector<Message> outbox;  // one LOCATION then one OBSERVATION
};

// Executes `decision`: moves the agent, senses along the way, ingests locally,
// and prepares outgoing messages stamped with `send_epoch`.
ObserveResult agent_observe(AgentState& state, const Decision& decision, const GroundTruth& truth,
                            const DecisionContext& ctx, long long send_epoch, double arrival_s);

// Ingests delivered messages, skipping any (origin, seq) already seen.
void agent_deliver(AgentState& state, std::span<const Message> inbox);

// OOI cells whose posterior mean reaches `threshold`.
std::vector<CellIndex> recovered_cells(const Posterior& post, const GroundTruth& truth,
                                       double threshold);

}  // namespace asearch

#include "asearch/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace asearch {

AgentState::AgentState(AgentId id_, AgentKind kind_, Algorithm policy_, Pose start, int num_cells,
                       std::uint64_t episode_seed)
    : id(id_),
      kind(kind_),
      policy(policy_),
      pose(start),
      stats(num_cells),
      visited(static_cast<std::size_t>(num_cells), 0),
      decide_rng(make_stream(episode_seed, {stream_tag::kAgentDecide, static_cast<std::uint64_t>(id_)})),
      sense_rng(make_stream(episode_seed, {stream_tag::kAgentSense, static_cast<std::uint64_t>(id_)})) {}

namespace {

std::optional<Decision> coverage_decide(AgentState& state, const DecisionContext& ctx) {
    std::vector<Candidate> all =
        enumerate_all_candidates(*ctx.region, state.kind, state.pose, ctx.noise);
    if (all.empty()) return std::nullopt;

    const auto sees_unvisited = [&state](const Candidate& c) {
        return std::any_of(c.action.visible_cells.begin(), c.action.visible_cells.end(),
                           [&state](CellIndex m) { return !state.visited[static_cast<std::size_t>(m)]; });
    };
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!sees_unvisited(all[i])) continue;
        if (!best || tie_break_less(all[i], all[*best])) best = i;
    }
    bool wrapped = false;
    if (!best) {
        // Everything seen: revisit the nearest other pose.
        wrapped = true;
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (all[i].pose == state.pose && all.size() > 1) continue;
            if (!best || tie_break_less(all[i], all[*best])) best = i;
        }
    }
    Decision d;
    d.num_candidates = all.size();
    d.wrap_around = wrapped;
    d.chosen = std::move(all[*best]);
    return d;
}

std::optional<Decision> sampling_decide(AgentState& state, const DecisionContext& ctx) {
    RewardConfig cfg = ctx.reward;
    cfg.algorithm = state.policy;

    const Posterior post = run_em(state.stats, ctx.hyper, state.gamma);
    ++state.em_calls;
    state.gamma = post.gamma;
    const std::vector<double> beta_tilde = sample_beta(post, state.decide_rng);

    std::vector<Candidate> cands =
        enumerate_candidates(*ctx.region, state.kind, state.pose, cfg, ctx.noise, state.decide_rng);
    if (cands.empty()) return std::nullopt;
    const std::size_t best =
        select_action(cands, beta_tilde, state.stats, post.gamma, cfg, &state.decide_rng);
    Decision d;
    d.num_candidates = cands.size();
    d.chosen = std::move(cands[best]);
    return d;
}

}  // namespace

std::optional<Decision> agent_decide(AgentState& state, const DecisionContext& ctx) {
    if (!state.alive) return std::nullopt;
    if (state.gamma.empty()) state.gamma.assign(state.stats.precision_diag.size(), ctx.hyper.prior_gamma());

    std::optional<Decision> d = state.policy == Algorithm::COVERAGE ? coverage_decide(state, ctx)
                                                                    : sampling_decide(state, ctx);
    if (!d) {
        state.alive = false;
        return std::nullopt;
    }
    if (state.kind == AgentKind::UGV) {
        d->path = traversal_path(*ctx.region, state.pose.cell, d->chosen.pose.cell);
        if (!d->path) {
            state.alive = false;
            return std::nullopt;
        }
    }
    ++state.decisions;
    return d;
}

namespace {

Heading heading_between(const SearchRegion& region, CellIndex from, CellIndex to) {
    const GridCoord a = region.coord(from);
    const GridCoord b = region.coord(to);
    if (b.row < a.row) return Heading::N;
    if (b.row > a.row) return Heading::S;
    return b.col > a.col ? Heading::E : Heading::W;
}

void mark_visited(AgentState& state, const Observation& o) {
    for (CellIndex m : o.visible_cells) state.visited[static_cast<std::size_t>(m)] = 1;
}

}  // namespace

ObserveResult agent_observe(AgentState& state, const Decision& decision, const GroundTruth& truth,
                            const DecisionContext& ctx, long long send_epoch, double arrival_s) {
    ObserveResult out;
    if (!state.alive) return out;
    const SearchRegion& region = *ctx.region;

    std::vector<SensingAction> actions;
    if (state.kind == AgentKind::UGV && decision.path && decision.path->cells.size() > 2) {
        // Poses strictly between start and goal, facing the direction of travel.
        const auto& cells = decision.path->cells;
        for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
            SensingAction a = ugv_fov(region, Pose{cells[i], heading_between(region, cells[i - 1], cells[i])});
            if (!a.empty()) actions.push_back(std::move(a));
        }
    }
    actions.push_back(decision.chosen.action);

    for (const auto& a : actions) {
        Observation o = synthesize_observation(truth, a, ctx.noise, state.sense_rng);
        state.stats.add(o);
        mark_visited(state, o);
        out.observations.push_back(std::move(o));
    }
    state.pose = decision.chosen.pose;

    Message loc;
    loc.origin = state.id;
    loc.seq = state.next_seq++;
    loc.kind = MessageKind::LOCATION;
    loc.send_epoch = send_epoch;
    loc.location = {state.pose, arrival_s};

    Message obs;
    obs.origin = state.id;
    obs.seq = state.next_seq++;
    obs.kind = MessageKind::OBSERVATION;
    obs.send_epoch = send_epoch;
    obs.observations = out.observations;

    state.seen.insert({loc.origin, loc.seq});
    state.seen.insert({obs.origin, obs.seq});
    state.log.push_back(obs);
    out.outbox.push_back(std::move(loc));
    out.outbox.push_back(std::move(obs));
    return out;
}

void agent_deliver(AgentState& state, std::span<const Message> inbox) {
    if (!state.alive) return;
    for (const Message& m : inbox) {
        if (!state.seen.insert({m.origin, m.seq}).second) continue;
        if (m.kind == MessageKind::LOCATION) {
            state.peers[m.origin] = m.location;
            continue;
        }
        for (const auto& o : m.observations) {
            state.stats.add(o);
            mark_visited(state, o);
        }
        state.log.push_back(m);
    }
}

std::vector<CellIndex> recovered_cells(const Posterior& post, const GroundTruth& truth,
                                       double threshold) {
    std::vector<CellIndex> out;
    for (CellIndex m : truth.ooi_cells)
        if (post.mu[static_cast<std::size_t>(m)] >= threshold) out.push_back(m);
    return out;
}

}  // namespace asearch

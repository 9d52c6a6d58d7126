#include "asearch/episode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace asearch {

namespace {

constexpr long long kMaxEpochs = 10'000'000;

std::vector<double> threshold_list(const Scenario& s) {
    std::vector<double> t{s.recovery_threshold};
    for (double x : s.sensitivity_thresholds) t.push_back(x);
    return t;
}

}  // namespace

EpisodeLog run_episode(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    const SearchRegion region = scenario.build_region();

    GroundTruth truth;
    if (!scenario.ooi_cells.empty()) {
        std::vector<CellIndex> cells;
        for (const auto& c : scenario.ooi_cells) cells.push_back(region.index(c));
        truth = truth_from_cells(region, std::move(cells));
    } else {
        Rng truth_rng = make_stream(seed, {stream_tag::kTruth});
        truth = place_oois(region, scenario.ooi_count, truth_rng);
    }

    DecisionContext ctx;
    ctx.region = &region;
    ctx.reward = scenario.reward;
    ctx.noise = scenario.noise;
    ctx.hyper = scenario.hyper;

    const int team_size = static_cast<int>(scenario.team.size());
    std::vector<AgentState> agents;
    agents.reserve(scenario.team.size());
    for (AgentId i = 0; i < team_size; ++i) {
        const auto& t = scenario.team[static_cast<std::size_t>(i)];
        agents.emplace_back(i, t.kind, t.policy, Pose{region.index(t.launch), t.heading}, region.size(), seed);
    }
    std::vector<std::uint8_t> alive(agents.size(), 1);
    std::vector<double> ready_at(agents.size(), 0.0);
    MessageBus bus(team_size, keyed_delivery_draw(seed), scenario.trace_messages);

    EpisodeLog log;
    log.scenario = scenario.name;
    log.algorithm = scenario.team_label();
    log.seed = seed;
    log.team_size = team_size;
    log.ooi_cells = truth.ooi_cells;
    log.thresholds = threshold_list(scenario);
    log.recovered.assign(log.thresholds.size(), {});
    std::vector<std::vector<std::uint8_t>> recovered_mask(
        log.thresholds.size(), std::vector<std::uint8_t>(static_cast<std::size_t>(region.size()), 0));

    const double eps = scenario.timing.epoch_seconds;
    const int budget = scenario.budget.max_decisions_per_agent;

    for (long long epoch = 0;; ++epoch) {
        for (AgentId id : apply_failures(alive, epoch, scenario.comms))
            agents[static_cast<std::size_t>(id)].alive = false;
        if (std::none_of(alive.begin(), alive.end(), [](std::uint8_t a) { return a != 0; })) {
            log.termination = "all_failed";
            break;
        }
        const double now = static_cast<double>(epoch) * eps;
        if (scenario.budget.max_sim_seconds > 0.0 && now >= scenario.budget.max_sim_seconds) {
            log.termination = "time_budget";
            break;
        }
        if (epoch >= kMaxEpochs) {
            log.termination = "epoch_cap";
            break;
        }

        std::vector<Message> outbox;
        bool work_left = false;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentState& a = agents[i];
            if (!alive[i] || a.decisions >= budget) continue;
            work_left = true;
            if (ready_at[i] > now) continue;

            const std::vector<Message> inbox = bus.collect(a.id, epoch);
            agent_deliver(a, inbox);

            const std::optional<Decision> d = agent_decide(a, ctx);
            if (!d) {
                alive[i] = 0;
                continue;
            }
            const double speed = a.kind == AgentKind::UGV ? scenario.timing.ugv_speed_mps
                                                          : scenario.timing.uav_speed_mps;
            const double arrival = now + d->chosen.travel_length_m / speed;
            ready_at[i] = arrival;
            const long long send_epoch = std::max(epoch, static_cast<long long>(std::floor(arrival / eps)));
            ObserveResult res = agent_observe(a, *d, truth, ctx, send_epoch, arrival);
            for (auto& m : res.outbox) outbox.push_back(std::move(m));

            DecisionRecord rec;
            rec.agent = a.id;
            rec.epoch = epoch;
            rec.sim_time_s = now;
            rec.arrival_s = arrival;
            rec.kind = a.kind;
            rec.target = d->chosen.pose.cell;
            rec.heading = d->chosen.pose.heading;
            rec.q = static_cast<int>(d->chosen.action.size());
            for (const auto& o : res.observations) rec.observed_cells += static_cast<int>(o.size());
            rec.reward = d->chosen.reward;
            rec.travel_cost = d->chosen.travel_cost;
            rec.num_candidates = d->num_candidates;
            rec.wrap_around = d->wrap_around;

            // Scoring uses a fresh EM over the agent's dataset, independent of
            // whatever the policy computes.
            const Posterior eval = run_em(a.stats, scenario.hyper);
            for (std::size_t t = 0; t < log.thresholds.size(); ++t) {
                for (CellIndex m : recovered_cells(eval, truth, log.thresholds[t])) {
                    auto& flag = recovered_mask[t][static_cast<std::size_t>(m)];
                    if (flag) continue;
                    flag = 1;
                    log.recovered[t].push_back(m);
                    if (t == 0) rec.newly_recovered.push_back(m);
                }
            }
            rec.recovered_total = static_cast<int>(log.recovered[0].size());
            log.records.push_back(std::move(rec));
        }
        bus.route(outbox, alive, scenario.comms);

        if (log.num_oois() > 0 && log.found() == log.num_oois()) {
            log.termination = "all_recovered";
            break;
        }
        if (!work_left) {
            log.termination = "budget";
            break;
        }
    }

    for (auto& r : log.recovered) std::sort(r.begin(), r.end());
    for (const auto& rec : log.records) log.final_sim_time_s = std::max(log.final_sim_time_s, rec.arrival_s);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        AgentSummary s;
        s.id = a.id;
        s.kind = to_string(a.kind);
        s.policy = to_string(a.policy);
        s.alive = alive[i] != 0;
        s.decisions = a.decisions;
        s.em_calls = a.em_calls;
        s.posterior = run_em(a.stats, scenario.hyper);
        log.agents.push_back(std::move(s));
    }
    log.message_trace = bus.trace();
    return log;
}

std::vector<EpisodeLog> run_sweep(const Scenario& scenario, std::span<const Algorithm> algorithms,
                                  std::span<const std::uint64_t> seeds, int jobs) {
    scenario.validate();
    std::vector<Scenario> variants;
    for (Algorithm a : algorithms) {
        variants.push_back(scenario);
        variants.back().set_algorithm(a);
    }
    const std::size_t total = variants.size() * seeds.size();
    std::vector<EpisodeLog> logs(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                logs[k] = run_episode(variants[k / seeds.size()], seeds[k % seeds.size()]);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, total)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return logs;
}

nlohmann::ordered_json episode_to_json(const EpisodeLog& log) {
    nlohmann::ordered_json j;
    j["scenario"] = log.scenario;
    j["algorithm"] = log.algorithm;
    j["seed"] = log.seed;
    j["team_size"] = log.team_size;
    j["ooi_cells"] = log.ooi_cells;
    j["termination"] = log.termination;
    j["total_decisions"] = log.total_decisions();
    j["found"] = log.found();
    j["success"] = log.success();
    j["final_sim_time_s"] = log.final_sim_time_s;
    j["thresholds"] = log.thresholds;
    j["recovered"] = log.recovered;
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const auto& r : log.records) {
        nlohmann::ordered_json o;
        o["agent"] = r.agent;
        o["epoch"] = r.epoch;
        o["sim_time_s"] = r.sim_time_s;
        o["arrival_s"] = r.arrival_s;
        o["kind"] = to_string(r.kind);
        o["target"] = r.target;
        o["heading"] = to_string(r.heading);
        o["q"] = r.q;
        o["observed_cells"] = r.observed_cells;
        o["reward"] = r.reward;
        o["travel_cost"] = r.travel_cost;
        o["candidates"] = r.num_candidates;
        o["wrap_around"] = r.wrap_around;
        o["newly_recovered"] = r.newly_recovered;
        o["recovered_total"] = r.recovered_total;
        recs.push_back(std::move(o));
    }
    j["records"] = std::move(recs);
    nlohmann::ordered_json ags = nlohmann::ordered_json::array();
    for (const auto& a : log.agents) {
        nlohmann::ordered_json o;
        o["id"] = a.id;
        o["kind"] = a.kind;
        o["policy"] = a.policy;
        o["alive"] = a.alive;
        o["decisions"] = a.decisions;
        o["em_calls"] = a.em_calls;
        o["posterior"] = {{"mu", a.posterior.mu}, {"v", a.posterior.v_diag}, {"gamma", a.posterior.gamma}};
        ags.push_back(std::move(o));
    }
    j["agents"] = std::move(ags);
    if (!log.message_trace.empty()) j["message_trace"] = trace_to_json(log.message_trace);
    return j;
}

std::string episode_to_string(const EpisodeLog& log) { return episode_to_json(log).dump(1); }

}  // namespace asearch

#include "vodswarm/simulation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vodswarm/bandwidth.hpp"

namespace vodswarm {

struct Simulation::Peer {
    Peer(PeerId id_, bool seed_, PieceMap map, std::uint64_t run_seed)
        : id(id_),
          seed(seed_),
          pieces(std::move(map)),
          behavior_rng(run_seed, StreamName::Behavior, id_),
          action_rng(run_seed, StreamName::ActionSample, id_) {}

    PeerId id;
    bool seed;
    PieceMap pieces;
    ChokeState choke;
    RateEstimator estimator;
    UnchokeOrder unchokers;
    RequestLedger ledger;
    std::map<PeerId, FlowId> inbound;   // keyed by sender
    std::set<FlowId> outbound;
    std::optional<ClientSession> session;
    RngStream behavior_rng;
    RngStream action_rng;
    bool departing = false;
};

Simulation::Simulation(ScenarioConfig cfg, std::uint64_t run_seed, SimulationObserver* observer)
    : cfg_(std::move(cfg)),
      seed_(run_seed),
      observer_(observer),
      optimistic_rng_(run_seed, StreamName::OptimisticChoice),
      tie_rng_(run_seed, StreamName::TieBreak) {
    cfg_.validate();
    geometry_ = cfg_.geometry();
    t_ = cfg_.pieces();
    blocks_per_piece_ = cfg_.blocks_per_piece();
    replicas_.assign(t_ + 1, 0);

    auto seed_peer = std::make_unique<Peer>(kSeedId, true, PieceMap::full(t_, blocks_per_piece_),
                                            run_seed);
    peers_.emplace(kSeedId, std::move(seed_peer));
    for (PieceIndex p = 1; p <= t_; ++p) replicas_[p] = 1;
    scheduler_.schedule(EventKind::SessionAdmission, 0.0, kSeedId);

    for (std::uint32_t i = 0; i < cfg_.leechers(); ++i) add_leecher(true);
}

Simulation::~Simulation() = default;

Simulation::Peer& Simulation::peer(PeerId id) { return *peers_.at(id); }
const Simulation::Peer& Simulation::peer(PeerId id) const { return *peers_.at(id); }

Simulation::Peer* Simulation::find_peer(PeerId id) {
    auto it = peers_.find(id);
    return it == peers_.end() ? nullptr : it->second.get();
}

std::vector<PeerId> Simulation::peer_ids() const {
    std::vector<PeerId> ids;
    for (const auto& [id, p] : peers_) ids.push_back(id);
    return ids;
}

bool Simulation::is_seed(PeerId id) const { return peer(id).seed; }
const PieceMap& Simulation::pieces(PeerId id) const { return peer(id).pieces; }
const ChokeState& Simulation::choke_state(PeerId id) const { return peer(id).choke; }
const UnchokeOrder& Simulation::unchokers(PeerId id) const { return peer(id).unchokers; }
const RequestLedger& Simulation::ledger(PeerId id) const { return peer(id).ledger; }

const ClientSession* Simulation::session(PeerId id) const {
    const auto& s = peer(id).session;
    return s ? &*s : nullptr;
}

std::vector<FlowSnapshot> Simulation::flows() const {
    std::vector<FlowSnapshot> out;
    for (const auto& [id, f] : flows_) {
        out.push_back({id, f.src, f.dst, f.piece, f.bytes_remaining, f.rate});
    }
    return out;
}

double Simulation::stagger(PeerId id) const {
    constexpr double kGolden = 0.6180339887498949;
    const double frac = std::fmod(static_cast<double>(id) * kGolden, 1.0);
    return frac * cfg_.setting.delta;
}

PeerId Simulation::add_leecher(bool warmup) {
    const PeerId id = next_peer_++;
    auto p = std::make_unique<Peer>(id, false, PieceMap(t_, blocks_per_piece_), seed_);
    p->session.emplace(id, t_, cfg_.window(), scheduler_.now(), warmup);
    peers_.emplace(id, std::move(p));
    scheduler_.schedule(EventKind::SessionAdmission, scheduler_.now(), id);
    return id;
}

std::uint64_t Simulation::run_until(SimTime horizon) {
    try {
        return scheduler_.run_until(horizon, [this](const Event& ev) { dispatch(ev); });
    } catch (const std::exception& e) {
        throw SimulationFault(fmt::format("run seed {} failed at event #{} (t = {}): {}", seed_,
                                          scheduler_.current_seq(), scheduler_.now(), e.what()));
    }
}

void Simulation::dispatch(const Event& ev) {
    settle();
    if (ev.kind == EventKind::TransferComplete) {
        on_transfer_complete(ev.target, ev.generation);
    } else if (Peer* p = find_peer(ev.peer); p != nullptr && !p->departing) {
        switch (ev.kind) {
            case EventKind::SessionAdmission: on_admission(*p); break;
            case EventKind::UnchokeInterval: on_regular_interval(*p); break;
            case EventKind::OptimisticInterval: on_optimistic_interval(*p); break;
            case EventKind::BehaviorEvent: on_behavior_event(*p, ev.generation); break;
            case EventKind::PauseExpiry: on_pause_expiry(*p, ev.generation); break;
            case EventKind::PlaybackBoundary: on_playback_boundary(*p, ev.generation); break;
            case EventKind::TransferComplete: break;
        }
    }
    process_departures();
    if (rates_dirty_) recompute_rates();
    if (observer_ != nullptr) observer_->on_dispatch(ev, *this);
}

void Simulation::settle() {
    const SimTime now = scheduler_.now();
    const double dt = now - settled_at_;
    settled_at_ = now;
    if (dt <= 0.0) return;
    for (auto& [id, f] : flows_) {
        const double moved = std::min(f.rate * dt, f.bytes_remaining);
        f.bytes_remaining -= moved;
        peer(f.dst).estimator.add_received(f.src, moved);
        peer(f.src).estimator.add_sent(f.dst, moved);
    }
}

void Simulation::recompute_rates() {
    rates_dirty_ = false;
    std::vector<FlowEnds> ends;
    ends.reserve(flows_.size());
    for (const auto& [id, f] : flows_) ends.push_back({f.src, f.dst});
    const auto rates = share_rates(ends, cfg_.r_up, cfg_.r_down);
    std::size_t i = 0;
    for (auto& [id, f] : flows_) {
        const double rate = rates[i++];
        if (rate == f.rate) continue;
        f.rate = rate;
        ++f.generation;
        scheduler_.schedule(EventKind::TransferComplete,
                            scheduler_.now() + f.bytes_remaining / rate, f.dst, id, f.generation);
    }
}

void Simulation::on_admission(Peer& p) {
    const double offset = stagger(p.id);
    scheduler_.schedule(EventKind::UnchokeInterval, scheduler_.now() + offset, p.id);
    scheduler_.schedule(EventKind::OptimisticInterval, scheduler_.now() + offset, p.id);
}

std::vector<PeerId> Simulation::interested_in(const Peer& uploader) const {
    std::vector<PeerId> out;
    for (const auto& [id, other] : peers_) {
        if (id == uploader.id || other->seed || other->departing) continue;
        if (interested(other->pieces, uploader.pieces)) out.push_back(id);
    }
    return out;
}

void Simulation::on_regular_interval(Peer& p) {
    const auto candidates = interested_in(p);
    ChokeState next;
    next.regular = regular_unchoke(p.seed, candidates, p.estimator, cfg_.setting, tie_rng_);
    next.optimistic = p.choke.optimistic;
    // A peer promoted to a regular slot leaves its optimistic slot vacant.
    std::erase_if(next.optimistic, [&](PeerId id) {
        return std::find(next.regular.begin(), next.regular.end(), id) != next.regular.end();
    });
    apply_choke_state(p, std::move(next));
    p.estimator.reset();
    scheduler_.schedule(EventKind::UnchokeInterval, scheduler_.now() + cfg_.setting.delta, p.id);
}

void Simulation::on_optimistic_interval(Peer& p) {
    const auto candidates = interested_in(p);
    ChokeState next;
    next.regular = p.choke.regular;
    next.optimistic = optimistic_unchoke(candidates, next.regular, cfg_.setting, optimistic_rng_);
    apply_choke_state(p, std::move(next));
    scheduler_.schedule(EventKind::OptimisticInterval,
                        scheduler_.now() + cfg_.setting.optimistic_interval(), p.id);
}

void Simulation::apply_choke_state(Peer& uploader, ChokeState next) {
    const auto before = uploader.choke.all();
    uploader.choke = std::move(next);
    const auto after = uploader.choke.all();

    std::vector<PeerId> choked, unchoked;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::back_inserter(choked));
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::back_inserter(unchoked));

    for (PeerId id : choked) {
        Peer& dst = peer(id);
        if (auto it = dst.inbound.find(uploader.id); it != dst.inbound.end()) {
            finish_flow(it->second, false);
        }
        dst.unchokers.remove(uploader.id);
    }
    for (PeerId id : unchoked) {
        peer(id).unchokers.add(uploader.id, scheduler_.now(), unchoke_seq_++);
    }
    for (PeerId id : choked) try_requests(peer(id));
    for (PeerId id : unchoked) try_requests(peer(id));
}

void Simulation::try_requests(Peer& p) {
    if (p.seed || p.departing || !p.session) return;
    const auto& session = *p.session;
    for (const auto& entry : p.unchokers.entries()) {
        if (p.ledger.request_to(entry.peer)) continue;
        Peer& src = peer(entry.peer);
        if (src.departing) continue;
        SelectionView view;
        view.policy = cfg_.protocol;
        view.window = session.window();
        view.urgency = cfg_.urgency();
        view.local = &p.pieces;
        view.ledger = &p.ledger;
        view.neighbour = &src.pieces;
        view.replicas = replicas_;
        if (auto piece = next_request(view, src.id, p.ledger, tie_rng_)) {
            start_flow(src, p, *piece);
        }
    }
}

void Simulation::start_flow(Peer& src, Peer& dst, PieceIndex piece) {
    if (!src.choke.unchokes(dst.id)) {
        throw SimulationFault(fmt::format("flow {} -> {} without an unchoke", src.id, dst.id));
    }
    const FlowId id = next_flow_++;
    const double bytes =
        static_cast<double>(dst.pieces.missing_blocks(piece)) * static_cast<double>(cfg_.b_size);
    flows_.emplace(id, Flow{src.id, dst.id, piece, bytes, bytes});
    src.outbound.insert(id);
    dst.inbound.emplace(src.id, id);
    rates_dirty_ = true;
}

void Simulation::finish_flow(FlowId id, bool complete) {
    auto it = flows_.find(id);
    const Flow f = it->second;
    flows_.erase(it);
    rates_dirty_ = true;

    Peer& src = peer(f.src);
    Peer& dst = peer(f.dst);
    src.outbound.erase(id);
    dst.inbound.erase(f.src);
    dst.ledger.release(f.src);

    // A torn-down flow keeps only the blocks it fully delivered.
    std::uint32_t blocks = dst.pieces.missing_blocks(f.piece);
    if (!complete) {
        const double delivered = f.bytes_total - f.bytes_remaining;
        const double whole = std::floor(delivered / static_cast<double>(cfg_.b_size) + 1e-9);
        blocks = std::min(blocks, static_cast<std::uint32_t>(whole));
    }
    bool piece_done = false;
    for (std::uint32_t i = 0; i < blocks; ++i) {
        piece_done = dst.pieces.complete_block(f.piece, dst.pieces.first_missing_block(f.piece));
    }
    if (piece_done) on_piece_completed(dst, f.piece);
}

void Simulation::on_transfer_complete(FlowId id, std::uint64_t generation) {
    auto it = flows_.find(id);
    if (it == flows_.end() || it->second.generation != generation) return;
    const PeerId src = it->second.src;
    const PeerId dst = it->second.dst;
    finish_flow(id, true);
    Peer& d = peer(dst);
    try_requests(d);
    (void)src;
}

void Simulation::on_piece_completed(Peer& p, PieceIndex piece) {
    ++replicas_[piece];
    auto& session = *p.session;
    session.add_downloaded(cfg_.p_size);
    if (observer_ != nullptr) observer_->on_piece_complete(p.id, piece, scheduler_.now());

    if (p.pieces.complete()) {
        SessionRecord rec;
        rec.duration = scheduler_.now() - session.start_time();
        rec.distinct_misses = session.distinct_misses();
        rec.t = t_;
        rec.f_size = static_cast<double>(cfg_.f_size);
        rec.r_down = cfg_.r_down;
        rec.playback = cfg_.profile.playback;
        if (session.warmup()) {
            ++warmup_sessions_;
        } else {
            sessions_.push_back(rec);
        }
        if (observer_ != nullptr) {
            observer_->on_session_end(p.id, rec, session.warmup(), session.downloaded_bytes());
        }
        p.departing = true;
        departing_.push_back(p.id);
        return;
    }

    if (!session.playback_started() && piece == 1 && cfg_.profile.playback) {
        session.start_playback(geometry_);
        schedule_boundary(p);
        schedule_behavior(p);
    }

    // Have-notification: peers this one serves may now find something to ask for.
    for (PeerId id : p.choke.all()) {
        Peer& w = peer(id);
        if (!w.ledger.request_to(p.id)) try_requests(w);
    }
}

void Simulation::schedule_boundary(Peer& p) {
    auto& s = *p.session;
    ++s.boundary_gen;
    scheduler_.schedule(EventKind::PlaybackBoundary,
                        scheduler_.now() + cfg_.piece_play_seconds(), p.id, 0, s.boundary_gen);
}

void Simulation::schedule_behavior(Peer& p) {
    auto& s = *p.session;
    const double gap = p.behavior_rng.exponential(cfg_.profile.lambda);
    if (observer_ != nullptr) observer_->on_behavior_gap(p.id, gap);
    scheduler_.schedule(EventKind::BehaviorEvent, scheduler_.now() + gap, p.id, 0,
                        s.behavior_gen);
}

void Simulation::on_behavior_event(Peer& p, std::uint64_t generation) {
    auto& s = *p.session;
    if (generation != s.behavior_gen) return;
    const ActionKind action = sample_action(cfg_.profile, p.action_rng.uniform());
    if (observer_ != nullptr) observer_->on_action(p.id, action, scheduler_.now());

    ++s.pause_gen;  // any pending pause is pre-empted
    const auto effect = s.apply_action(action, geometry_, scheduler_.now());
    if (effect.cancel_boundary) ++s.boundary_gen;
    if (effect.restart_boundary) schedule_boundary(p);
    if (action == ActionKind::Pause) {
        scheduler_.schedule(EventKind::PauseExpiry, s.pause_until(), p.id, 0, s.pause_gen);
    }
    schedule_behavior(p);
    if (effect.window_moved) try_requests(p);
}

void Simulation::on_pause_expiry(Peer& p, std::uint64_t generation) {
    auto& s = *p.session;
    if (generation != s.pause_gen || s.state() != BehaviorState::Paused) return;
    s.pause_expired(geometry_);
    schedule_boundary(p);
}

void Simulation::on_playback_boundary(Peer& p, std::uint64_t generation) {
    auto& s = *p.session;
    if (generation != s.boundary_gen || s.state() != BehaviorState::Playing) return;
    const auto result = s.playback_boundary(p.pieces);
    if (result.keep_playing) schedule_boundary(p);
    try_requests(p);
}

void Simulation::process_departures() {
    while (!departing_.empty()) {
        const PeerId id = departing_.back();
        departing_.pop_back();
        Peer& gone = peer(id);

        for (const auto& entry : gone.unchokers.entries()) peer(entry.peer).choke.remove(id);
        const auto served = gone.choke.all();
        for (PeerId w : served) {
            Peer& dst = peer(w);
            if (auto it = dst.inbound.find(id); it != dst.inbound.end()) {
                finish_flow(it->second, false);
            }
            dst.unchokers.remove(id);
        }
        if (!gone.inbound.empty()) {
            throw SimulationFault(fmt::format("peer {} departed with inbound flows", id));
        }
        for (PieceIndex p = 1; p <= t_; ++p) --replicas_[p];
        for (auto& [other_id, other] : peers_) other->estimator.forget(id);
        peers_.erase(id);

        add_leecher(false);
        for (PeerId w : served) {
            if (Peer* dst = find_peer(w); dst != nullptr) try_requests(*dst);
        }
    }
}

std::vector<std::string> Simulation::audit() const {
    std::vector<std::string> issues;
    const auto& s = cfg_.setting;
    std::size_t seeds = 0;
    for (const auto& [id, p] : peers_) {
        if (p->seed) {
            ++seeds;
            if (!p->pieces.complete()) issues.push_back("seed lost a piece");
        }
        if (p->choke.regular.size() > static_cast<std::size_t>(s.x1)) {
            issues.push_back(fmt::format("peer {} has {} regular slots", id, p->choke.regular.size()));
        }
        if (p->choke.optimistic.size() > static_cast<std::size_t>(s.x2)) {
            issues.push_back(
                fmt::format("peer {} has {} optimistic slots", id, p->choke.optimistic.size()));
        }
        for (PeerId r : p->choke.regular) {
            if (std::find(p->choke.optimistic.begin(), p->choke.optimistic.end(), r) !=
                p->choke.optimistic.end()) {
                issues.push_back(fmt::format("peer {} holds {} in both slot sets", id, r));
            }
        }
        for (PeerId w : p->choke.all()) {
            auto it = peers_.find(w);
            if (it == peers_.end() || !it->second->unchokers.contains(id)) {
                issues.push_back(fmt::format("unchoke {} -> {} not mirrored", id, w));
            }
        }
        for (const auto& e : p->unchokers.entries()) {
            auto it = peers_.find(e.peer);
            if (it == peers_.end() || !it->second->choke.unchokes(id)) {
                issues.push_back(fmt::format("peer {} lists stale unchoker {}", id, e.peer));
            }
        }
        if (p->session && p->session->downloaded_bytes() != cfg_.p_size * p->pieces.owned_count()) {
            issues.push_back(fmt::format("peer {} byte counter {} != {} owned pieces", id,
                                         p->session->downloaded_bytes(), p->pieces.owned_count()));
        }
        for (const auto& [piece, src] : p->ledger.by_piece()) {
            auto it = p->inbound.find(src);
            if (it == p->inbound.end() || flows_.at(it->second).piece != piece) {
                issues.push_back(fmt::format("peer {} ledger entry {} has no flow", id, piece));
            }
        }
    }
    if (seeds != 1) issues.push_back(fmt::format("{} seeds in the swarm", seeds));
    if (peers_.size() != cfg_.s_size) {
        issues.push_back(fmt::format("population {} != {}", peers_.size(), cfg_.s_size));
    }

    std::map<PeerId, double> up, down;
    for (const auto& [fid, f] : flows_) {
        const auto src = peers_.find(f.src);
        const auto dst = peers_.find(f.dst);
        if (src == peers_.end() || dst == peers_.end()) {
            issues.push_back(fmt::format("flow {} references a departed peer", fid));
            continue;
        }
        if (!src->second->choke.unchokes(f.dst)) {
            issues.push_back(fmt::format("flow {} -> {} without unchoke", f.src, f.dst));
        }
        if (!src->second->pieces.owns(f.piece)) {
            issues.push_back(fmt::format("flow {} serves unowned piece {}", fid, f.piece));
        }
        if (dst->second->pieces.owns(f.piece)) {
            issues.push_back(fmt::format("flow {} delivers owned piece {}", fid, f.piece));
        }
        up[f.src] += f.rate;
        down[f.dst] += f.rate;
    }
    constexpr double kSlack = 1.0 + 1e-9;
    for (const auto& [id, r] : up) {
        if (r > cfg_.r_up * kSlack) issues.push_back(fmt::format("peer {} uploads {} B/s", id, r));
    }
    for (const auto& [id, r] : down) {
        if (r > cfg_.r_down * kSlack) {
            issues.push_back(fmt::format("peer {} downloads {} B/s", id, r));
        }
    }

    std::vector<std::uint32_t> recount(t_ + 1, 0);
    for (const auto& [id, p] : peers_) {
        for (PieceIndex piece = 1; piece <= t_; ++piece) {
            if (p->pieces.owns(piece)) ++recount[piece];
        }
    }
    // Departing peers are still present until the end of the dispatch, so
    // this matches whenever audit() runs between events.
    if (recount != replicas_) issues.push_back("replica counts drifted from a full recount");
    return issues;
}

}  // namespace vodswarm

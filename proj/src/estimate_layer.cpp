#include "gradsync/estimate_layer.hpp"

#include <stdexcept>

namespace gradsync {

bool on_direct_message(EstimateRecord& rec, const DirectMessage& msg, double now_H,
                       LinkBounds link, const SystemParams& p) {
    if (msg.sender != rec.remote)
        throw std::invalid_argument("direct message sender does not match record endpoint");
    if (msg.seq <= rec.last_seq)
        return false;  // reordered delivery; the anchor we hold is fresher
    rec.last_seq = msg.seq;
    rec.anchor_H = now_H;
    // Midpoint of the possible remote values at receipt: the message aged
    // between beta_min and beta_max while the remote clock ran at a rate in
    // [1, r_max].
    rec.anchor_value = msg.payload_L + (link.beta_min + p.r_max() * link.beta_max) / 2.0;
    rec.initialized = true;
    return true;
}

bool ReceptionStore::add(const ReceptionRecord& r) {
    auto& window = by_origin_[r.beacon.origin];
    for (const auto& existing : window)
        if (existing.beacon == r.beacon)
            return false;
    window.push_back(r);
    if (static_cast<int>(window.size()) > kWindow)
        window.pop_front();
    return true;
}

const ReceptionRecord* ReceptionStore::find(BeaconKey beacon) const {
    auto it = by_origin_.find(beacon.origin);
    if (it == by_origin_.end())
        return nullptr;
    for (const auto& r : it->second)
        if (r.beacon == beacon)
            return &r;
    return nullptr;
}

ExchangeResult apply_exchange(EstimateRecord& rec, const ReceptionRecord& local,
                              const TimestampExchange& ex) {
    if (ex.from != rec.remote)
        throw std::invalid_argument("exchange sender does not match record endpoint");
    if (rec.kind != EdgeKind::Rbs)
        throw std::invalid_argument("exchange applied to a non-RBS record");
    if (local.beacon != ex.beacon)
        return ExchangeResult::BeaconMismatch;
    if (ex.beacon.id <= rec.last_beacon_id)
        return ExchangeResult::StaleBeacon;
    rec.last_beacon_id = ex.beacon.id;
    rec.anchor_H = local.local_H;
    rec.anchor_value = ex.remote_L;
    rec.initialized = true;
    return ExchangeResult::Applied;
}

std::optional<double> read_estimate(const EstimateRecord& rec, double now_H) {
    if (!rec.initialized)
        return std::nullopt;
    return rec.anchor_value + (now_H - rec.anchor_H);
}

} // namespace gradsync

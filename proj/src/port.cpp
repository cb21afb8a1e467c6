#include "sctsn/port.hpp"

#include <stdexcept>

namespace sctsn::simnet {

bool EgressPort::enqueue(const QueuedFrame& f) {
    if (f.priority < 0 || f.priority >= priority_levels) throw std::out_of_range("frame priority outside 0..7");
    auto& used = bytes_[f.priority];
    if (used + f.bytes > queue_bytes_) {
        ++drops_;
        return false;
    }
    used += f.bytes;
    queues_[f.priority].push_back(f);
    return true;
}

std::optional<double> EgressPort::start_next() {
    if (in_service_) return std::nullopt;
    for (int p = priority_levels - 1; p >= 0; --p) {
        auto& q = queues_[p];
        if (q.empty()) continue;
        in_service_ = q.front();
        q.pop_front();
        bytes_[p] -= in_service_->bytes;
        return transmission_time(in_service_->bytes);
    }
    return std::nullopt;
}

QueuedFrame EgressPort::complete() {
    if (!in_service_) throw std::logic_error("no frame in transmission");
    QueuedFrame f = *in_service_;
    in_service_.reset();
    tx_bytes_ += f.bytes;
    return f;
}

} // namespace sctsn::simnet

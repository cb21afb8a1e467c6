#pragma once

// Egress port with eight strict-priority FIFO queues and non-preemptive
// service: a frame in transmission always completes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

namespace sctsn::simnet {

inline constexpr int priority_levels = 8;
inline constexpr std::size_t default_queue_bytes = 512 * 1024;

struct QueuedFrame {
    std::uint64_t frame = 0; // index into the simulator's frame table
    std::uint32_t bytes = 0;
    int priority = 0;        // 0..7, 7 served first
};

class EgressPort {
public:
    explicit EgressPort(double rate_bps = 100e6, std::size_t queue_bytes = default_queue_bytes)
        : rate_bps_(rate_bps), queue_bytes_(queue_bytes) {}

    /// False (and the drop counter increments) when the frame does not fit
    /// its priority queue.
    bool enqueue(const QueuedFrame& f);

    bool busy() const noexcept { return in_service_.has_value(); }
    /// Starts the next frame if idle: highest nonempty priority, FIFO within it.
    /// Returns the transmission time of the started frame.
    std::optional<double> start_next();
    /// Ends the current transmission and returns the frame.
    QueuedFrame complete();

    const std::optional<QueuedFrame>& in_service() const noexcept { return in_service_; }
    std::size_t queued_bytes(int priority) const { return bytes_.at(priority); }
    std::size_t queued_frames(int priority) const { return queues_.at(priority).size(); }
    std::uint64_t drops() const noexcept { return drops_; }
    std::uint64_t transmitted_bytes() const noexcept { return tx_bytes_; }
    double rate_bps() const noexcept { return rate_bps_; }
    double transmission_time(std::uint32_t bytes) const { return static_cast<double>(bytes) * 8.0 / rate_bps_; }

private:
    double rate_bps_;
    std::size_t queue_bytes_;
    std::array<std::deque<QueuedFrame>, priority_levels> queues_;
    std::array<std::size_t, priority_levels> bytes_{};
    std::optional<QueuedFrame> in_service_;
    std::uint64_t drops_ = 0;
    std::uint64_t tx_bytes_ = 0;
};

} // namespace sctsn::simnet

#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "urllc/rng.hpp"

namespace urllc::queue_sim {

// Slot-based FIFO packet queue with a [d_min, d_max] delivery window.
// One instance is owned by one simulation; no sharing across threads.

enum class PacketOutcome : std::uint8_t {
  kPending = 0,
  kDelivered = 1,
  kDelayViolation = 2,
  kDecodeFailure = 3,
};

struct Packet {
  std::int64_t id = 0;
  std::int64_t arrival_slot = 0;
  int size_bits = 1600;  // 200-byte default
  std::int64_t terminal_slot = -1;
  PacketOutcome outcome = PacketOutcome::kPending;
};

struct QosTarget {
  int d_min_ms = 9;
  int d_max_ms = 11;
  double eps_max = 1e-5;
};

struct TransmitDecision {
  bool transmit = false;        // serve the head packet this slot
  bool decode_success = false;  // outcome of the (single) transmission attempt
  int hold_until_age_ms = -1;   // play-out hold target; -1 means qos.d_min
  int extra_delay_ms = 0;       // post-decode processing latency
};

struct StepEvents {
  int delivered = 0;
  int delay_violations = 0;
  int decode_failures = 0;
};

struct LossBreakdown {
  double delay_violation_prob = 0.0;
  double decode_error_prob = 0.0;
  double overall = 0.0;
  std::int64_t total_packets = 0;
};

class QueueState {
 public:
  std::int64_t current_slot() const { return current_slot_; }
  bool empty() const { return fifo_.empty(); }
  std::size_t length() const { return fifo_.size(); }
  // Head-of-line delay in ms; 0 for an empty queue.
  int hol_delay_ms() const {
    return fifo_.empty() ? 0 : static_cast<int>(current_slot_ - fifo_.front().arrival_slot);
  }
  const std::deque<Packet>& packets() const { return fifo_; }
  std::int64_t total_arrivals() const { return total_arrivals_; }

  // Advances one slot: enqueue `new_arrivals` fresh packets, expire anything
  // whose queue age exceeds d_max, then apply the service decision to the
  // head packet. Early decodes are held at the play-out buffer until
  // `hold_until_age_ms`, so delivery lands at
  //   max(age, hold_until) + extra_delay,
  // and counts as delivered only inside [d_min, d_max]; the window is
  // two-sided, so a delivery ahead of d_min is a violation like a late one.
  // Decode failures are terminal (no retransmission). Terminal packets are
  // appended to `log` when non-null.
  StepEvents step(int new_arrivals, const TransmitDecision& decision,
                  const QosTarget& qos, std::vector<Packet>* log = nullptr);

 private:
  std::deque<Packet> fifo_;
  std::int64_t current_slot_ = -1;
  std::int64_t total_arrivals_ = 0;
  std::int64_t next_id_ = 0;
};

// Poisson(rate * slot_ms / 1000) arrival count, deterministic per stream.
int poisson_arrivals(double rate_pkts_per_s, double slot_ms, RngStream& rng);

LossBreakdown loss_breakdown(const std::vector<Packet>& terminal_log);
LossBreakdown loss_breakdown_from_counts(std::int64_t delivered,
                                         std::int64_t delay_violations,
                                         std::int64_t decode_failures);

// CSV export: packet_id,arrival_slot,terminal_slot,outcome
void write_event_log_csv(const std::vector<Packet>& log, const std::string& path);

}  // namespace urllc::queue_sim

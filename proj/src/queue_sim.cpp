#include "urllc/queue_sim.hpp"

#include <algorithm>
#include <fstream>

#include "urllc/errors.hpp"

namespace urllc::queue_sim {

namespace {

const char* outcome_name(PacketOutcome o) {
  switch (o) {
    case PacketOutcome::kPending: return "pending";
    case PacketOutcome::kDelivered: return "delivered";
    case PacketOutcome::kDelayViolation: return "delay_violation";
    case PacketOutcome::kDecodeFailure: return "decode_failure";
  }
  return "?";
}

}  // namespace

StepEvents QueueState::step(int new_arrivals, const TransmitDecision& decision,
                            const QosTarget& qos, std::vector<Packet>* log) {
  ++current_slot_;
  StepEvents events;

  for (int i = 0; i < new_arrivals; ++i) {
    Packet p;
    p.id = next_id_++;
    p.arrival_slot = current_slot_;
    fifo_.push_back(p);
    ++total_arrivals_;
  }

  // Expiry sweep on believed age. FIFO order means only head packets can be
  // overdue; sweep until the head is within the window.
  while (!fifo_.empty() &&
         current_slot_ - fifo_.front().arrival_slot > qos.d_max_ms) {
    Packet& p = fifo_.front();
    p.outcome = PacketOutcome::kDelayViolation;
    p.terminal_slot = current_slot_;
    ++events.delay_violations;
    if (log) log->push_back(p);
    fifo_.pop_front();
  }

  if (decision.transmit) {
    if (fifo_.empty()) {
      throw LogicError("queue_step: transmit decision on an empty queue");
    }
    Packet p = fifo_.front();
    fifo_.pop_front();
    const std::int64_t age = current_slot_ - p.arrival_slot;
    if (!decision.decode_success) {
      p.outcome = PacketOutcome::kDecodeFailure;
      p.terminal_slot = current_slot_;
      ++events.decode_failures;
    } else {
      const std::int64_t hold =
          decision.hold_until_age_ms >= 0 ? decision.hold_until_age_ms : qos.d_min_ms;
      const std::int64_t release_age =
          std::max<std::int64_t>(age, hold) + decision.extra_delay_ms;
      if (release_age > qos.d_max_ms || release_age < qos.d_min_ms) {
        p.outcome = PacketOutcome::kDelayViolation;
        p.terminal_slot = current_slot_;
        ++events.delay_violations;
      } else {
        p.outcome = PacketOutcome::kDelivered;
        p.terminal_slot = p.arrival_slot + release_age;
        ++events.delivered;
      }
    }
    if (log) log->push_back(p);
  }
  return events;
}

int poisson_arrivals(double rate_pkts_per_s, double slot_ms, RngStream& rng) {
  if (!(rate_pkts_per_s > 0.0)) {
    throw DomainError("poisson_arrivals: rate must be positive");
  }
  return rng.poisson(rate_pkts_per_s * slot_ms / 1000.0);
}

LossBreakdown loss_breakdown(const std::vector<Packet>& terminal_log) {
  std::int64_t delivered = 0, violations = 0, failures = 0;
  for (const Packet& p : terminal_log) {
    switch (p.outcome) {
      case PacketOutcome::kDelivered: ++delivered; break;
      case PacketOutcome::kDelayViolation: ++violations; break;
      case PacketOutcome::kDecodeFailure: ++failures; break;
      case PacketOutcome::kPending: break;
    }
  }
  return loss_breakdown_from_counts(delivered, violations, failures);
}

LossBreakdown loss_breakdown_from_counts(std::int64_t delivered,
                                         std::int64_t delay_violations,
                                         std::int64_t decode_failures) {
  const std::int64_t total = delivered + delay_violations + decode_failures;
  if (total < 1) {
    throw InsufficientDataError("loss_breakdown: no terminal packets");
  }
  LossBreakdown b;
  b.total_packets = total;
  const double n = static_cast<double>(total);
  b.delay_violation_prob = static_cast<double>(delay_violations) / n;
  b.decode_error_prob = static_cast<double>(decode_failures) / n;
  b.overall = static_cast<double>(delay_violations + decode_failures) / n;
  return b;
}

void write_event_log_csv(const std::vector<Packet>& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open event log for writing: " + path);
  f << "packet_id,arrival_slot,terminal_slot,outcome\n";
  for (const Packet& p : log) {
    f << p.id << ',' << p.arrival_slot << ',' << p.terminal_slot << ','
      << outcome_name(p.outcome) << '\n';
  }
}

}  // namespace urllc::queue_sim

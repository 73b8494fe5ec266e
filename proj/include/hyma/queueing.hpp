#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "hyma/config.hpp"
#include "hyma/rng.hpp"

namespace hyma {

// One random batch of packet arrivals, in bits: a*u with a ~ U{arrival_min..arrival_max}.
inline std::uint64_t sample_arrivals(const SystemParams& params, Rng& rng) {
  return rng.uniform_int(params.arrival_min, params.arrival_max) * params.packet_bits;
}

// Per-user transmit queue. Backlog is tracked in whole bits so the packet-level
// state reproduces the max(Q - mu, 0) + lambda recurrence exactly.
class TransmitQueue {
 public:
  struct Packet {
    std::uint64_t arrival_slot = 0;
    std::uint64_t bits_remaining = 0;
  };

  std::uint64_t backlog_bits() const { return backlog_bits_; }
  const std::deque<Packet>& packets() const { return packets_; }

  // Service applies to the pre-arrival backlog; arrivals of the same slot are
  // appended afterwards (enqueue) and cannot depart in that slot.
  void enqueue(std::uint64_t arrival_bits, std::uint64_t now) {
    if (arrival_bits == 0) return;
    packets_.push_back({now, arrival_bits});
    backlog_bits_ += arrival_bits;
  }

  // Removes up to mu_bits from the FIFO head; a partially served packet keeps
  // its remainder. Returns the delay, in slots, of every packet whose last bit
  // departed: completion slot - arrival slot + 1.
  std::vector<std::uint64_t> serve(std::uint64_t mu_bits, std::uint64_t now) {
    std::vector<std::uint64_t> delays;
    std::uint64_t budget = mu_bits;
    while (budget > 0 && !packets_.empty()) {
      Packet& head = packets_.front();
      if (head.bits_remaining <= budget) {
        budget -= head.bits_remaining;
        backlog_bits_ -= head.bits_remaining;
        delays.push_back(now - head.arrival_slot + 1);
        packets_.pop_front();
      } else {
        head.bits_remaining -= budget;
        backlog_bits_ -= budget;
        budget = 0;
      }
    }
    return delays;
  }

 private:
  std::deque<Packet> packets_;
  std::uint64_t backlog_bits_ = 0;
};

// Accumulated deficit between the QoS target eta and the delivered effective
// rate; its stability enforces the time-average rate constraint.
struct VirtualQueue {
  double deficit = 0.0;
};

inline VirtualQueue update_virtual(VirtualQueue z, double eta, double r_eff) {
  z.deficit = std::max(z.deficit + eta - r_eff, 0.0);
  return z;
}

}  // namespace hyma

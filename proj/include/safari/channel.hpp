#pragma once

// Unreliable links: every round each client is delivered independently with
// probability p_i^t. No acknowledgements, no retransmission.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace safari {

class LinkSchedule {
 public:
  enum class Mode { constant, piecewise, per_round_table };

  struct Segment {
    std::size_t start_round = 0;
    std::vector<double> probabilities;
  };

  static LinkSchedule constant(std::vector<double> probabilities);
  static LinkSchedule uniform(std::size_t clients, double probability);
  // Segments sorted by start_round; the first must start at round 0.
  static LinkSchedule piecewise(std::vector<Segment> segments);
  static LinkSchedule table(std::vector<std::vector<double>> rows);
  // CSV of T rows x m columns, no header.
  static LinkSchedule load_table(const std::filesystem::path& path);

  Mode mode() const noexcept { return mode_; }
  std::size_t client_count() const noexcept { return segments_.front().probabilities.size(); }
  double probability(std::size_t client, std::size_t round) const;

  // Throws ConfigError unless the schedule covers `clients` clients and
  // `rounds` rounds.
  void validate(std::size_t clients, std::size_t rounds) const;

 private:
  LinkSchedule(Mode mode, std::vector<Segment> segments);
  const Segment& segment_for(std::size_t round) const;

  Mode mode_;
  std::vector<Segment> segments_;  // per_round_table: one segment per round
};

struct ActiveSet {
  std::size_t round = 0;
  std::vector<std::size_t> members;  // ascending

  bool contains(std::size_t client) const;
  std::size_t size() const noexcept { return members.size(); }
  bool empty() const noexcept { return members.empty(); }
};

// Uplink receipt draw for round t. Each client consumes one uniform from a
// stream keyed by (seed, t), so the result depends only on (seed, schedule, t).
ActiveSet sample_active(const LinkSchedule& schedule, std::size_t round, std::size_t clients,
                        std::uint64_t seed);

// Downlink delivery draw, from an independent stream.
ActiveSet broadcast_drop(const LinkSchedule& schedule, std::size_t round, std::size_t clients,
                         std::uint64_t seed);

struct RoundLinks {
  ActiveSet reached;    // clients that received the global model and train
  ActiveSet delivered;  // clients whose update reached the server
};

// A client missed on the downlink never appears in the uplink set.
RoundLinks simulate_round(const LinkSchedule& downlink, const LinkSchedule& uplink,
                          std::size_t round, std::size_t clients, std::uint64_t seed);

}  // namespace safari

#include "safari/channel.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "safari/errors.hpp"
#include "safari/rng.hpp"

namespace safari {

namespace {

void check_probabilities(const std::vector<double>& probabilities) {
  if (probabilities.empty()) throw ConfigError("link schedule has no clients");
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("link probability " + std::to_string(p) + " outside [0, 1]");
    }
  }
}

ActiveSet draw(const LinkSchedule& schedule, std::size_t round, std::size_t clients,
               std::uint64_t seed, rng::Purpose purpose) {
  rng::Engine engine = rng::make(seed, purpose, round);
  ActiveSet set;
  set.round = round;
  for (std::size_t i = 0; i < clients; ++i) {
    if (rng::bernoulli(engine, schedule.probability(i, round))) set.members.push_back(i);
  }
  return set;
}

}  // namespace

LinkSchedule::LinkSchedule(Mode mode, std::vector<Segment> segments)
    : mode_(mode), segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("link schedule is empty");
  const std::size_t m = segments_.front().probabilities.size();
  for (const Segment& s : segments_) {
    check_probabilities(s.probabilities);
    if (s.probabilities.size() != m) throw ConfigError("link schedule rows differ in client count");
  }
}

LinkSchedule LinkSchedule::constant(std::vector<double> probabilities) {
  return LinkSchedule(Mode::constant, {Segment{0, std::move(probabilities)}});
}

LinkSchedule LinkSchedule::uniform(std::size_t clients, double probability) {
  return constant(std::vector<double>(clients, probability));
}

LinkSchedule LinkSchedule::piecewise(std::vector<Segment> segments) {
  if (segments.empty() || segments.front().start_round != 0) {
    throw ConfigError("piecewise link schedule must start at round 0");
  }
  for (std::size_t k = 1; k < segments.size(); ++k) {
    if (segments[k].start_round <= segments[k - 1].start_round) {
      throw ConfigError("piecewise link schedule segments must have increasing start rounds");
    }
  }
  return LinkSchedule(Mode::piecewise, std::move(segments));
}

LinkSchedule LinkSchedule::table(std::vector<std::vector<double>> rows) {
  std::vector<Segment> segments;
  segments.reserve(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) segments.push_back({t, std::move(rows[t])});
  return LinkSchedule(Mode::per_round_table, std::move(segments));
}

LinkSchedule LinkSchedule::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open link table: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::logic_error&) {
        throw ConfigError(path.string() + ": bad probability '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return table(std::move(rows));
}

const LinkSchedule::Segment& LinkSchedule::segment_for(std::size_t round) const {
  switch (mode_) {
    case Mode::constant:
      return segments_.front();
    case Mode::per_round_table:
      if (round >= segments_.size()) {
        throw ConfigError("link table has no row for round " + std::to_string(round));
      }
      return segments_[round];
    case Mode::piecewise: {
      auto it = std::upper_bound(segments_.begin(), segments_.end(), round,
                                 [](std::size_t r, const Segment& s) { return r < s.start_round; });
      return *std::prev(it);
    }
  }
  return segments_.front();
}

double LinkSchedule::probability(std::size_t client, std::size_t round) const {
  const Segment& segment = segment_for(round);
  if (client >= segment.probabilities.size()) {
    throw ConfigError("link schedule has no entry for client " + std::to_string(client));
  }
  return segment.probabilities[client];
}

void LinkSchedule::validate(std::size_t clients, std::size_t rounds) const {
  if (client_count() != clients) {
    throw ConfigError("link schedule lists " + std::to_string(client_count()) +
                      " clients, experiment has " + std::to_string(clients));
  }
  if (mode_ == Mode::per_round_table && segments_.size() < rounds) {
    throw ConfigError("link table covers " + std::to_string(segments_.size()) + " rounds, need " +
                      std::to_string(rounds));
  }
}

bool ActiveSet::contains(std::size_t client) const {
  return std::binary_search(members.begin(), members.end(), client);
}

ActiveSet sample_active(const LinkSchedule& schedule, std::size_t round, std::size_t clients,
                        std::uint64_t seed) {
  return draw(schedule, round, clients, seed, rng::Purpose::uplink);
}

ActiveSet broadcast_drop(const LinkSchedule& schedule, std::size_t round, std::size_t clients,
                         std::uint64_t seed) {
  return draw(schedule, round, clients, seed, rng::Purpose::downlink);
}

RoundLinks simulate_round(const LinkSchedule& downlink, const LinkSchedule& uplink,
                          std::size_t round, std::size_t clients, std::uint64_t seed) {
  RoundLinks links;
  links.reached = broadcast_drop(downlink, round, clients, seed);
  const ActiveSet returned = sample_active(uplink, round, clients, seed);
  links.delivered.round = round;
  std::set_intersection(links.reached.members.begin(), links.reached.members.end(),
                        returned.members.begin(), returned.members.end(),
                        std::back_inserter(links.delivered.members));
  return links;
}

}  // namespace safari

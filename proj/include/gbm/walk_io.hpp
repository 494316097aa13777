#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "gbm/format.hpp"
#include "gbm/walk.hpp"

namespace gbm {

// CSV dump of one path: header t,state then one row per event.
inline void write_path_csv(std::ostream& os, const PathRecord& rec) {
  os << "t,state\n";
  for (const Event& e : rec.events) os << fmt(e.t) << ',' << e.state.str() << '\n';
}

inline nlohmann::json path_to_json(const PathRecord& rec) {
  auto list = [](const std::vector<Event>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const Event& e : v) a.push_back({e.t, e.state.str()});
    return a;
  };
  return nlohmann::json{{"seed", rec.seed},
                        {"terminal_flag", to_string(rec.terminal)},
                        {"topology", to_string(rec.topology)},
                        {"n", rec.n},
                        {"horizon", rec.horizon},
                        {"record_mode", to_string(rec.mode)},
                        {"end_time", rec.end_time},
                        {"final_state", rec.final_state.str()},
                        {"events", list(rec.events)},
                        {"snapshots", list(rec.snapshots)}};
}

inline PathRecord path_from_json(const nlohmann::json& j) {
  PathRecord rec;
  const std::string topo = j.at("topology").get<std::string>();
  rec.topology = topo == "line" ? Topology::line : Topology::two_half;
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.n = j.at("n").get<int>();
  rec.horizon = j.at("horizon").get<double>();
  rec.end_time = j.at("end_time").get<double>();
  const std::string mode = j.at("record_mode").get<std::string>();
  rec.mode = mode == "full_path"        ? RecordMode::full_path
             : mode == "endpoints_only" ? RecordMode::endpoints_only
                                        : RecordMode::boundary_events_only;
  const std::string flag = j.at("terminal_flag").get<std::string>();
  rec.terminal = flag == "alive" ? Terminal::alive : flag == "killed" ? Terminal::killed : Terminal::truncated;
  rec.final_state = LatticeState::parse(rec.topology, j.at("final_state").get<std::string>());
  auto list = [&](const nlohmann::json& a, std::vector<Event>& out) {
    for (const auto& e : a)
      out.push_back(Event{e.at(0).get<double>(), LatticeState::parse(rec.topology, e.at(1).get<std::string>())});
  };
  list(j.at("events"), rec.events);
  list(j.at("snapshots"), rec.snapshots);
  return rec;
}

// One JSON object per line.
inline void write_path_jsonl(std::ostream& os, const PathRecord& rec) {
  os << path_to_json(rec).dump() << '\n';
}

}  // namespace gbm

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ndcausal/ndcausal.hpp"

namespace testing_support {

using namespace ndcausal;

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string robot_path() { return std::string(NDCAUSAL_DOMAIN_DIR) + "/robot.ndbat"; }

inline const NDBATheory& robot() {
  static const NDBATheory d = [] {
    auto r = parse_domain(slurp(robot_path()), "robot.ndbat");
    if (!r.ok()) throw std::runtime_error("robot domain does not parse");
    return *r.value;
  }();
  return d;
}

inline Term loc(const char* n) { return Term::constant(n, Sort{"Location"}); }
inline Term reaction(const char* n) { return Term::constant(n, Sort::reaction()); }

inline AgentAction move(const char* i, const char* j) { return AgentAction{"move", {loc(i), loc(j)}}; }
inline AgentAction comm(const char* i) { return AgentAction{"comm", {loc(i)}}; }
inline Term move(const char* i, const char* j, const char* e) { return Term::action("move", {loc(i), loc(j), reaction(e)}); }
inline Term comm(const char* i, const char* e) { return Term::action("comm", {loc(i), reaction(e)}); }

inline Formula vul() { return Formula::fluent("Vul", {}); }
inline Formula at(const char* i) { return Formula::fluent("At", {loc(i)}); }

// The four-step scenario with known reactions.
inline Situation sigma1() {
  return Situation::from({comm("I0", "Succ"), move("I0", "I1", "NotVul"), move("I1", "I2", "Vul"), move("I2", "I3", "NotVul")});
}
// comm, then the walk from I0 to I3.
inline std::vector<AgentAction> alpha1() { return {comm("I0"), move("I0", "I1"), move("I1", "I2"), move("I2", "I3")}; }
inline std::vector<AgentAction> alpha2() { return {move("I0", "I1"), move("I1", "I2")}; }

inline Formula formula(const std::string& text, const NDBATheory& d = robot()) {
  auto r = parse_formula(text, d);
  if (!r.ok()) {
    std::string msg = "bad formula " + text;
    for (const auto& x : r.diagnostics) msg += "\n" + format(x);
    throw std::runtime_error(msg);
  }
  return *r.value;
}

inline CausalQuery query(const std::string& text, const NDBATheory& d = robot()) {
  auto r = parse_query(text, d);
  if (!r.ok()) {
    std::string msg = "bad query " + text;
    for (const auto& x : r.diagnostics) msg += "\n" + format(x);
    throw std::runtime_error(msg);
  }
  return *r.value;
}

}  // namespace testing_support

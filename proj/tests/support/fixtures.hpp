#pragma once

// Hand-built OnionL trees and their expected LTL text, shared by the unit
// and acceptance suites.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "req2ltl/ltl.hpp"
#include "req2ltl/onion.hpp"

namespace fixtures {

struct GoldenCase {
  std::string id;
  std::string nl;
  std::string ltl;  // expected formula, any accepted spelling
  req2ltl::ir::OnionPtr tree;
};

req2ltl::ir::AtomicProposition ap(std::string var);
req2ltl::ir::AtomicProposition ap(std::string var, req2ltl::ir::RelOp rel, std::string formula);
req2ltl::ir::OnionPtr leaf(std::string var);
req2ltl::ir::OnionPtr leaf(std::string var, req2ltl::ir::RelOp rel, std::string formula);

// Six basic temporal patterns (traffic light, robot navigation), ids pat-01..06.
std::vector<GoldenCase> pattern_pairs();

// Valid-mode / temperature / warning example.
GoldenCase warning_light();
// Navigation output (eventual disjunction) and dual inertial navigation
// (sustained until) requirements.
GoldenCase navigation_output();
GoldenCase dual_inertial();
// Waypoint command requirement as first generated (both subgoals under F) and
// its corrected formula, where the first F becomes X.
GoldenCase waypoint_heading();
std::string waypoint_heading_corrected();
req2ltl::ir::NodePath waypoint_first_subgoal();

std::string warning_light_json();

// Random LTL formulas over `atoms` with depth <= max_depth.
req2ltl::ltl::Formula random_formula(std::mt19937_64& rng, int max_depth, const std::vector<std::string>& atoms);

}  // namespace fixtures

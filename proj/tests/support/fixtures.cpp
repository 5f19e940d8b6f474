#include "fixtures.hpp"

using req2ltl::ir::AtomicProposition;
using req2ltl::ir::NodePath;
using req2ltl::ir::OnionNode;
using req2ltl::ir::OnionPtr;
using req2ltl::ir::PathStep;
using req2ltl::ir::RelationOp;
using req2ltl::ir::RelOp;
using req2ltl::ir::ScopeOp;
using req2ltl::ltl::Formula;

namespace fixtures {

AtomicProposition ap(std::string var) {
  AtomicProposition a;
  a.var = std::move(var);
  return a;
}

AtomicProposition ap(std::string var, RelOp rel, std::string formula) {
  AtomicProposition a;
  a.var = std::move(var);
  a.rel = rel;
  a.formula = std::move(formula);
  return a;
}

OnionPtr leaf(std::string var) { return OnionNode::atomic(ap(std::move(var))); }
OnionPtr leaf(std::string var, RelOp rel, std::string formula) {
  return OnionNode::atomic(ap(std::move(var), rel, std::move(formula)));
}

namespace {

OnionPtr G(OnionPtr c) { return OnionNode::scope(ScopeOp::Globally, std::move(c)); }
OnionPtr F(OnionPtr c) { return OnionNode::scope(ScopeOp::Eventually, std::move(c)); }
OnionPtr X(OnionPtr c) { return OnionNode::scope(ScopeOp::Next, std::move(c)); }
OnionPtr Not(OnionPtr c) { return OnionNode::scope(ScopeOp::Not, std::move(c)); }
OnionPtr rel(RelationOp op, OnionPtr l, OnionPtr r) { return OnionNode::relation(op, std::move(l), std::move(r)); }

}  // namespace

std::vector<GoldenCase> pattern_pairs() {
  return {
      {"pat-01", "Once red, the light cannot become green next.", "G (red -> X !green)",
       G(rel(RelationOp::Implies, leaf("red"), X(Not(leaf("green")))))},
      {"pat-02", "Once the light is red, it must remain red until it turns yellow.", "G (red -> red U yellow)",
       G(rel(RelationOp::Implies, leaf("red"), rel(RelationOp::SustainedUntil, leaf("red"), leaf("yellow"))))},
      {"pat-03", "If b holds, next c holds until a holds or always c holds.", "G (b -> X ((c U a) | G c))",
       G(rel(RelationOp::Implies, leaf("b"),
             X(rel(RelationOp::Or, rel(RelationOp::SustainedUntil, leaf("c"), leaf("a")), G(leaf("c"))))))},
      {"pat-04", "If a holds then c is true until b.", "G (a -> (c U b))",
       G(rel(RelationOp::Implies, leaf("a"), rel(RelationOp::SustainedUntil, leaf("c"), leaf("b"))))},
      {"pat-05", "Navigate to the green room while avoiding landmark 1.", "(F green) & G (!landmark1)",
       rel(RelationOp::And, F(leaf("green")), G(Not(leaf("landmark1"))))},
      {"pat-06", "Swing by landmark 1 before ending up in the red room.", "F (landmark1 & F red)",
       rel(RelationOp::BasicPrecedence, leaf("landmark1"), leaf("red"))},
  };
}

GoldenCase warning_light() {
  return {"IVA", "In valid mode, if the temperature exceeds 50, eventually the warning light is turned on.",
          "G (workmode = valid -> F (temperature > 50 -> warning = ON))",
          G(OnionNode::mode(ap("workmode", RelOp::Eq, "valid"),
                            F(rel(RelationOp::Implies, leaf("temperature", RelOp::Gt, "50"),
                                  leaf("warning", RelOp::Eq, "ON")))))};
}

std::string warning_light_json() {
  return R"({
  "type": "scope",
  "op": "Globally",
  "child": {
    "type": "mode",
    "condition": {"type": "atomic", "var": "workmode", "rel": "=", "formula": "valid"},
    "consequent": {
      "type": "scope",
      "op": "Eventually",
      "child": {
        "type": "relation",
        "op": "Implies",
        "left": {"type": "atomic", "var": "temperature", "rel": ">", "formula": "50"},
        "right": {"type": "atomic", "var": "warning", "rel": "=", "formula": "ON"}
      }
    }
  }
})";
}

GoldenCase navigation_output() {
  auto out = [](const char* v) { return leaf("output", RelOp::Eq, v); };
  OnionPtr any = rel(RelationOp::Or,
                     rel(RelationOp::Or, rel(RelationOp::Or, out("INS_only"), out("INS_GPS")), out("INS_CNS")),
                     out("INS_GPS_CNS"));
  return {"nav-output",
          "In inertial navigation valid mode, the system shall eventually output one of the four navigation "
          "computation types.",
          "G (valid_mode -> F (output = INS_only | output = INS_GPS | output = INS_CNS | output = INS_GPS_CNS))",
          G(OnionNode::mode(ap("valid_mode"), F(any)))};
}

GoldenCase dual_inertial() {
  return {"dual-inertial",
          "When dual inertial navigation is active, the weighted average shall be used unless a single module "
          "remains or GPS is restored.",
          "G (Dual_INU_Active -> (weightedAvg U (Single_Module | GPS_Restored)))",
          G(OnionNode::mode(ap("Dual_INU_Active"),
                            rel(RelationOp::SustainedUntil, leaf("weightedAvg"),
                                rel(RelationOp::Or, leaf("Single_Module"), leaf("GPS_Restored")))))};
}

GoldenCase waypoint_heading() {
  return {"waypoint-heading",
          "The control system should as soon as possible initiate the heading adjustment function upon receiving "
          "a verified ARINC 429 waypoint command, ultimately reducing the deviation angle to less than 2 degrees.",
          "G (WaypointCmd = True -> (F (HeadingFun = True) & F (DevAngleLow < 2)))",
          G(rel(RelationOp::Implies, leaf("WaypointCmd", RelOp::Eq, "True"),
                rel(RelationOp::And, F(leaf("HeadingFun", RelOp::Eq, "True")),
                    F(leaf("DevAngleLow", RelOp::Lt, "2")))))};
}

std::string waypoint_heading_corrected() {
  return "G (WaypointCmd = True -> (X (HeadingFun = True) & F (DevAngleLow < 2)))";
}

NodePath waypoint_first_subgoal() { return NodePath{{PathStep::Child, PathStep::Right, PathStep::Left}}; }

Formula random_formula(std::mt19937_64& rng, int max_depth, const std::vector<std::string>& atoms) {
  std::uniform_int_distribution<std::size_t> pick_atom(0, atoms.size() - 1);
  if (max_depth <= 1) return Formula::atom(atoms[pick_atom(rng)]);
  std::uniform_int_distribution<int> pick(0, 9);
  switch (pick(rng)) {
    case 0: return Formula::atom(atoms[pick_atom(rng)]);
    case 1: return Formula::negation(random_formula(rng, max_depth - 1, atoms));
    case 2: return Formula::next(random_formula(rng, max_depth - 1, atoms));
    case 3: return Formula::eventually(random_formula(rng, max_depth - 1, atoms));
    case 4: return Formula::globally(random_formula(rng, max_depth - 1, atoms));
    case 5: return Formula::conjunction(random_formula(rng, max_depth - 1, atoms), random_formula(rng, max_depth - 1, atoms));
    case 6: return Formula::disjunction(random_formula(rng, max_depth - 1, atoms), random_formula(rng, max_depth - 1, atoms));
    case 7: return Formula::implies(random_formula(rng, max_depth - 1, atoms), random_formula(rng, max_depth - 1, atoms));
    default: return Formula::until(random_formula(rng, max_depth - 1, atoms), random_formula(rng, max_depth - 1, atoms));
  }
}

}  // namespace fixtures

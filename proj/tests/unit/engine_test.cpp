#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <thread>

#include "idp/engine/inference.hpp"
#include "idp/engine/solver.hpp"
#include "support/engine_check.hpp"
#include "support/fixtures.hpp"
#include "support/random_program.hpp"

using namespace idp;
using engine::Truth;

namespace {

struct Loaded {
  lang::TypedProgram program;
  engine::PartialStructure structure;
  const lang::TheoryBlock& theory() const { return *program.theory("T"); }
};

Loaded load(const std::string& text, const std::string& theory = "T", const std::string& structure = "S") {
  auto analysis = lang::analyze({{"main.idp", text}});
  if (!analysis.program) {
    std::string msg;
    for (const auto& d : analysis.diagnostics) msg += d.message + "\n";
    throw std::runtime_error("bad fixture: " + msg);
  }
  auto s = engine::structure_from(*analysis.program, *analysis.program->structure(structure));
  (void)theory;
  return {std::move(*analysis.program), std::move(s)};
}

std::string program(const std::string& vocab, const std::string& theory, const std::string& structure) {
  return "vocabulary V {\n" + vocab + "\n}\ntheory T : V {\n" + theory + "\n}\nstructure S : V {\n" + structure +
         "\n}\n";
}

bool truth_table_sat(int vars, const std::vector<engine::Clause>& clauses) {
  for (std::uint32_t bits = 0; bits < (1U << vars); ++bits) {
    bool all = true;
    for (const auto& c : clauses) {
      bool any = false;
      for (auto l : c) {
        const bool v = (bits >> (engine::var_of(l) - 1)) & 1U;
        if ((l > 0) == v) any = true;
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

TEST(Solver, DirectContradiction) {
  engine::Solver s(1, {{1}, {-1}});
  EXPECT_FALSE(s.solve().satisfiable);
}

TEST(Solver, SingleDisjunction) {
  engine::Solver s(2, {{1, 2}});
  const auto r = s.solve();
  ASSERT_TRUE(r.satisfiable);
  EXPECT_TRUE(r.model[1] || r.model[2]);
}

TEST(Solver, EmptyClauseIsUnsat) {
  engine::Solver s(2, {{1, 2}, {}});
  EXPECT_FALSE(s.solve().satisfiable);
}

TEST(Solver, AssumptionsRestrictSearch) {
  engine::Solver s(2, {{1, 2}});
  const engine::Literal both_false[] = {-1, -2};
  EXPECT_FALSE(s.solve(both_false).satisfiable);
  const engine::Literal one[] = {-1};
  const auto r = s.solve(one);
  ASSERT_TRUE(r.satisfiable);
  EXPECT_TRUE(r.model[2]);
  // State does not leak between calls.
  EXPECT_TRUE(s.solve().satisfiable);
}

TEST(Solver, DecisionLimit) {
  // Pigeonhole 5 into 4 needs many decisions without learning.
  std::vector<engine::Clause> clauses;
  auto var = [](int pigeon, int hole) { return pigeon * 4 + hole + 1; };
  for (int p = 0; p < 5; ++p) clauses.push_back({var(p, 0), var(p, 1), var(p, 2), var(p, 3)});
  for (int h = 0; h < 4; ++h) {
    for (int a = 0; a < 5; ++a) {
      for (int b = a + 1; b < 5; ++b) clauses.push_back({-var(a, h), -var(b, h)});
    }
  }
  engine::Solver s(20, clauses);
  engine::Budget tight;
  tight.limits.max_decisions = 5;
  try {
    s.solve({}, tight);
    FAIL() << "expected a limit error";
  } catch (const engine::LimitError& e) {
    EXPECT_EQ(e.kind(), engine::LimitKind::decisions);
  }
  EXPECT_FALSE(s.solve().satisfiable);
}

TEST(Solver, AgreesWithTruthTable) {
  std::mt19937 rng(7);
  for (int round = 0; round < 600; ++round) {
    const int vars = std::uniform_int_distribution<int>(1, 12)(rng);
    const int count = std::uniform_int_distribution<int>(1, vars * 5)(rng);
    std::vector<engine::Clause> clauses;
    for (int c = 0; c < count; ++c) {
      engine::Clause clause;
      const int width = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 0; k < width; ++k) {
        const int v = std::uniform_int_distribution<int>(1, vars)(rng);
        clause.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
      }
      clauses.push_back(clause);
    }
    engine::Solver s(vars, clauses);
    const auto r = s.solve();
    ASSERT_EQ(r.satisfiable, truth_table_sat(vars, clauses)) << "round " << round;
    if (r.satisfiable) {
      for (const auto& c : clauses) {
        bool any = false;
        for (auto l : c) any = any || ((l > 0) == r.model[static_cast<std::size_t>(engine::var_of(l))]);
        ASSERT_TRUE(any);
      }
    }
  }
}

TEST(Solver, TwentyVariableInstancesAgreeWithTruthTable) {
  std::mt19937 rng(11);
  for (int round = 0; round < 6; ++round) {
    std::vector<engine::Clause> clauses;
    for (int c = 0; c < 86; ++c) {
      engine::Clause clause;
      for (int k = 0; k < 3; ++k) {
        const int v = std::uniform_int_distribution<int>(1, 20)(rng);
        clause.push_back(std::bernoulli_distribution(0.5)(rng) ? v : -v);
      }
      clauses.push_back(clause);
    }
    engine::Solver s(20, clauses);
    EXPECT_EQ(s.solve().satisfiable, truth_table_sat(20, clauses)) << "round " << round;
  }
}

TEST(Solver, DeterministicModels) {
  std::vector<engine::Clause> clauses = {{1, 2, 3}, {-1, 4}, {-2, -4}};
  engine::Solver a(4, clauses), b(4, clauses);
  EXPECT_EQ(a.solve().model, b.solve().model);
}

TEST(Ground, PenguinInstantiations) {
  const auto l = load(test::kPenguinProgram);
  const auto g = engine::ground(l.theory(), l.structure);
  ASSERT_EQ(g.instantiations.size(), 2U);
  EXPECT_EQ(g.instantiations[0].sentence, 1);
  EXPECT_EQ(g.instantiations[0].render(), "x = penguin");
  EXPECT_EQ(g.instantiations[1].render(), "x = eagle");
  EXPECT_EQ(g.atom_count(), 2);
}

TEST(Ground, SentenceWithoutQuantifiers) {
  const auto l = load(program("    p", "    p.", ""));
  const auto g = engine::ground(l.theory(), l.structure);
  ASSERT_EQ(g.instantiations.size(), 1U);
  EXPECT_TRUE(g.instantiations[0].substitution.empty());
  EXPECT_EQ(g.instantiations[0].render(), "");
}

TEST(Ground, NestedExistentialGivesThreeLiteralClauses) {
  const auto l = load(program("    type D\n    r(D, D)", "    !x: ?y: r(x, y).", "    D = { a; b; c }"));
  const auto g = engine::ground(l.theory(), l.structure);
  ASSERT_EQ(g.instantiations.size(), 3U);
  EXPECT_EQ(g.instantiations[2].render(), "x = c");
  // Each instantiation is one clause r(x,a) | r(x,b) | r(x,c).
  for (int inst = 0; inst < 3; ++inst) {
    std::vector<engine::Clause> own;
    for (std::size_t c = 0; c < g.clauses.size(); ++c) {
      if (g.provenance[c].origin == engine::Origin::theory && g.provenance[c].instantiation == inst) {
        own.push_back(g.clauses[c]);
      }
    }
    ASSERT_EQ(own.size(), 1U);
    ASSERT_EQ(own[0].size(), 3U);
    for (auto lit : own[0]) {
      EXPECT_GT(lit, 0);
      EXPECT_FALSE(g.is_auxiliary(lit));
    }
  }
}

TEST(Ground, StructureFactsHaveStructureProvenance) {
  const auto l = load(test::kPenguinProgram);
  const auto g = engine::ground(l.theory(), l.structure);
  int facts = 0;
  for (std::size_t c = 0; c < g.clauses.size(); ++c) {
    if (g.provenance[c].origin == engine::Origin::structure) {
      ++facts;
      EXPECT_EQ(g.clauses[c].size(), 1U);
    }
  }
  EXPECT_EQ(facts, 2);
}

TEST(Ground, AtomLimit) {
  const auto l = load(program("    type D\n    r(D, D)", "    !x: ?y: r(x, y).", "    D = { a; b; c }"));
  engine::Budget budget;
  budget.limits.ground_atoms_max = 8;
  try {
    engine::ground(l.theory(), l.structure, budget);
    FAIL();
  } catch (const engine::LimitError& e) {
    EXPECT_EQ(e.kind(), engine::LimitKind::ground_atoms);
  }
}

TEST(Inference, PenguinCore) {
  const auto l = load(test::kPenguinProgram);
  const auto core = engine::unsatcore(l.theory(), l.structure);
  ASSERT_TRUE(core.has_value());
  ASSERT_EQ(core->items.size(), 1U);
  EXPECT_EQ(core->items[0].sentence, 1);
  EXPECT_EQ(core->items[0].substitution_text, "x = penguin");
  EXPECT_EQ(core->theory, "T");
}

TEST(Inference, PenguinHasNoModel) {
  const auto l = load(test::kPenguinProgram);
  EXPECT_TRUE(engine::modelexpand(l.theory(), l.structure, 5).empty());
  EXPECT_FALSE(engine::propagate(l.theory(), l.structure).has_value());
}

TEST(Inference, ContradictionNeedsBothSentences) {
  const auto l = load(program("    p", "    p.\n    ~p.", ""));
  const auto core = engine::unsatcore(l.theory(), l.structure);
  ASSERT_TRUE(core.has_value());
  ASSERT_EQ(core->items.size(), 2U);
  EXPECT_EQ(core->items[0].sentence, 1);
  EXPECT_EQ(core->items[1].sentence, 2);
}

TEST(Inference, SatisfiableInputHasNoCore) {
  const auto l = load(test::kPenguinConsistentProgram);
  EXPECT_FALSE(engine::unsatcore(l.theory(), l.structure).has_value());
}

TEST(Inference, UnconstrainedPredicateHasFourModels) {
  const auto l = load(program("    type D\n    q(D)", "", "    D = { a; b }"));
  EXPECT_EQ(engine::modelexpand(l.theory(), l.structure, 10).size(), 4U);
  EXPECT_EQ(engine::modelexpand(l.theory(), l.structure, 4).size(), 4U);
  EXPECT_EQ(engine::modelexpand(l.theory(), l.structure, 2).size(), 2U);
}

TEST(Inference, TotalInputIsReturnedAsIs) {
  const auto l = load(program("    type D\n    q(D)", "    !x: q(x).", "    D = { a; b }\n    q = { a; b }"));
  const auto models = engine::modelexpand(l.theory(), l.structure, 3);
  ASSERT_EQ(models.size(), 1U);
  EXPECT_EQ(models[0], l.structure);
}

TEST(Inference, PropagateAllAnimalsFly) {
  const auto l = load(program("    type Animal\n    fly(Animal)", "    !x: fly(x).", "    Animal = { penguin; eagle }"));
  const auto out = engine::propagate(l.theory(), l.structure);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->value(0, 0), Truth::yes);
  EXPECT_EQ(out->value(0, 1), Truth::yes);
}

TEST(Inference, PropagateImplicationChain) {
  const auto l = load(program("    p\n    q", "    p => q.\n    p.", ""));
  const auto out = engine::propagate(l.theory(), l.structure);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->value(0, 0), Truth::yes);
  EXPECT_EQ(out->value(1, 0), Truth::yes);
}

TEST(Inference, PropagateEmptyTheoryIsIdentity) {
  const auto l = load(program("    type D\n    q(D)\n    r", "", "    D = { a; b }\n    q<ct> = { a }"));
  const auto out = engine::propagate(l.theory(), l.structure);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, l.structure);
}

TEST(Inference, ConstantsAreChosenByTheSolver) {
  const auto l = load(program("    type D\n    q(D)\n    c : D", "    q(c).\n    !x: q(x) => x = c.",
                              "    D = { a; b }\n    q<cf> = { a }"));
  const auto out = engine::propagate(l.theory(), l.structure);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->constant(0), std::optional<std::size_t>(1));
  EXPECT_EQ(out->value(0, 1), Truth::yes);
  const auto models = engine::modelexpand(l.theory(), l.structure, 5);
  ASSERT_EQ(models.size(), 1U);
  EXPECT_TRUE(models[0].is_total());
}

TEST(Inference, RenderedModelParsesBack) {
  const auto l = load(program("    type D\n    q(D)\n    r(D, D)\n    z", "    !x: q(x) => r(x, x).",
                              "    D = { a; b }\n    q<ct> = { a }"));
  const auto models = engine::modelexpand(l.theory(), l.structure, 1);
  ASSERT_EQ(models.size(), 1U);
  const auto text = "vocabulary V {\n    type D\n    q(D)\n    r(D, D)\n    z\n}\n" + engine::render(models[0]);
  const auto again = load(text + "theory T : V {\n}\n");
  EXPECT_EQ(again.structure, models[0]);
}

TEST(Inference, StopTokenInterruptsSearch) {
  // Unsatisfiable pigeonhole instance: long search without learning.
  std::string theory = "    !p: ?h: in(p, h).\n    !p1 p2 h: in(p1, h) & in(p2, h) => p1 = p2.";
  const auto l = load(program("    type P\n    type H\n    in(P, H)", theory,
                              "    P = { p1; p2; p3; p4; p5; p6; p7; p8; p9 }\n    H = { h1; h2; h3; h4; h5; h6; h7; h8 }"));
  engine::StopSource source;
  engine::Budget budget;
  budget.limits.max_decisions = ~std::uint64_t{0};
  budget.stop = source.token();
  std::thread stopper([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    source.request_stop(engine::StopReason::killed);
  });
  const auto start = std::chrono::steady_clock::now();
  try {
    engine::modelexpand(l.theory(), l.structure, 1, budget);
    ADD_FAILURE() << "expected the run to be stopped";
  } catch (const engine::LimitError& e) {
    EXPECT_EQ(e.kind(), engine::LimitKind::killed);
  }
  stopper.join();
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(Evaluate, Basics) {
  const auto all = load(program("    type Animal\n    fly(Animal)", "    !x: fly(x).",
                                "    Animal = { penguin; eagle }\n    fly = { penguin; eagle }"));
  EXPECT_TRUE(engine::evaluate(all.theory().sentences[0].formula, all.structure));
  const auto one = load(program("    type Animal\n    fly(Animal)", "    !x: fly(x).",
                                "    Animal = { penguin; eagle }\n    fly = { eagle }"));
  EXPECT_FALSE(engine::evaluate(one.theory().sentences[0].formula, one.structure));
}

TEST(Evaluate, AgreesWithSolverOnTotalStructures) {
  std::mt19937 rng(5);
  test::RandomInstanceOptions opt;
  opt.max_unknown_atoms = 0;
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    const auto inst = test::random_instance(rng, opt);
    const auto l = load(inst.text);
    for (const auto& sentence : l.theory().sentences) {
      lang::TheoryBlock single = l.theory();
      single.sentences = {sentence};
      const bool by_solver = !engine::modelexpand(single, l.structure, 1).empty();
      ASSERT_EQ(engine::evaluate(sentence.formula, l.structure), by_solver) << inst.text;
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(Properties, ModelsSatisfyEverySentence) {
  std::mt19937 rng(3);
  for (int round = 0; round < 150; ++round) {
    const auto inst = test::random_instance(rng);
    const auto l = load(inst.text);
    for (const auto& m : engine::modelexpand(l.theory(), l.structure, 64)) {
      for (const auto& s : l.theory().sentences) ASSERT_TRUE(engine::evaluate(s.formula, m)) << inst.text;
    }
  }
}

TEST(Properties, EngineMatchesBruteForce) {
  std::mt19937 rng(2024);
  test::CheckStats stats;
  for (int round = 0; round < 200; ++round) {
    const auto inst = test::random_instance(rng);
    const auto problem = test::check_against_oracle(inst.text, &stats);
    ASSERT_TRUE(problem.empty()) << problem;
  }
  // Both outcomes must actually be exercised.
  EXPECT_GT(stats.consistent, 20);
  EXPECT_GT(stats.inconsistent, 20);
}

TEST(Properties, PropagateIsIdempotent) {
  std::mt19937 rng(99);
  for (int round = 0; round < 150; ++round) {
    const auto inst = test::random_instance(rng);
    const auto l = load(inst.text);
    const auto once = engine::propagate(l.theory(), l.structure);
    if (!once) continue;
    const auto twice = engine::propagate(l.theory(), *once);
    ASSERT_TRUE(twice.has_value());
    ASSERT_EQ(*twice, *once) << inst.text;
  }
}

TEST(Properties, Deterministic) {
  std::mt19937 rng(41);
  for (int round = 0; round < 50; ++round) {
    const auto inst = test::random_instance(rng);
    const auto a = load(inst.text);
    const auto b = load(inst.text);
    ASSERT_EQ(engine::modelexpand(a.theory(), a.structure, 8), engine::modelexpand(b.theory(), b.structure, 8));
    const auto ca = engine::unsatcore(a.theory(), a.structure);
    const auto cb = engine::unsatcore(b.theory(), b.structure);
    ASSERT_EQ(ca.has_value(), cb.has_value());
    if (ca) {
      ASSERT_EQ(ca->items.size(), cb->items.size());
      for (std::size_t i = 0; i < ca->items.size(); ++i) {
        EXPECT_EQ(ca->items[i].substitution_text, cb->items[i].substitution_text);
      }
    }
  }
}

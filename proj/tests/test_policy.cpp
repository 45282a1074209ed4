// Copyright 2026 The BMac Peer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "bmac/error.hpp"
#include "bmac/policy.hpp"

using namespace bmac;

namespace {

PolicyContext ctx() {
  return {{"OrdererOrg", "Org1", "Org2", "Org3", "Org4"}, {1, 2, 3, 4}};
}

const std::vector<std::string>& orgs() {
  static const auto names = ctx().org_names;
  return names;
}

PolicyExpr parse(std::string_view text) { return parse_policy(text, ctx()); }

Principal peer(int org) { return {org, Role::peer}; }

// Brute-force reference: walks the tree directly.
bool brute(const PolicyExpr& e, const std::vector<Principal>& on) {
  switch (e.kind) {
    case PolicyExpr::Kind::principal:
      return std::find(on.begin(), on.end(), e.principal) != on.end();
    case PolicyExpr::Kind::all_of:
      for (const auto& c : e.children) {
        if (!brute(c, on)) return false;
      }
      return true;
    case PolicyExpr::Kind::any_of:
      for (const auto& c : e.children) {
        if (brute(c, on)) return true;
      }
      return false;
    case PolicyExpr::Kind::n_out_of: {
      int n = 0;
      for (const auto& c : e.children) n += brute(c, on) ? 1 : 0;
      return n >= e.n;
    }
  }
  return false;
}

RegisterFile regs_for(const std::vector<Principal>& on) {
  RegisterFile r(orgs().size());
  for (const auto& p : on) r.record(encode_id(p.org, p.role, 0), true);
  return r;
}

// Every assignment over `universe`, checked three ways.
void check_exhaustive(const std::string& text, const std::vector<Principal>& universe) {
  auto expr = parse(text);
  auto compiled = CompiledPolicy::compile(1, expr);
  for (std::uint64_t m = 0; m < (1ULL << universe.size()); ++m) {
    std::vector<Principal> on;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (m >> i & 1) on.push_back(universe[i]);
    }
    bool want = brute(expr, on);
    ASSERT_EQ(compiled.evaluate(regs_for(on)), want) << text << " mask " << m;
    ASSERT_EQ(evaluate_sequential(expr, on), want) << text << " mask " << m;
  }
}

}  // namespace

TEST(Parse, ConjunctionDefaultsToPeer) {
  auto e = parse("Org1 & Org2");
  EXPECT_EQ(e.kind, PolicyExpr::Kind::all_of);
  ASSERT_EQ(e.children.size(), 2u);
  EXPECT_EQ(e.children[0], PolicyExpr::leaf(peer(1)));
  EXPECT_EQ(e.children[1], PolicyExpr::leaf(peer(2)));
}

TEST(Parse, NOutOfStaysANode) {
  auto e = parse("2-outof-3 orgs");
  EXPECT_EQ(e.kind, PolicyExpr::Kind::n_out_of);
  EXPECT_EQ(e.n, 2);
  std::vector<PolicyExpr> want{PolicyExpr::leaf(peer(1)), PolicyExpr::leaf(peer(2)), PolicyExpr::leaf(peer(3))};
  EXPECT_EQ(e.children, want);
}

TEST(Parse, ComplexPolicyHasFiveArms) {
  auto e = parse("(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)");
  EXPECT_EQ(e.kind, PolicyExpr::Kind::any_of);
  ASSERT_EQ(e.children.size(), 5u);
  for (const auto& arm : e.children) {
    EXPECT_EQ(arm.kind, PolicyExpr::Kind::all_of);
    EXPECT_EQ(arm.children.size(), 2u);
  }
}

TEST(Parse, RolesAndExplicitList) {
  auto e = parse("Org1.Client | 2-outof(Org2.Admin, Org3, Org4.peer)");
  ASSERT_EQ(e.kind, PolicyExpr::Kind::any_of);
  EXPECT_EQ(e.children[0], PolicyExpr::leaf({1, Role::client}));
  const auto& k = e.children[1];
  EXPECT_EQ(k.kind, PolicyExpr::Kind::n_out_of);
  EXPECT_EQ(k.n, 2);
  EXPECT_EQ(k.children[0], PolicyExpr::leaf({2, Role::admin}));
  EXPECT_EQ(k.children[2], PolicyExpr::leaf(peer(4)));
}

TEST(Parse, PrintRoundTrip) {
  for (const char* text : {"Org1 & Org2", "2-outof-3 orgs", "Org1 | (Org2 & Org3.Client)",
                           "(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)"}) {
    auto e = parse(text);
    EXPECT_EQ(parse(to_string(e, orgs())), e) << text;
  }
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  for (const char* text : {"", "Org1 &", "Org1 Org2", "(Org1 | Org2", "Org1 & & Org2", "2-outof-", "Org1.", "Org1 )"}) {
    EXPECT_THROW(parse(text), PolicySyntaxError) << text;
  }
  try {
    parse("Org1 & ");
    FAIL();
  } catch (const PolicySyntaxError& e) {
    EXPECT_EQ(e.position(), 7u);
  }
}

TEST(Parse, NegationRejected) {
  for (const char* text : {"!Org1", "~Org1", "NOT Org1", "Org1 & !Org2", "NOT(Org1)"}) {
    EXPECT_THROW(parse(text), PolicySyntaxError) << text;
  }
}

TEST(Parse, UnknownNamesAndRangesAreConfigErrors) {
  EXPECT_THROW(parse("Org9"), ConfigError);
  EXPECT_THROW(parse("Org1.Wizard"), ConfigError);
  EXPECT_THROW(parse("3-outof-5 orgs"), ConfigError);
  EXPECT_THROW(parse("4-outof-3 orgs"), ConfigError);
  EXPECT_THROW(parse("0-outof-3 orgs"), ConfigError);
}

TEST(Compile, TwoOfThreeIsPairwiseDnf) {
  auto c = CompiledPolicy::compile(3, parse("2-outof-3 orgs"));
  EXPECT_EQ(c.terms().size(), 3u);
  EXPECT_EQ(c.to_string(orgs()),
            "(Org1.Peer & Org2.Peer) | (Org1.Peer & Org3.Peer) | (Org2.Peer & Org3.Peer)");
}

TEST(Compile, OneOfOneIsSingleBit) {
  auto c = CompiledPolicy::compile(1, parse("Org1"));
  ASSERT_EQ(c.principals().size(), 1u);
  ASSERT_EQ(c.terms().size(), 1u);
  EXPECT_EQ(c.terms()[0], 1u);
  EXPECT_FALSE(c.evaluate_mask(0));
  EXPECT_TRUE(c.evaluate_mask(1));
}

TEST(Compile, AbsorptionMinimizes) {
  auto c = CompiledPolicy::compile(1, parse("Org1 | (Org1 & Org2)"));
  EXPECT_EQ(c.terms().size(), 1u);
}

TEST(Compile, TooManyTermsRejected) {
  // 32 binary disjunctions conjoined expand to 2^32 terms.
  std::string text;
  std::vector<std::string> names{"OrdererOrg"};
  std::vector<int> endorsing;
  for (int i = 1; i <= 64; ++i) {
    names.push_back("O" + std::to_string(i));
    endorsing.push_back(i);
  }
  for (int i = 1; i <= 64; i += 2) {
    if (!text.empty()) text += " & ";
    text += "(O" + std::to_string(i) + " | O" + std::to_string(i + 1) + ")";
  }
  auto e = parse_policy(text, {names, endorsing});
  EXPECT_THROW(CompiledPolicy::compile(1, e), ConfigError);
}

TEST(Truth, TwoOfThreeExhaustive) { check_exhaustive("2-outof-3 orgs", {peer(1), peer(2), peer(3)}); }

TEST(Truth, ComplexPolicyOverEightBits) {
  std::vector<Principal> universe;
  for (int o = 1; o <= 4; ++o) {
    universe.push_back(peer(o));
    universe.push_back({o, Role::client});
  }
  check_exhaustive("(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)", universe);
}

TEST(Truth, MixedRolesAndNesting) {
  std::vector<Principal> universe;
  for (int o = 1; o <= 4; ++o) {
    universe.push_back(peer(o));
    universe.push_back({o, Role::admin});
    universe.push_back({o, Role::client});
  }
  check_exhaustive("(Org1.Admin | 2-outof(Org2, Org3.Client, Org4)) & (Org1 | Org2.Admin | 3-outof-4 orgs)",
                   universe);
}

TEST(Truth, Monotone) {
  for (const char* text : {"2-outof-3 orgs", "3-outof-4 orgs", "Org1 & Org2",
                           "(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)"}) {
    auto c = CompiledPolicy::compile(1, parse(text));
    const std::uint64_t n = c.principals().size();
    for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
      if (!c.evaluate_mask(m)) continue;
      for (std::uint64_t b = 0; b < n; ++b) EXPECT_TRUE(c.evaluate_mask(m | 1ULL << b)) << text;
    }
  }
}

TEST(Registers, RecordSemantics) {
  RegisterFile r(5);
  EXPECT_TRUE(r.record(encode_id(1, Role::peer, 0), true));
  EXPECT_EQ(r.reg(1), 1u << static_cast<int>(Role::peer));
  EXPECT_TRUE(r.record(encode_id(1, Role::peer, 0), true));
  EXPECT_EQ(r.reg(1), 1u << static_cast<int>(Role::peer));
  EXPECT_TRUE(r.record(encode_id(2, Role::peer, 0), false));
  EXPECT_EQ(r.reg(2), 0u);
  EXPECT_FALSE(r.record(encode_id(9, Role::peer, 0), true));
  EXPECT_EQ(r.unknown_principals(), 1u);
  r.clear();
  EXPECT_EQ(r.reg(1), 0u);
}

TEST(Registers, EvaluateFromRegisters) {
  auto c = CompiledPolicy::compile(3, parse("2-outof-3 orgs"));
  RegisterFile r(5);
  EXPECT_FALSE(c.evaluate(r));
  r.record(encode_id(1, Role::peer, 0), true);
  EXPECT_FALSE(c.evaluate(r));
  r.record(encode_id(2, Role::peer, 1), true);
  EXPECT_TRUE(c.evaluate(r));
  r.clear();
  EXPECT_FALSE(c.evaluate(r));
}

TEST(Sequential, VisitsEveryNode) {
  auto e = parse("(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)");
  std::uint64_t steps = 0;
  EXPECT_TRUE(evaluate_sequential(e, {peer(1), peer(2)}, &steps));
  EXPECT_EQ(steps, 16u);  // root, five arms, ten leaves
}

TEST(Table, LookupAndDuplicates) {
  PolicyTable t(5);
  t.add(7, "cc", "Org1 & Org2", ctx());
  ASSERT_NE(t.find(7), nullptr);
  EXPECT_EQ(t.find(7)->compiled.terms().size(), 1u);
  EXPECT_EQ(t.find(8), nullptr);
  EXPECT_THROW(t.add(7, "again", "Org1", ctx()), ConfigError);
}

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

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bmac/identity.hpp"

namespace bmac {

struct Principal {
  int org = 0;  // index into the configured org list
  Role role = Role::peer;

  auto operator<=>(const Principal&) const = default;
};

/// Monotone policy AST. AND/OR/N-out-of only; N-out-of stays a node.
struct PolicyExpr {
  enum class Kind { principal, all_of, any_of, n_out_of };

  Kind kind = Kind::principal;
  Principal principal;             // kind == principal
  int n = 0;                       // kind == n_out_of
  std::vector<PolicyExpr> children;

  static PolicyExpr leaf(Principal p) { return {Kind::principal, p, 0, {}}; }
  bool operator==(const PolicyExpr&) const = default;
};

/// What the parser needs to resolve names.
struct PolicyContext {
  std::vector<std::string> org_names;   // index = org index
  std::vector<int> endorsing_orgs;      // orgs with peer nodes, config order
};

/// Grammar (see docs/policy.md):
///   expr  := and ('|' and)*
///   and   := atom ('&' atom)*
///   atom  := '(' expr ')' | name ['.' role] | N '-outof-' M 'orgs'
///          | N '-outof' '(' expr (',' expr)* ')'
/// Throws PolicySyntaxError (with position) or ConfigError for unknown
/// orgs/roles and out-of-range thresholds.
PolicyExpr parse_policy(std::string_view text, const PolicyContext& ctx);

std::string to_string(const PolicyExpr& e, const std::vector<std::string>& org_names);

/// Per-transaction endorsement record: one 4-bit register per org, one bit
/// per role.
class RegisterFile {
 public:
  explicit RegisterFile(std::size_t num_orgs = 0) : regs_(num_orgs, 0) {}

  void clear() { std::fill(regs_.begin(), regs_.end(), std::uint8_t{0}); }
  /// Sets the principal's bit when `valid`. Returns false (and counts it)
  /// for an id that does not decode to a configured principal.
  bool record(EncodedId endorser, bool valid);
  bool test(Principal p) const;
  std::uint8_t reg(int org) const { return regs_.at(static_cast<std::size_t>(org)); }
  std::size_t num_orgs() const { return regs_.size(); }
  std::uint64_t unknown_principals() const { return unknown_; }

 private:
  std::vector<std::uint8_t> regs_;
  std::uint64_t unknown_ = 0;
};

/// Policy as a flat sum of products over its own principals: evaluation
/// reads every input once and checks all terms, with no sequential
/// sub-expression walk.
class CompiledPolicy {
 public:
  static constexpr std::size_t kMaxPrincipals = 64;
  static constexpr std::size_t kMaxTerms = 4096;

  CompiledPolicy() = default;
  /// Throws ConfigError if the policy is too wide to compile.
  static CompiledPolicy compile(std::uint16_t cc_id, const PolicyExpr& expr);

  bool evaluate(const RegisterFile& regs) const;
  /// Evaluation over an explicit assignment of this policy's principals
  /// (bit i = principals()[i]).
  bool evaluate_mask(std::uint64_t assignment) const;

  std::uint16_t cc_id() const { return cc_id_; }
  const std::vector<Principal>& principals() const { return principals_; }
  const std::vector<std::uint64_t>& terms() const { return terms_; }
  std::string to_string(const std::vector<std::string>& org_names) const;

 private:
  std::uint16_t cc_id_ = 0;
  std::vector<Principal> principals_;
  std::vector<std::uint64_t> terms_;
};

/// Left-to-right recursive evaluation of the AST over a set of principals
/// with valid endorsements. Every sub-expression is evaluated; `steps`
/// counts them.
bool evaluate_sequential(const PolicyExpr& expr, const std::vector<Principal>& valid,
                         std::uint64_t* steps = nullptr);

struct ChaincodePolicy {
  std::uint16_t cc_id = 0;
  std::string name;
  std::string text;
  PolicyExpr expr;
  CompiledPolicy compiled;
};

/// Policies by cc_id, fixed at startup.
class PolicyTable {
 public:
  explicit PolicyTable(std::size_t num_orgs = 0) : num_orgs_(num_orgs) {}

  void add(std::uint16_t cc_id, std::string name, std::string text, const PolicyContext& ctx);
  const ChaincodePolicy* find(std::uint16_t cc_id) const;
  const std::map<std::uint16_t, ChaincodePolicy>& all() const { return policies_; }
  std::size_t num_orgs() const { return num_orgs_; }

 private:
  std::map<std::uint16_t, ChaincodePolicy> policies_;
  std::size_t num_orgs_ = 0;
};

}  // namespace bmac

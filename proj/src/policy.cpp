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

#include "bmac/policy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>

#include "bmac/error.hpp"

namespace bmac {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const PolicyContext& ctx) : s_(text), ctx_(ctx) {}

  PolicyExpr parse() {
    auto e = parse_or();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw PolicySyntaxError(what, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string_view ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  int number() {
    skip_ws();
    std::size_t start = pos_;
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1'000'000) fail("number too large");
      ++pos_;
    }
    if (start == pos_) fail("expected number");
    return static_cast<int>(v);
  }

  void keyword(std::string_view kw) {
    std::size_t at = pos_;
    auto id = ident();
    std::string lower;
    for (char c : id) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower != kw) {
      pos_ = at;
      fail("expected '" + std::string(kw) + "'");
    }
  }

  PolicyExpr parse_or() {
    auto first = parse_and();
    if (!peek('|')) return first;
    PolicyExpr e{PolicyExpr::Kind::any_of, {}, 0, {}};
    e.children.push_back(std::move(first));
    while (accept('|')) e.children.push_back(parse_and());
    return e;
  }

  PolicyExpr parse_and() {
    auto first = parse_atom();
    if (!peek('&')) return first;
    PolicyExpr e{PolicyExpr::Kind::all_of, {}, 0, {}};
    e.children.push_back(std::move(first));
    while (accept('&')) e.children.push_back(parse_atom());
    return e;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  PolicyExpr parse_atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of policy");
    char c = s_[pos_];
    if (c == '!' || c == '~') fail("negation is not supported");
    if (accept('(')) {
      auto e = parse_or();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_threshold();
    return parse_principal();
  }

  PolicyExpr parse_threshold() {
    std::size_t at = pos_;
    int n = number();
    expect('-');
    keyword("outof");
    PolicyExpr e{PolicyExpr::Kind::n_out_of, {}, n, {}};
    if (accept('(')) {
      do {
        e.children.push_back(parse_or());
      } while (accept(','));
      expect(')');
    } else {
      expect('-');
      std::size_t m_at = pos_;
      int m = number();
      keyword("orgs");
      if (m < 1 || static_cast<std::size_t>(m) > ctx_.endorsing_orgs.size()) {
        throw ConfigError("policy refers to " + std::to_string(m) + " orgs but only " +
                          std::to_string(ctx_.endorsing_orgs.size()) +
                          " endorsing orgs are configured (position " + std::to_string(m_at) + ")");
      }
      for (int i = 0; i < m; ++i) {
        e.children.push_back(PolicyExpr::leaf({ctx_.endorsing_orgs[static_cast<std::size_t>(i)], Role::peer}));
      }
    }
    if (n < 1 || static_cast<std::size_t>(n) > e.children.size()) {
      throw ConfigError("threshold " + std::to_string(n) + " out of range for " +
                        std::to_string(e.children.size()) + " operands (position " + std::to_string(at) + ")");
    }
    return e;
  }

  PolicyExpr parse_principal() {
    std::size_t at = pos_;
    auto name = ident();
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "not") {
      pos_ = at;
      fail("negation is not supported");
    }
    auto it = std::find(ctx_.org_names.begin(), ctx_.org_names.end(), name);
    if (it == ctx_.org_names.end()) {
      throw ConfigError("unknown org '" + std::string(name) + "' in policy at position " + std::to_string(at));
    }
    Principal p{static_cast<int>(it - ctx_.org_names.begin()), Role::peer};
    if (accept('.')) p.role = parse_role(ident());
    return PolicyExpr::leaf(p);
  }

  std::string_view s_;
  const PolicyContext& ctx_;
  std::size_t pos_ = 0;
};

std::string principal_name(Principal p, const std::vector<std::string>& orgs) {
  std::string role(role_name(p.role));
  role[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(role[0])));
  auto org = static_cast<std::size_t>(p.org) < orgs.size() ? orgs[static_cast<std::size_t>(p.org)]
                                                           : "Org#" + std::to_string(p.org);
  return org + "." + role;
}

using Terms = std::vector<std::uint64_t>;

void minimize(Terms& t) {
  std::sort(t.begin(), t.end(), [](std::uint64_t a, std::uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  t.erase(std::unique(t.begin(), t.end()), t.end());
  Terms kept;
  for (auto x : t) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [x](std::uint64_t k) { return (k & x) == k; });
    if (!absorbed) kept.push_back(x);
  }
  t = std::move(kept);
}

void check_size(const Terms& t) {
  if (t.size() > CompiledPolicy::kMaxTerms) throw ConfigError("policy expands to too many terms");
}

Terms product(const Terms& a, const Terms& b) {
  Terms out;
  out.reserve(a.size() * b.size());
  for (auto x : a) {
    for (auto y : b) out.push_back(x | y);
  }
  minimize(out);
  check_size(out);
  return out;
}

class Compiler {
 public:
  std::vector<Principal> principals;

  Terms dnf(const PolicyExpr& e) {
    switch (e.kind) {
      case PolicyExpr::Kind::principal:
        return {std::uint64_t{1} << index_of(e.principal)};
      case PolicyExpr::Kind::any_of: {
        Terms out;
        for (const auto& c : e.children) {
          auto t = dnf(c);
          out.insert(out.end(), t.begin(), t.end());
        }
        minimize(out);
        check_size(out);
        return out;
      }
      case PolicyExpr::Kind::all_of: {
        Terms out{0};
        for (const auto& c : e.children) out = product(out, dnf(c));
        return out;
      }
      case PolicyExpr::Kind::n_out_of: {
        std::vector<Terms> kids;
        for (const auto& c : e.children) kids.push_back(dnf(c));
        Terms out;
        choose(kids, 0, e.n, Terms{0}, out);
        minimize(out);
        check_size(out);
        return out;
      }
    }
    return {};
  }

 private:
  std::size_t index_of(Principal p) {
    auto it = std::find(principals.begin(), principals.end(), p);
    if (it != principals.end()) return static_cast<std::size_t>(it - principals.begin());
    if (principals.size() == CompiledPolicy::kMaxPrincipals) {
      throw ConfigError("policy references more than 64 principals");
    }
    principals.push_back(p);
    return principals.size() - 1;
  }

  void choose(const std::vector<Terms>& kids, std::size_t from, int left, const Terms& acc, Terms& out) {
    if (left == 0) {
      out.insert(out.end(), acc.begin(), acc.end());
      check_size(out);
      return;
    }
    if (kids.size() - from < static_cast<std::size_t>(left)) return;
    choose(kids, from + 1, left - 1, product(acc, kids[from]), out);
    choose(kids, from + 1, left, acc, out);
  }
};

}  // namespace

PolicyExpr parse_policy(std::string_view text, const PolicyContext& ctx) {
  return Parser(text, ctx).parse();
}

std::string to_string(const PolicyExpr& e, const std::vector<std::string>& org_names) {
  auto join = [&](std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < e.children.size(); ++i) {
      if (i) out += sep;
      out += to_string(e.children[i], org_names);
    }
    return out;
  };
  switch (e.kind) {
    case PolicyExpr::Kind::principal: return principal_name(e.principal, org_names);
    case PolicyExpr::Kind::all_of: return "(" + join(" & ") + ")";
    case PolicyExpr::Kind::any_of: return "(" + join(" | ") + ")";
    case PolicyExpr::Kind::n_out_of: return std::to_string(e.n) + "-outof(" + join(", ") + ")";
  }
  return {};
}

bool RegisterFile::record(EncodedId endorser, bool valid) {
  auto org = static_cast<std::size_t>(endorser.org());
  if (org >= regs_.size() || endorser.role_bits() >= kRoleCount) {
    ++unknown_;
    return false;
  }
  if (valid) regs_[org] = static_cast<std::uint8_t>(regs_[org] | (1u << endorser.role_bits()));
  return true;
}

bool RegisterFile::test(Principal p) const {
  auto org = static_cast<std::size_t>(p.org);
  return org < regs_.size() && (regs_[org] >> static_cast<int>(p.role) & 1u) != 0;
}

CompiledPolicy CompiledPolicy::compile(std::uint16_t cc_id, const PolicyExpr& expr) {
  Compiler c;
  CompiledPolicy out;
  out.terms_ = c.dnf(expr);
  out.principals_ = std::move(c.principals);
  out.cc_id_ = cc_id;
  return out;
}

bool CompiledPolicy::evaluate_mask(std::uint64_t assignment) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [assignment](std::uint64_t t) { return (t & assignment) == t; });
}

bool CompiledPolicy::evaluate(const RegisterFile& regs) const {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < principals_.size(); ++i) {
    if (regs.test(principals_[i])) mask |= std::uint64_t{1} << i;
  }
  return evaluate_mask(mask);
}

std::string CompiledPolicy::to_string(const std::vector<std::string>& org_names) const {
  std::vector<std::size_t> order(principals_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return principals_[a] < principals_[b]; });
  std::string out;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    if (t) out += " | ";
    std::vector<std::string> names;
    for (auto i : order) {
      if (terms_[t] >> i & 1u) names.push_back(principal_name(principals_[i], org_names));
    }
    std::string term;
    for (std::size_t i = 0; i < names.size(); ++i) term += (i ? " & " : "") + names[i];
    out += (terms_.size() > 1 && names.size() > 1) ? "(" + term + ")" : term;
  }
  return out;
}

bool evaluate_sequential(const PolicyExpr& expr, const std::vector<Principal>& valid, std::uint64_t* steps) {
  if (steps) ++*steps;
  switch (expr.kind) {
    case PolicyExpr::Kind::principal:
      return std::find(valid.begin(), valid.end(), expr.principal) != valid.end();
    case PolicyExpr::Kind::all_of: {
      bool r = true;
      for (const auto& c : expr.children) r = evaluate_sequential(c, valid, steps) && r;
      return r;
    }
    case PolicyExpr::Kind::any_of: {
      bool r = false;
      for (const auto& c : expr.children) r = evaluate_sequential(c, valid, steps) || r;
      return r;
    }
    case PolicyExpr::Kind::n_out_of: {
      int hits = 0;
      for (const auto& c : expr.children) hits += evaluate_sequential(c, valid, steps) ? 1 : 0;
      return hits >= expr.n;
    }
  }
  return false;
}

void PolicyTable::add(std::uint16_t cc_id, std::string name, std::string text, const PolicyContext& ctx) {
  if (policies_.contains(cc_id)) throw ConfigError("duplicate chaincode id " + std::to_string(cc_id));
  ChaincodePolicy p;
  p.cc_id = cc_id;
  p.name = std::move(name);
  p.text = std::move(text);
  p.expr = parse_policy(p.text, ctx);
  p.compiled = CompiledPolicy::compile(cc_id, p.expr);
  policies_.emplace(cc_id, std::move(p));
  num_orgs_ = std::max(num_orgs_, ctx.org_names.size());
}

const ChaincodePolicy* PolicyTable::find(std::uint16_t cc_id) const {
  auto it = policies_.find(cc_id);
  return it == policies_.end() ? nullptr : &it->second;
}

}  // namespace bmac

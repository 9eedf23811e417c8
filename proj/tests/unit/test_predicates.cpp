#include <gtest/gtest.h>

#include "oobc/predicates.hpp"
#include "oobc/reporting.hpp"
#include "support.hpp"

namespace oobc {
namespace {

using testing::analyze;
using testing::load_corpus;
using testing::options_for;

// The three analyst listings, copied character for character.
const char* kUsesApiListing = R"( (lambda (state)
   (if (uses-API? state "org/apache/http/client/HttpClient/execute" st-attr)
       "red,colorscheme=set312"
       #f)))";

const char* kCondListing = R"( (lambda (state) 
   (cond
     [(uses-API? state "org/apache/http/client/HttpClient/execute" st-attr )  "red,colorscheme=set312"]
     [(uses-name? state  "org/ucomb/android/testinterface /RectanglePlus/getArea") "8,colorscheme=set312"]
     [else #f])))";

const char* kTruncateListing = R"( (lambda (state)
   (if (truncate? state "org/apache/http/client/HttpClient/execute")
       "12,colorscheme=set312"
       #f)) )";

const char* kUsesNameListing = R"( (lambda (state)
   (if (uses-name?  state "org/ucomb/android/testinterface/RectanglePlus/getArea")
       "red,colorscheme=set312"
       #f)))";

constexpr const char* kExecute = "org/apache/http/client/HttpClient/execute";
constexpr const char* kGetArea = "org/ucomb/android/testinterface/RectanglePlus/getArea";

Matcher leaf(Matcher::Kind k, std::string name) { return Matcher{k, std::move(name), {}}; }

TEST(Parse, UsesApiListing) {
  auto p = parse_predicates(kUsesApiListing);
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.rules[0].action, Rule::Action::Color);
  EXPECT_EQ(p.rules[0].matcher, leaf(Matcher::Kind::UsesApi, kExecute));
  EXPECT_EQ(p.rules[0].color, "red,colorscheme=set312");
}

TEST(Parse, CondListing) {
  auto p = parse_predicates(kCondListing);
  ASSERT_EQ(p.rules.size(), 2u);
  EXPECT_EQ(p.rules[0].matcher, leaf(Matcher::Kind::UsesApi, kExecute));
  EXPECT_EQ(p.rules[0].color, "red,colorscheme=set312");
  EXPECT_EQ(p.rules[1].matcher, leaf(Matcher::Kind::UsesName, kGetArea));
  EXPECT_EQ(p.rules[1].color, "8,colorscheme=set312");
}

TEST(Parse, TruncateListing) {
  auto p = parse_predicates(kTruncateListing);
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.rules[0].action, Rule::Action::Truncate);
  EXPECT_EQ(p.rules[0].matcher, leaf(Matcher::Kind::UsesApi, kExecute));
  EXPECT_EQ(p.rules[0].color, "12,colorscheme=set312");
}

TEST(Parse, UsesNameListing) {
  auto p = parse_predicates(kUsesNameListing);
  ASSERT_EQ(p.rules.size(), 1u);
  EXPECT_EQ(p.rules[0].matcher, leaf(Matcher::Kind::UsesName, kGetArea));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_predicates("(lambda (state) (if (uses-API? other \"a/b\") \"red\" #f))"), PredicateError);
  EXPECT_THROW(parse_predicates("(lambda (state) (if (frob? state \"a/b\") \"red\" #f))"), PredicateError);
  EXPECT_THROW(parse_predicates("(lambda (state) (if (uses-API? state \"a/b\"))"), std::runtime_error);
  EXPECT_TRUE(parse_predicates("").empty());
}

Matcher random_matcher(testing::Gen& g, int depth) {
  static const char* kNames[] = {"a/b/c", "x/y", "org/apache/http/client/HttpClient/execute"};
  std::size_t pick = depth <= 0 ? g.below(2) : g.below(5);
  switch (pick) {
    case 0: return leaf(Matcher::Kind::UsesApi, kNames[g.below(3)]);
    case 1: return leaf(Matcher::Kind::UsesName, kNames[g.below(3)]);
    case 2: return Matcher{Matcher::Kind::Not, "", {random_matcher(g, depth - 1)}};
    default: {
      Matcher m{pick == 3 ? Matcher::Kind::And : Matcher::Kind::Or, "", {}};
      std::size_t n = 1 + g.below(3);
      for (std::size_t i = 0; i < n; ++i) m.children.push_back(random_matcher(g, depth - 1));
      return m;
    }
  }
}

TEST(Print, RoundTripsGeneratedPrograms) {
  testing::Gen g(11);
  for (int i = 0; i < 1000; ++i) {
    PredicateProgram p;
    std::size_t n = g.below(4);
    for (std::size_t r = 0; r < n; ++r)
      p.rules.push_back(Rule{random_matcher(g, 3), g.coin() ? Rule::Action::Color : Rule::Action::Truncate,
                             std::to_string(g.below(12)) + ",colorscheme=set312"});
    EXPECT_EQ(parse_predicates(print_predicates(p)), p);
  }
}

const Node* node_at(const AnalysisResult& r, const ClassTable& ct, const std::string& method, std::uint32_t pc) {
  MethodId m = *ct.find_method(method);
  for (const auto& n : r.graph.nodes)
    if (n.config.code == Code::at(m, pc)) return &n;
  return nullptr;
}

TEST(UsesApi, InvokeStateMatches) {
  auto ct = load_corpus("http_client.oobc");
  auto r = analyze(*ct, options_for(0, true));
  const Node* call = node_at(r, *ct, "app/Net/onCreate", 3);
  ASSERT_NE(call, nullptr);
  EXPECT_TRUE(uses_api(*ct, StateView{call->config, call->events}, kExecute));
  // The nop is never reached (r is null), so build its state directly.
  Config nop{Code::at(*ct->find_method("app/Net/onCreate"), 6), call->config.fp, call->config.ka};
  ASSERT_TRUE(head(*ct, nop.code)->is<stmt::Nop>());
  std::vector<AnalysisEvent> none;
  EXPECT_FALSE(uses_api(*ct, StateView{nop, none}, kExecute));
}

TEST(UsesApi, ReflectiveInvokeMatches) {
  auto ct = load_corpus("env_reflective.oobc");
  auto r = analyze(*ct, options_for(0, true));
  const Node* call = node_at(r, *ct, "app/Files/onCreate", 4);
  ASSERT_NE(call, nullptr);
  EXPECT_TRUE(uses_api(*ct, StateView{call->config, call->events},
                       "android/os/Environment/getExternalStorageDirectory"));
}

TEST(UsesName, InsideBodyAndAtCallSite) {
  auto ct = load_corpus("interface_call.oobc");
  auto r = analyze(*ct, options_for(0, true));
  const Node* inside = node_at(r, *ct, kGetArea, 1);
  ASSERT_NE(inside, nullptr);
  EXPECT_TRUE(uses_name(*ct, StateView{inside->config, inside->events}, kGetArea));
  EXPECT_FALSE(uses_name(*ct, StateView{inside->config, inside->events}, "org/ucomb/android/testinterface/Main/other"));
  const Node* site = node_at(r, *ct, "org/ucomb/android/testinterface/Main/onCreate", 3);
  ASSERT_NE(site, nullptr);
  EXPECT_TRUE(uses_name(*ct, StateView{site->config, site->events}, kGetArea));
  const Node* before = node_at(r, *ct, "org/ucomb/android/testinterface/Main/onCreate", 1);
  ASSERT_NE(before, nullptr);
  EXPECT_FALSE(uses_name(*ct, StateView{before->config, before->events}, kGetArea));
}

TEST(Evaluate, FirstMatchWins) {
  auto ct = load_corpus("interface_call.oobc");
  auto r = analyze(*ct, options_for(0, true));
  auto p = parse_predicates(kCondListing);
  const Node* inside = node_at(r, *ct, kGetArea, 0);
  ASSERT_NE(inside, nullptr);
  auto v = evaluate(p, *ct, StateView{inside->config, inside->events});
  EXPECT_EQ(v.color, "8,colorscheme=set312");
  EXPECT_EQ(v.rule, 1u);
  EXPECT_FALSE(v.truncated);
  EXPECT_EQ(evaluate(PredicateProgram{}, *ct, StateView{inside->config, inside->events}), StateVerdict{});
}

TEST(Truncate, StopsExplorationAtMatch) {
  auto ct = load_corpus("http_client.oobc");
  auto plain = analyze(*ct, options_for(0, true));
  auto o = options_for(0, true);
  o.predicates = std::make_shared<const PredicateProgram>(parse_predicates(kTruncateListing));
  auto cut = analyze(*ct, o);
  EXPECT_LT(cut.graph.nodes.size(), plain.graph.nodes.size());
  EXPECT_TRUE(cut.truncated);
  EXPECT_TRUE(cut.incomplete());
  ASSERT_EQ(cut.graph.truncated_count(), 1u);
  for (std::size_t i = 0; i < cut.graph.nodes.size(); ++i) {
    if (!cut.graph.nodes[i].truncated) continue;
    for (const auto& e : cut.graph.edges) EXPECT_NE(e.from, i);
  }
}

}  // namespace
}  // namespace oobc

#include <gtest/gtest.h>

#include "oobc/class_table.hpp"
#include "oobc/frontend.hpp"
#include "support.hpp"

namespace oobc {
namespace {

const char* kMinimal =
    "(class A extends java/lang/Object () ((method public m () void (throws) (limit 1) (return void))))";

TEST(Parse, MinimalProgram) {
  Program p = parse_program(kMinimal);
  ASSERT_EQ(p.classes.size(), 1u);
  ASSERT_EQ(p.classes[0].methods.size(), 1u);
  EXPECT_EQ(p.classes[0].methods[0].body.size(), 1u);
  EXPECT_TRUE(p.classes[0].methods[0].body[0].is<stmt::Return>());
}

TEST(Parse, UndefinedSuperclassNamed) {
  try {
    parse_program("(class A extends B () ())");
    FAIL() << "expected a semantic error";
  } catch (const SemanticError& e) {
    EXPECT_EQ(e.symbol(), "B");
    EXPECT_NE(std::string(e.what()).find("B"), std::string::npos);
  }
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  try {
    parse_program("(class A extends java/lang/Object ()\n  ((method public m () void (throws) (limit 1) (return void))");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_GE(e.pos().line, 1);
  }
}

TEST(Parse, UnknownStatementRejected) {
  EXPECT_THROW(parse_program("(class A extends java/lang/Object () ((method public m () void (throws) (limit 1) "
                             "(frobnicate x))))"),
               SyntaxError);
}

TEST(Parse, DanglingLabelRejected) {
  EXPECT_THROW(parse_program("(class A extends java/lang/Object () ((method public m () void (throws) (limit 1) "
                             "(goto nowhere))))"),
               SemanticError);
}

TEST(Parse, ReflectionSnippetRoundTrips) {
  Program p = parse_program(testing::corpus_text("env_reflective.oobc"));
  Program again = parse_program(print_program(p));
  EXPECT_EQ(p, again);
  const auto& body = p.classes[1].methods[0].body;
  ASSERT_GE(body.size(), 5u);
  EXPECT_TRUE(body[0].is<stmt::ConstString>());
  EXPECT_EQ(body[1].as<stmt::Invoke>()->qualified(), "java/lang/Class/forName");
  EXPECT_EQ(body[3].as<stmt::Invoke>()->qualified(), "java/lang/Class/getMethod");
  EXPECT_EQ(body[4].as<stmt::Invoke>()->qualified(), "java/lang/reflect/Method/invoke");
}

TEST(Parse, WholeCorpusRoundTrips) {
  for (const auto& name : testing::corpus_names()) {
    SCOPED_TRACE(name);
    Program p = parse_program(testing::corpus_text(name));
    EXPECT_EQ(p, parse_program(print_program(p)));
    std::size_t stmts = 0;
    for (const auto& c : p.classes)
      for (const auto& m : c.methods) stmts += m.body.size();
    EXPECT_LE(stmts, 50u);
  }
}

MethodDef method_with(const std::string& body) {
  Program p = parse_program("(class A extends java/lang/Object () ((method public m () void (throws) (limit 1) " +
                            body + ")))");
  return p.classes[0].methods[0];
}

TEST(Labels, LeadingLabelMapsWholeBody) {
  MethodDef m = method_with("(label L) (nop) (return void)");
  LabelMap lm(m);
  EXPECT_EQ(lm.suffix("L").size(), 3u);
}

TEST(Labels, InnerLabelMapsSuffix) {
  MethodDef m = method_with("(nop) (label L) (return void)");
  LabelMap lm(m);
  EXPECT_EQ(lm.suffix("L").size(), 2u);
}

TEST(Labels, MatchesBruteForceSuffixScan) {
  MethodDef m = method_with("(label A) (nop) (if true (goto B)) (nop) (label B) (return void)");
  LabelMap lm(m);
  EXPECT_EQ(lm.size(), 2u);
  // Oracle: every suffix whose first statement is (label l).
  for (std::size_t i = 0; i < m.body.size(); ++i) {
    auto label = m.body[i].as<stmt::Label>();
    if (!label) continue;
    auto s = lm.suffix(label->name);
    ASSERT_EQ(s.size(), m.body.size() - i);
    EXPECT_EQ(s.front().as<stmt::Label>()->name, label->name);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_EQ(s[j], m.body[i + j]);
  }
}

const char* kChain = R"(
(class A extends java/lang/Object () ((method public m () int (throws) (limit 1) (return 1))
                                      (method public both () int (throws) (limit 1) (return 1))))
(class B extends A () ((method public both () int (throws) (limit 1) (return 2))))
(class C extends B () ())
(class D extends C () ())
)";

TEST(Resolve, InheritedMethod) {
  auto ct = testing::load_text(kChain);
  EXPECT_EQ(ct->method(ct->resolve_method("B", "m")).qualified, "A/m");
}

TEST(Resolve, OverrideWins) {
  auto ct = testing::load_text(kChain);
  EXPECT_EQ(ct->method(ct->resolve_method("B", "both")).qualified, "B/both");
  EXPECT_EQ(ct->method(ct->resolve_method("A", "both")).qualified, "A/both");
}

TEST(Resolve, DeepChainAndMissReportsChain) {
  auto ct = testing::load_text(kChain);
  EXPECT_EQ(ct->method(ct->resolve_method("D", "m")).qualified, "A/m");
  EXPECT_EQ(ct->method(ct->resolve_method("D", "both")).qualified, "B/both");
  try {
    ct->resolve_method("D", "nothing");
    FAIL() << "expected a resolve error";
  } catch (const ResolveError& e) {
    std::vector<std::string> expected = {"D", "C", "B", "A", "java/lang/Object"};
    EXPECT_EQ(e.chain(), expected);
  }
}

TEST(ClassTable, SubclassRelation) {
  auto ct = testing::load_text(kChain);
  auto a = *ct->find_class("A"), d = *ct->find_class("D");
  EXPECT_TRUE(ct->is_subclass(d, a));
  EXPECT_FALSE(ct->is_subclass(a, d));
  EXPECT_TRUE(ct->is_subclass(a, a));
}

TEST(ClassTable, LibraryClassesGetDefaultConstructor) {
  auto ct = testing::load_corpus("location_direct.oobc");
  auto lm = *ct->find_class("android/location/LocationManager");
  EXPECT_TRUE(ct->is_library(lm));
  ASSERT_TRUE(ct->default_constructor(lm).has_value());
  EXPECT_TRUE(ct->method(*ct->default_constructor(lm)).synthesized);
  EXPECT_FALSE(ct->is_library(*ct->find_class("app/Tracker")));
}

}  // namespace
}  // namespace oobc

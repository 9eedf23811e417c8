#include <gtest/gtest.h>

#include "support.hpp"

namespace oobc {
namespace {

struct Setup {
  std::size_t k;
  bool widen;
  bool gc;
};

std::string label(const ::testing::TestParamInfo<std::tuple<std::string, Setup>>& info) {
  auto [name, c] = info.param;
  std::string s = name.substr(0, name.find('.')) + "_k" + std::to_string(c.k) + (c.widen ? "_widened" : "_perstate") +
                  (c.gc ? "_gc" : "");
  return s;
}

class Soundness : public ::testing::TestWithParam<std::tuple<std::string, Setup>> {};

TEST_P(Soundness, ConcreteStatesAreCovered) {
  auto [name, c] = GetParam();
  auto ct = testing::load_corpus(name);
  auto report = testing::check_soundness(*ct, testing::options_for(c.k, c.widen, c.gc));
  EXPECT_GT(report.concrete_states, 0u);
  for (const auto& f : report.failures) ADD_FAILURE() << f;
}

INSTANTIATE_TEST_SUITE_P(Corpus, Soundness,
                         ::testing::Combine(::testing::ValuesIn(testing::corpus_names()),
                                            ::testing::Values(Setup{0, true, false}, Setup{1, true, false},
                                                              Setup{0, false, false}, Setup{1, false, false},
                                                              Setup{0, false, true}, Setup{1, false, true},
                                                              Setup{2, true, false})),
                         label);

}  // namespace
}  // namespace oobc

#include <doctest.h>

#include <cmath>

#include "uq/error.hpp"
#include "uq/methods.hpp"

using namespace uq;

namespace {

ItemEvidence evidence(std::vector<Label> scores, double s = 1.0) {
  ItemEvidence ev;
  ev.scores = std::move(scores);
  const auto n = static_cast<Eigen::Index>(ev.scores.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, s);
  m.diagonal().setOnes();
  ev.set_matrix(SimilarityMatrix(SimilarityKind::kJaccard, m));
  ev.set_matrix(SimilarityMatrix(SimilarityKind::kEmbed, m));
  ev.set_matrix(SimilarityMatrix::from_directed(m));
  return ev;
}

}  // namespace

TEST_CASE("method registry") {
  CHECK(all_methods().size() == 14);
  for (const auto& mi : all_methods()) {
    CHECK(method_from_string(mi.name) == mi.id);
    CHECK(info(mi.id).name == mi.name);
  }
  CHECK_FALSE(method_from_string("entropy").has_value());
  CHECK(info(Method::kNliDse).kind == SimilarityKind::kNli);
  CHECK_FALSE(info(Method::kFsd).kind.has_value());
}

TEST_CASE("prefix series examples") {
  auto ce = prefix_uncertainties(evidence({2, 2, 1, 1, 0}), Method::kCe, "i");
  REQUIRE(ce.values.size() == 4);
  CHECK(ce.values[0] == 0.0);
  CHECK(ce.values[1] == doctest::Approx(0.6365141682948128).epsilon(1e-14));
  CHECK(ce.values[2] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(ce.values[3] == doctest::Approx(1.0549201679861442).epsilon(1e-14));

  auto ns = prefix_uncertainties(evidence({2, 2, 2, 2, 2}), Method::kNumset, "i");
  CHECK(ns.values == std::vector<double>{1, 1, 1, 1});

  auto nad = prefix_uncertainties(evidence({0, 1, 2, 3, 0}, 1.0), Method::kJaccardNad, "i");
  CHECK(nad.values == std::vector<double>{0, 0, 0, 0});

  auto two = prefix_uncertainties(evidence({1, 2}), Method::kMar, "i");
  CHECK(two.values.size() == 1);
}

TEST_CASE("relation prefixes read the leading submatrix") {
  ItemEvidence ev;
  ev.scores = {1, 1, 1};
  Eigen::MatrixXd m(3, 3);
  m << 1, 0.5, 0.0, 0.5, 1, 0.0, 0.0, 0.0, 1;
  ev.set_matrix(SimilarityMatrix(SimilarityKind::kEmbed, m));
  auto s = prefix_uncertainties(ev, Method::kEmbedNad, "i");
  CHECK(s.values[0] == doctest::Approx(0.5));
  CHECK(s.values[1] == doctest::Approx(1.0 - 1.0 / 6.0));
}

TEST_CASE("relation method without its matrix is an error") {
  ItemEvidence ev;
  ev.scores = {1, 2, 3};
  CHECK_THROWS_AS(evaluate_method(Method::kNliDse, ev), ValidationError);
  CHECK(evaluate_method(Method::kNumset, ev).value == 3);
}

TEST_CASE("capped spectral values are flagged") {
  auto ev = evidence({1, 2, 3}, 0.0);
  auto v = evaluate_method(Method::kEmbedEigen, ev);
  CHECK(v.capped);
  CHECK(v.value == 1.0 / kSpectralEpsilon);
}

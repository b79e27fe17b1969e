#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "aloha2/movement.hpp"
#include "aloha2/params.hpp"
#include "aloha2/text.hpp"

using namespace aloha2;

TEST_CASE("parameter validation accepts interior points") {
  const NetworkParams params = validate_params(0.1, 0.1, 0.5, 0.5);
  CHECK(params.lambda1() == 0.1);
  CHECK(params.lambda2() == 0.1);
  CHECK(params.p1() == 0.5);
  CHECK(params.p2() == 0.5);
  CHECK(params.lambda_total() == doctest::Approx(0.2));
  CHECK(params.lambda(1) == 0.1);
  CHECK(params.p(2) == 0.5);
}

TEST_CASE("parameter validation rejects out-of-range values") {
  CHECK_THROWS_WITH_AS(validate_params(0.6, 0.5, 0.5, 0.5),
                       "lambda1 + lambda2 > 1", std::domain_error);
  CHECK_THROWS_WITH_AS(validate_params(0.1, 0.1, 0.0, 0.5),
                       "p1 not in (0, 1)", std::domain_error);
  CHECK_THROWS_WITH_AS(validate_params(0.1, 0.1, 0.5, 1.0),
                       "p2 not in (0, 1)", std::domain_error);
  CHECK_THROWS_WITH_AS(validate_params(-0.1, 0.1, 0.5, 0.5),
                       "lambda1 < 0", std::domain_error);
  CHECK_THROWS_WITH_AS(validate_params(0.1, -0.1, 0.5, 0.5),
                       "lambda2 < 0", std::domain_error);
  const double nan = std::nan("");
  CHECK_THROWS_AS(validate_params(nan, 0.1, 0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(validate_params(0.1, 0.1, nan, 0.5), std::domain_error);
}

TEST_CASE("boundary parameter points are allowed") {
  CHECK_NOTHROW(validate_params(0.5, 0.5, 0.5, 0.5));  // lambda1 + lambda2 = 1
  CHECK_NOTHROW(validate_params(0.0, 0.0, 0.5, 0.5));
  CHECK_NOTHROW(validate_params(1.0, 0.0, 0.9, 0.1));
}

TEST_CASE("the movement set holds exactly the seven valid vectors in order") {
  const auto movements = movement_set();
  REQUIRE(movements.size() == 7);
  const std::vector<std::pair<int, int>> expected_tags = {
      {0, 1}, {1, 0}, {0, 2}, {2, 0}, {1, 2}, {2, 1}, {0, 0}};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(movements[i].departing_node() == expected_tags[i].first);
    CHECK(movements[i].arriving_node() == expected_tags[i].second);
  }
  // no movement departs and arrives at the same node
  for (const MovementVector m : movements) {
    for (int node : {1, 2}) {
      CHECK(!(m.departures(node) == 1 && m.arrivals(node) == 1));
    }
  }
}

TEST_CASE("movement components and norms") {
  const MovementVector transfer = MovementVector::from_tag(1, 2);
  CHECK(transfer.departures(1) == 1);
  CHECK(transfer.departures(2) == 0);
  CHECK(transfer.arrivals(2) == 1);
  CHECK(transfer.arrivals(1) == 0);
  CHECK(transfer.norm() == 2);
  CHECK(transfer.name() == "(1,2)");

  CHECK(MovementVector::from_tag(0, 1).norm() == 1);
  CHECK(MovementVector::from_tag(2, 0).norm() == 1);
  CHECK(MovementVector::from_tag(0, 0).norm() == 0);

  CHECK_THROWS_AS(MovementVector::from_tag(1, 1), std::domain_error);
  CHECK_THROWS_AS(MovementVector::from_tag(3, 0), std::domain_error);
  CHECK_THROWS_AS(MovementVector::from_tag(0, -1), std::domain_error);
}

TEST_CASE("applying movements updates queue lengths") {
  CHECK(apply_movement(NetworkState{2, 1}, MovementVector::from_tag(1, 0)) ==
        NetworkState{1, 1});
  CHECK(apply_movement(NetworkState{0, 5}, MovementVector::from_tag(0, 1)) ==
        NetworkState{1, 5});
  CHECK(apply_movement(NetworkState{3, 2}, MovementVector::from_tag(1, 2)) ==
        NetworkState{2, 3});
  CHECK(apply_movement(NetworkState{0, 0}, MovementVector::from_tag(0, 0)) ==
        NetworkState{0, 0});
  CHECK_THROWS_WITH_AS(apply_movement(NetworkState{0, 0}, MovementVector::from_tag(2, 1)),
                       "departure from empty queue", std::domain_error);
  CHECK_THROWS_AS(apply_movement(NetworkState{0, 3}, MovementVector::from_tag(1, 0)),
                  std::domain_error);
}

TEST_CASE("movement classes reduce to canonical representatives") {
  // a departure pairs with the arrival that queued the packet
  const MovementClass dep1 =
      movement_class(NetworkState{2, 1}, MovementVector::from_tag(1, 0));
  CHECK(dep1.base == NetworkState{1, 1});
  CHECK(dep1.canonical == MovementVector::from_tag(0, 1));
  CHECK(!dep1.singleton());
  CHECK(dep1.representative().state == NetworkState{1, 1});

  // the empty movement forms a singleton class
  const MovementClass none =
      movement_class(NetworkState{1, 1}, MovementVector::from_tag(0, 0));
  CHECK(none.singleton());
  CHECK(none.base == NetworkState{1, 1});
  CHECK(none.members().size() == 1);

  // the two transfer movements share one class
  const MovementClass transfer =
      movement_class(NetworkState{1, 2}, MovementVector::from_tag(2, 1));
  CHECK(transfer.base == NetworkState{1, 1});
  CHECK(transfer.canonical == MovementVector::from_tag(1, 2));
  const auto members = transfer.members();
  REQUIRE(members.size() == 2);
  CHECK(members[0] == ClassMember{NetworkState{2, 1}, MovementVector::from_tag(1, 2)});
  CHECK(members[1] == ClassMember{NetworkState{1, 2}, MovementVector::from_tag(2, 1)});

  CHECK_THROWS_AS(movement_class(NetworkState{0, 0}, MovementVector::from_tag(1, 0)),
                  std::domain_error);
}

namespace {

bool valid_at(NetworkState state, MovementVector m) {
  return state.n1 >= m.departures(1) && state.n2 >= m.departures(2);
}

using ClassKey = std::tuple<std::int64_t, std::int64_t, int, int>;

ClassKey key_of(const MovementClass& cls) {
  return {cls.base.n1, cls.base.n2, cls.canonical.departing_node(),
          cls.canonical.arriving_node()};
}

}  // namespace

TEST_CASE("brute-force enumeration of classes over a 5x5 window") {
  std::map<ClassKey, std::vector<ClassMember>> groups;
  for (std::int64_t n1 = 0; n1 <= 4; ++n1) {
    for (std::int64_t n2 = 0; n2 <= 4; ++n2) {
      const NetworkState state{n1, n2};
      for (const MovementVector m : movement_set()) {
        if (!valid_at(state, m)) continue;
        groups[key_of(movement_class(state, m))].push_back({state, m});
      }
    }
  }

  for (auto& [key, found] : groups) {
    const MovementClass cls = movement_class(found.front().state, found.front().movement);
    // every member shares the class base and the movement norm
    for (const ClassMember& member : found) {
      CHECK(member.state.n1 - member.movement.departures(1) == cls.base.n1);
      CHECK(member.state.n2 - member.movement.departures(2) == cls.base.n2);
      CHECK(member.movement.norm() == cls.canonical.norm());
      CHECK(movement_class(member.state, member.movement) == cls);
    }
    // classes are singletons exactly for the empty movement; pairs otherwise,
    // unless the partner falls outside the enumeration window
    auto expected = cls.members();
    const auto inside = [](const ClassMember& member) {
      return member.state.n1 <= 4 && member.state.n2 <= 4;
    };
    std::erase_if(expected, [&](const ClassMember& m) { return !inside(m); });
    std::sort(expected.begin(), expected.end(), [](const ClassMember& a, const ClassMember& b) {
      return std::tuple(a.state.n1, a.state.n2, a.movement.departing_node()) <
             std::tuple(b.state.n1, b.state.n2, b.movement.departing_node());
    });
    std::sort(found.begin(), found.end(), [](const ClassMember& a, const ClassMember& b) {
      return std::tuple(a.state.n1, a.state.n2, a.movement.departing_node()) <
             std::tuple(b.state.n1, b.state.n2, b.movement.departing_node());
    });
    CHECK(expected == found);
    if (cls.singleton()) CHECK(found.size() == 1);
  }
}

TEST_CASE("double formatting round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0 / 3.0) == "0.6666666666666666");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("fraction parsing") {
  CHECK(parse_real("0.4") == 0.4);
  CHECK(parse_real("2/3") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(parse_real("1/7") == 1.0 / 7.0);
  CHECK_THROWS_AS(parse_real("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real(""), std::invalid_argument);
}

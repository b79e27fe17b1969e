#include "aloha2/movement.hpp"

#include <array>
#include <stdexcept>

namespace aloha2 {

namespace {

constexpr std::array<std::string_view, 7> kNames = {
    "(0,1)", "(1,0)", "(0,2)", "(2,0)", "(1,2)", "(2,1)", "(0,0)"};

}  // namespace

std::span<const MovementVector, 7> MovementVector::all() noexcept {
  static const std::array<MovementVector, 7> movements = {
      MovementVector(0, 1), MovementVector(1, 0), MovementVector(0, 2),
      MovementVector(2, 0), MovementVector(1, 2), MovementVector(2, 1),
      MovementVector(0, 0)};
  return std::span<const MovementVector, 7>(movements);
}

MovementVector MovementVector::from_tag(int departing, int arriving) {
  for (const MovementVector& m : all()) {
    if (m.departing_node() == departing && m.arriving_node() == arriving) {
      return m;
    }
  }
  throw std::domain_error("no movement with tag (" + std::to_string(departing) +
                          "," + std::to_string(arriving) + ")");
}

std::string_view MovementVector::name() const noexcept {
  const auto ms = all();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] == *this) return kNames[i];
  }
  return "(?,?)";
}

std::span<const MovementVector, 7> movement_set() noexcept {
  return MovementVector::all();
}

NetworkState apply_movement(NetworkState state, MovementVector m) {
  if (state.n1 < m.departures(1) || state.n2 < m.departures(2)) {
    throw std::domain_error("departure from empty queue");
  }
  return NetworkState{state.n1 - m.departures(1) + m.arrivals(1),
                      state.n2 - m.departures(2) + m.arrivals(2)};
}

std::vector<ClassMember> MovementClass::members() const {
  const auto dep1 = MovementVector::from_tag(1, 0);
  const auto dep2 = MovementVector::from_tag(2, 0);
  const auto dep1_arr2 = MovementVector::from_tag(1, 2);
  const auto dep2_arr1 = MovementVector::from_tag(2, 1);

  switch (canonical.arriving_node() * 10 + canonical.departing_node()) {
    case 10:  // (0,1): arrival to node 1 pairs with node 1's departure
      return {{base, canonical}, {NetworkState{base.n1 + 1, base.n2}, dep1}};
    case 20:  // (0,2)
      return {{base, canonical}, {NetworkState{base.n1, base.n2 + 1}, dep2}};
    case 21:  // (1,2): the transfer pair
      return {{NetworkState{base.n1 + 1, base.n2}, dep1_arr2},
              {NetworkState{base.n1, base.n2 + 1}, dep2_arr1}};
    default:  // (0,0)
      return {{base, canonical}};
  }
}

MovementClass movement_class(NetworkState state, MovementVector m) {
  if (state.n1 < m.departures(1) || state.n2 < m.departures(2)) {
    throw std::domain_error("departure from empty queue");
  }
  const NetworkState base{state.n1 - m.departures(1),
                          state.n2 - m.departures(2)};
  int dep = m.departing_node();
  int arr = m.arriving_node();
  // reduce to the canonical side of the transpose pairing
  if (m.norm() == 1 && dep != 0) {
    arr = dep;
    dep = 0;
  } else if (m.norm() == 2 && dep == 2) {
    dep = 1;
    arr = 2;
  }
  return MovementClass{base, MovementVector::from_tag(dep, arr)};
}

}  // namespace aloha2

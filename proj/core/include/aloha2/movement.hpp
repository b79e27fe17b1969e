#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace aloha2 {

// Queue lengths at a slot boundary.
struct NetworkState {
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  std::int64_t queue(int node) const { return node == 1 ? n1 : n2; }

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

// One slot's packet movement: at most one departure and one arrival, never
// both at the same node. The tag (i, j) names the departing node i and the
// arriving node j, 0 standing for "outside the network". Exactly seven
// movements exist; the constructor is private so no others can be built.
class MovementVector {
 public:
  // Canonical enumeration order:
  // (0,1) (1,0) (0,2) (2,0) (1,2) (2,1) (0,0)
  static std::span<const MovementVector, 7> all() noexcept;

  // Lookup by tag; throws std::domain_error for tags outside the seven.
  static MovementVector from_tag(int departing, int arriving);

  int departing_node() const noexcept { return departing_; }
  int arriving_node() const noexcept { return arriving_; }

  // Departure/arrival indicator of one node: a_i and a*_j in {0, 1}.
  int departures(int node) const noexcept { return departing_ == node ? 1 : 0; }
  int arrivals(int node) const noexcept { return arriving_ == node ? 1 : 0; }

  // Total packets moved (0, 1 or 2).
  int norm() const noexcept { return (departing_ != 0) + (arriving_ != 0); }

  // Tag spelled "(i,j)".
  std::string_view name() const noexcept;

  friend bool operator==(const MovementVector&, const MovementVector&) = default;

 private:
  constexpr MovementVector(std::int8_t dep, std::int8_t arr)
      : departing_(dep), arriving_(arr) {}

  std::int8_t departing_;
  std::int8_t arriving_;
};

// The seven valid movements in canonical order.
std::span<const MovementVector, 7> movement_set() noexcept;

// n' = n - departures + arrivals. Throws std::domain_error when the
// movement departs from an empty queue.
NetworkState apply_movement(NetworkState state, MovementVector m);

struct ClassMember {
  NetworkState state;
  MovementVector movement;

  friend bool operator==(const ClassMember&, const ClassMember&) = default;
};

// Equivalence class of (state, movement) pairs sharing the pre-movement
// queue content n - a. A movement tagged (i,j) pairs with its transpose
// (j,i) at the state holding the same n - a; the class of the empty
// movement (0,0) is a singleton. The canonical movement of a class is the
// one from {(0,1), (0,2), (1,2), (0,0)}.
struct MovementClass {
  NetworkState base;         // n - a, shared by all members
  MovementVector canonical;  // (0,1), (0,2), (1,2) or (0,0)

  bool singleton() const noexcept { return canonical.norm() == 0; }

  // The (base, canonical-movement) pair that names the class.
  ClassMember representative() const { return {base, canonical}; }

  // The actual members: two pairs, one for a singleton class.
  std::vector<ClassMember> members() const;

  friend bool operator==(const MovementClass&, const MovementClass&) = default;
};

// Class of a valid (state, movement) pair; same precondition as
// apply_movement.
MovementClass movement_class(NetworkState state, MovementVector m);

}  // namespace aloha2

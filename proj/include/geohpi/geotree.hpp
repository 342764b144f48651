// SPDX-License-Identifier: Apache-2.0

/**
 * \file geotree.hpp
 * \brief Prefix tree over fixed-length geohash(+) keys with per-node caches.
 *
 * Keys are inserted character by character; every node on a key's path keeps
 * a list of the records stored beneath it, so the bucket of records sharing
 * any prefix with a query is available without visiting the subtree. Height is
 * the key length (parameter count plus geohash precision) and does not depend
 * on how many records are stored.
 *
 * The tree is single-writer while it is being built and read-only afterwards;
 * const member functions may then be called from any number of threads.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geohpi/error.hpp"
#include "geohpi/geocode.hpp"
#include "geohpi/listing.hpp"

namespace geohpi {

/// Position of a record inside a GeoTree, assigned in insertion order.
using Slot = std::uint32_t;
using NodeId = std::uint32_t;

/// Records sharing the first `depth` key characters with a query.
struct Bucket {
  std::span<const Slot> slots;  // insertion order
  std::size_t depth = 0;
};

struct NeighbourQuery {
  std::string_view key;
  GeoPoint point;
};

class GeoTree {
 public:
  static constexpr std::size_t kMaxKeyLength = 63;

  /// Throws InvalidArgument when key_length is 0 or above kMaxKeyLength.
  explicit GeoTree(std::size_t key_length);

  /// Throws KeyLengthMismatch when the key does not have key_length() characters.
  Slot insert(const GeohashPlus& key, ListingRecord record);
  Slot insert(const Geohash& key, ListingRecord record);

  std::size_t key_length() const noexcept { return key_length_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }

  const ListingRecord& record(Slot slot) const { return records_[slot]; }
  std::string_view key(Slot slot) const {
    return std::string_view(keys_).substr(std::size_t{slot} * key_length_, key_length_);
  }

  /// True while records were inserted in non-decreasing month order. Caches
  /// are then month-sorted and month lookups use binary search.
  bool month_ordered() const noexcept { return month_ordered_; }

  /// Deepest bucket on the key's path holding at least min_population records;
  /// the root bucket when none qualifies. Throws EmptyTree, KeyLengthMismatch,
  /// or InvalidArgument (min_population == 0).
  Bucket scb_query(std::string_view key, std::size_t min_population) const;

  /// Walks the query key's path to the deepest node holding at least
  /// min_population records accepted by `group`, then returns the accepted
  /// record in that node closest to query.point (ties: smallest id). Falls
  /// back to the root when no node reaches the threshold; std::nullopt when
  /// no record is accepted at all.
  template <class GroupPredicate>
  std::optional<Slot> nearest_in_group(const NeighbourQuery& query, GroupPredicate&& group,
                                       std::size_t min_population) const;

  /// nearest_in_group with group = "listed in `month`".
  std::optional<Slot> nearest_in_month(const NeighbourQuery& query, MonthKey month,
                                       std::size_t min_population) const;

  // Structural access, mainly for invariant checks.
  static constexpr NodeId kRoot = 0;
  std::span<const Slot> cache(NodeId node) const { return nodes_[node].cache; }
  std::span<const std::pair<char, NodeId>> children(NodeId node) const {
    return nodes_[node].children;
  }

 private:
  struct Node {
    std::vector<std::pair<char, NodeId>> children;  // sorted by character
    std::vector<Slot> cache;
  };

  struct Path {
    std::array<NodeId, kMaxKeyLength + 1> nodes;
    std::size_t length = 0;  // number of valid entries; nodes[0] is the root
  };

  Slot insert_key(std::string_view key, ListingRecord record);
  void check_query(std::string_view key, std::size_t min_population) const;
  Path walk(std::string_view key) const;
  std::optional<NodeId> find_child(NodeId node, char c) const;

  template <class Filter>
  std::optional<Slot> closest(std::span<const Slot> slots, const GeoPoint& point,
                              Filter&& accept) const;

  std::size_t key_length_;
  std::vector<Node> nodes_;
  std::vector<ListingRecord> records_;
  std::string keys_;                    // key_length_ characters per slot
  std::vector<std::uint64_t> ids_;      // per slot
  std::vector<GeoPoint> points_;        // per slot
  std::vector<std::int32_t> months_;    // per slot, month ordinal
  bool month_ordered_ = true;
};

template <class Filter>
std::optional<Slot> GeoTree::closest(std::span<const Slot> slots, const GeoPoint& point,
                                     Filter&& accept) const {
  std::optional<Slot> best;
  double best_distance = 0.0;
  for (Slot s : slots) {
    if (!accept(s)) continue;
    const double d = haversine_distance(point, points_[s]);
    if (!best || d < best_distance || (d == best_distance && ids_[s] < ids_[*best])) {
      best = s;
      best_distance = d;
    }
  }
  return best;
}

template <class GroupPredicate>
std::optional<Slot> GeoTree::nearest_in_group(const NeighbourQuery& query,
                                              GroupPredicate&& group,
                                              std::size_t min_population) const {
  check_query(query.key, min_population);
  const Path path = walk(query.key);

  for (std::size_t i = path.length; i-- > 0;) {
    const auto& cache = nodes_[path.nodes[i]].cache;
    std::size_t count = 0;
    for (Slot s : cache) {
      if (group(s, records_[s]) && ++count >= min_population) break;
    }
    if (count >= min_population || (i == 0 && count > 0)) {
      return closest(cache, query.point, [&](Slot s) { return group(s, records_[s]); });
    }
  }
  return std::nullopt;
}

}  // namespace geohpi

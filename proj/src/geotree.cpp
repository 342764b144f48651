// SPDX-License-Identifier: Apache-2.0

#include "geohpi/geotree.hpp"

namespace geohpi {

GeoTree::GeoTree(std::size_t key_length) : key_length_(key_length) {
  if (key_length == 0 || key_length > kMaxKeyLength) {
    throw Error(ErrorCode::InvalidArgument,
                "tree key length must be in [1, " + std::to_string(kMaxKeyLength) +
                    "], got " + std::to_string(key_length));
  }
  nodes_.emplace_back();
}

Slot GeoTree::insert(const GeohashPlus& key, ListingRecord record) {
  return insert_key(key.text(), std::move(record));
}

Slot GeoTree::insert(const Geohash& key, ListingRecord record) {
  return insert_key(key.text(), std::move(record));
}

Slot GeoTree::insert_key(std::string_view key, ListingRecord record) {
  if (key.size() != key_length_) {
    throw Error(ErrorCode::KeyLengthMismatch,
                "key \"" + std::string(key) + "\" has length " + std::to_string(key.size()) +
                    ", tree expects " + std::to_string(key_length_));
  }
  const auto slot = static_cast<Slot>(records_.size());
  if (!months_.empty() && record.month.ordinal() < months_.back()) month_ordered_ = false;

  NodeId node = kRoot;
  nodes_[node].cache.push_back(slot);
  for (char c : key) {
    auto& children = nodes_[node].children;
    auto it = std::lower_bound(children.begin(), children.end(), c,
                               [](const auto& entry, char ch) { return entry.first < ch; });
    NodeId next;
    if (it != children.end() && it->first == c) {
      next = it->second;
    } else {
      next = static_cast<NodeId>(nodes_.size());
      children.insert(it, {c, next});
      nodes_.emplace_back();  // invalidates `children`
    }
    node = next;
    nodes_[node].cache.push_back(slot);
  }

  keys_.append(key);
  ids_.push_back(record.id);
  points_.push_back(record.point);
  months_.push_back(record.month.ordinal());
  records_.push_back(std::move(record));
  return slot;
}

std::optional<NodeId> GeoTree::find_child(NodeId node, char c) const {
  const auto& children = nodes_[node].children;
  for (const auto& [ch, child] : children) {
    if (ch == c) return child;
    if (ch > c) break;
  }
  return std::nullopt;
}

GeoTree::Path GeoTree::walk(std::string_view key) const {
  Path path;
  path.nodes[0] = kRoot;
  path.length = 1;
  NodeId node = kRoot;
  for (char c : key) {
    const auto child = find_child(node, c);
    if (!child) break;
    node = *child;
    path.nodes[path.length++] = node;
  }
  return path;
}

void GeoTree::check_query(std::string_view key, std::size_t min_population) const {
  if (records_.empty()) throw Error(ErrorCode::EmptyTree, "query on an empty tree");
  if (key.size() != key_length_) {
    throw Error(ErrorCode::KeyLengthMismatch,
                "query key \"" + std::string(key) + "\" has length " +
                    std::to_string(key.size()) + ", tree expects " +
                    std::to_string(key_length_));
  }
  if (min_population == 0) {
    throw Error(ErrorCode::InvalidArgument, "min_population must be at least 1");
  }
}

Bucket GeoTree::scb_query(std::string_view key, std::size_t min_population) const {
  check_query(key, min_population);
  NodeId node = kRoot;
  std::size_t depth = 0;
  for (char c : key) {
    const auto child = find_child(node, c);
    if (!child || nodes_[*child].cache.size() < min_population) break;
    node = *child;
    ++depth;
  }
  return Bucket{nodes_[node].cache, depth};
}

std::optional<Slot> GeoTree::nearest_in_month(const NeighbourQuery& query, MonthKey month,
                                              std::size_t min_population) const {
  const std::int32_t target = month.ordinal();
  if (!month_ordered_) {
    return nearest_in_group(
        query, [&](Slot s, const ListingRecord&) { return months_[s] == target; },
        min_population);
  }

  check_query(query.key, min_population);
  const Path path = walk(query.key);
  for (std::size_t i = path.length; i-- > 0;) {
    const std::span<const Slot> cache = nodes_[path.nodes[i]].cache;
    const auto lo = std::lower_bound(cache.begin(), cache.end(), target,
                                     [&](Slot s, std::int32_t m) { return months_[s] < m; });
    const auto hi = std::upper_bound(lo, cache.end(), target,
                                     [&](std::int32_t m, Slot s) { return m < months_[s]; });
    const auto count = static_cast<std::size_t>(hi - lo);
    if (count >= min_population || (i == 0 && count > 0)) {
      return closest(std::span<const Slot>(lo, hi), query.point, [](Slot) { return true; });
    }
  }
  return std::nullopt;
}

}  // namespace geohpi

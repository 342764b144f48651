// SPDX-License-Identifier: Apache-2.0

#include "geohpi/error.hpp"

namespace geohpi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidGeohash: return "invalid-geohash";
    case ErrorCode::KeyLengthMismatch: return "key-length-mismatch";
    case ErrorCode::EmptyTree: return "empty-tree";
    case ErrorCode::Io: return "io";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::VotingUndefined: return "voting-undefined";
    case ErrorCode::ChainUndefined: return "chain-undefined";
    case ErrorCode::UndefinedMetric: return "undefined-metric";
  }
  return "unknown";
}

}  // namespace geohpi

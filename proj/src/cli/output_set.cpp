// SPDX-License-Identifier: Apache-2.0

#include "output_set.hpp"

#include "geohpi/error.hpp"

namespace geohpi::cli {

namespace fs = std::filesystem;

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {}

OutputSet::~OutputSet() {
  if (committed_) return;
  for (auto& e : entries_) {
    e.stream.reset();
    std::error_code ec;
    fs::remove(e.temp, ec);
  }
}

std::ostream& OutputSet::open(const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
  Entry e{dir_ / ("." + name + ".tmp"), dir_ / name, nullptr};
  e.stream = std::make_unique<std::ofstream>(e.temp, std::ios::binary | std::ios::trunc);
  if (!*e.stream) throw Error(ErrorCode::Io, "cannot write " + e.temp.string());
  entries_.push_back(std::move(e));
  names_.push_back(name);
  return *entries_.back().stream;
}

void OutputSet::commit() {
  for (auto& e : entries_) {
    e.stream->flush();
    if (!*e.stream) throw Error(ErrorCode::Io, "write failed for " + e.final_path.string());
    e.stream->close();
  }
  for (auto& e : entries_) {
    std::error_code ec;
    fs::rename(e.temp, e.final_path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move output into " + e.final_path.string());
  }
  committed_ = true;
}

}  // namespace geohpi::cli

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace geohpi::cli {

/// Stages output files as hidden temporaries and renames them into place on
/// commit(). Destroying an uncommitted set deletes the temporaries.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  ~OutputSet();
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  std::ostream& open(const std::string& name);
  void commit();

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  struct Entry {
    std::filesystem::path temp;
    std::filesystem::path final_path;
    std::unique_ptr<std::ofstream> stream;
  };

  std::filesystem::path dir_;
  std::vector<Entry> entries_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

}  // namespace geohpi::cli

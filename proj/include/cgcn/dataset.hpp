#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgcn/labels.hpp"
#include "cgcn/matrix.hpp"

namespace cgcn {

struct Splits {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  friend bool operator==(const Splits&, const Splits&) = default;
};

struct Dataset {
  SparseMatrix graph;  // symmetric, binary, loop-free
  DenseMatrix features;
  LabelTable labels;
  Splits splits;

  std::size_t n_nodes() const { return graph.n_rows; }
  Task task() const { return labels.task; }

  // Throws InputError on any size or split inconsistency.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Reads graph.tsv, features.csv, labels.tsv and splits.json from `dir`.
// The task is inferred from labels.tsv (any comma-separated row makes it
// multilabel) unless `task` is given.
Dataset load_dataset(const std::filesystem::path& dir, std::optional<Task> task = std::nullopt);

// Writes the four files; each file is written to a temporary and renamed.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);

// Per-column z-score with mean and population std taken over `train_nodes`.
// Columns with zero variance on those rows become all zeros.
DenseMatrix normalize_features(const DenseMatrix& x, std::span<const Index> train_nodes);

// Shortest decimal string that round-trips the double.
std::string format_double(double v);

// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cgcn

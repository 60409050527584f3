#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <string>

#include "lscreen/problem.hpp"

namespace lscreen::io {

/// Binary matrix layout: "LSCR", u32 version, u64 n, u64 p, then n·p
/// column-major little-endian f64.
inline constexpr char kMagic[4] = {'L', 'S', 'C', 'R'};
inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::uint64_t kHeaderBytes = 4 + 4 + 8 + 8;

enum class MatrixFormat { Csv, Binary };

/// ".csv" (any case) selects CSV, anything else the binary layout.
MatrixFormat format_for_path(const std::filesystem::path& path);

/// Reads either format; the binary layout is detected by its magic bytes.
Matrix read_matrix(const std::filesystem::path& path);
Vector read_vector(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
void write_vector(const std::filesystem::path& path, const Vector& v);

/// Plain-text `key=value` lines; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Comma-separated doubles.
Vector parse_vector_list(const std::string& text);
std::string format_vector_list(const Vector& v);

struct DualSolution {
  double lambda = 0.0;
  Vector theta;
};

/// Writes lambda, objective, gap, w and theta as key=value lines.
void write_solution_file(const std::filesystem::path& path, double lambda, const Solution& sol);
/// Reads `lambda` and `theta` back from a solution file.
DualSolution read_dual_solution(const std::filesystem::path& path);

/// Column source over a binary matrix file that keeps at most block_size
/// features in memory. Every inner_products() call is one sequential pass.
class BinaryColumnReader final : public ColumnSource {
 public:
  explicit BinaryColumnReader(std::filesystem::path path, Index block_size = 4096);

  Index dim() const override { return n_; }
  Index count() const override { return p_; }
  const Vector& norms() const override { return norms_; }
  Matrix inner_products(const Matrix& probes) const override;
  Vector column(Index i) const override;

  Index block_size() const noexcept { return block_size_; }
  std::size_t passes() const noexcept { return passes_.load(); }
  /// Largest number of features held in memory by any single read.
  Index peak_resident_features() const noexcept { return peak_resident_.load(); }

 private:
  template <class Fn>
  void scan(Fn&& fn) const;

  std::filesystem::path path_;
  Index block_size_;
  Index n_ = 0;
  Index p_ = 0;
  Vector norms_;
  mutable std::atomic<std::size_t> passes_{0};
  mutable std::atomic<Index> peak_resident_{0};
};

}  // namespace lscreen::io

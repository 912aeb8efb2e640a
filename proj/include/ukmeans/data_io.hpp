#ifndef UKMEANS_DATA_IO_HPP
#define UKMEANS_DATA_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ukmeans/clustering.hpp"
#include "ukmeans/geometry.hpp"
#include "ukmeans/uncertain_object.hpp"

namespace ukm {

/// Malformed input. `offset()` is the byte offset where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("byte offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Synthetic dataset in [0, 100]^d driven by params.n, l, s, d and seed.
/// Each object: a center uniform in the workspace, sides uniform in (0, l],
/// the box shifted (never shrunk) to fit the workspace, s grid cells with
/// masses uniform in (0, 1] normalized to sum 1.
/// Throws std::invalid_argument for l <= 0, l > 100, s < 1, d < 1 or n < 1.
std::vector<UncertainObject> generate(const Params& params);

/// Turns points (already in the workspace) into uncertain objects: each
/// point becomes the center of a random box with sides <= l, shifted at the
/// workspace border, filled like generate().
std::vector<UncertainObject> uncertainize(std::span<const Point> points, double l, std::size_t s,
                                          std::uint64_t seed);

struct CsvOptions {
  char delimiter = ',';
  std::vector<std::size_t> columns{0, 1};  ///< zero-based column indices
  bool header = false;                     ///< skip the first line
};

/// Numeric points from the selected columns. Blank lines are skipped.
/// Throws ParseError on a short row or a non-numeric field.
std::vector<Point> read_csv_points(std::istream& in, const CsvOptions& options);

/// Per-dimension min-max rescale into [lo, hi]. Constant columns map to the
/// midpoint.
void rescale(std::vector<Point>& points, double lo, double hi);

// Dataset text format:
//   ukmeans-dataset 1 <m> <n> <s>
//   <id> <lo_1..lo_m> <hi_1..hi_m> <grid_1..grid_m> <mass_1..mass_s>   (n lines)
// Reals use shortest round-trip formatting, so save/load is exact.
void save_dataset(std::ostream& out, std::span<const UncertainObject> objects);
std::vector<UncertainObject> load_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, std::span<const UncertainObject> objects);
std::vector<UncertainObject> load_dataset(const std::filesystem::path& path);

/// "object_id,cluster" CSV, one row per object, clusters zero-based.
void save_assignments(std::ostream& out, std::span<const UncertainObject> objects,
                      std::span<const std::size_t> assignment);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace ukm

#endif  // UKMEANS_DATA_IO_HPP

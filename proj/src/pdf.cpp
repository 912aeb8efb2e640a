#include "ukmeans/pdf.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ukm {

DiscretePdf::DiscretePdf(Mbr owner, std::vector<std::size_t> grid_dims,
                         std::vector<double> masses)
    : owner_(std::move(owner)), grid_dims_(std::move(grid_dims)), masses_(std::move(masses)) {
  const std::size_t m = owner_.dims();
  if (m == 0) throw std::invalid_argument("DiscretePdf: owner box has no dimensions");
  if (grid_dims_.size() != m)
    throw std::invalid_argument("DiscretePdf: grid rank " + std::to_string(grid_dims_.size()) +
                                " does not match box dimensionality " + std::to_string(m));
  std::size_t cells = 1;
  for (std::size_t g : grid_dims_) {
    if (g == 0) throw std::invalid_argument("DiscretePdf: grid dimension of 0");
    cells *= g;
  }
  if (cells != masses_.size())
    throw std::invalid_argument("DiscretePdf: grid has " + std::to_string(cells) +
                                " cells but " + std::to_string(masses_.size()) + " masses");

  samples_.resize(cells * m);
  std::vector<double> pitch(m);
  for (std::size_t t = 0; t < m; ++t) pitch[t] = owner_.side(t) / static_cast<double>(grid_dims_[t]);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (std::size_t t = m; t-- > 0;) {
      const std::size_t idx = rest % grid_dims_[t];
      rest /= grid_dims_[t];
      samples_[c * m + t] = owner_.lo(t) + (static_cast<double>(idx) + 0.5) * pitch[t];
    }
  }
}

DiscretePdf DiscretePdf::single_cell(Mbr owner) {
  std::vector<std::size_t> dims(owner.dims(), 1);
  return DiscretePdf(std::move(owner), std::move(dims), {1.0});
}

Point DiscretePdf::cell_center(std::size_t cell) const {
  if (cell >= size())
    throw std::out_of_range("cell index " + std::to_string(cell) + " out of range [0, " +
                            std::to_string(size()) + ")");
  const std::size_t m = dims();
  return Point(samples_.begin() + static_cast<std::ptrdiff_t>(cell * m),
               samples_.begin() + static_cast<std::ptrdiff_t>((cell + 1) * m));
}

double DiscretePdf::mass_sum() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

Point object_centroid(const DiscretePdf& pdf) {
  const std::size_t m = pdf.dims();
  const auto pts = pdf.sample_points();
  const auto masses = pdf.masses();
  Point c(m, 0.0);
  for (std::size_t cell = 0; cell < masses.size(); ++cell) {
    for (std::size_t t = 0; t < m; ++t) c[t] += masses[cell] * pts[cell * m + t];
  }
  const Mbr& box = pdf.owner_mbr();
  for (std::size_t t = 0; t < m; ++t) c[t] = std::clamp(c[t], box.lo(t), box.hi(t));
  return c;
}

namespace {

// Nondecreasing factorizations of `s` into `parts` factors, each >= `min_factor`.
void factorizations(std::size_t s, std::size_t parts, std::size_t min_factor,
                    std::vector<std::size_t>& current,
                    const std::function<void(const std::vector<std::size_t>&)>& emit) {
  if (parts == 1) {
    if (s >= min_factor) {
      current.push_back(s);
      emit(current);
      current.pop_back();
    }
    return;
  }
  for (std::size_t f = min_factor; f <= s; ++f) {
    if (s % f != 0) continue;
    // remaining parts-1 factors are each >= f, so f^(parts) <= s
    std::size_t bound = 1;
    bool fits = true;
    for (std::size_t i = 0; i < parts; ++i) {
      bound *= f;
      if (bound > s) {
        fits = false;
        break;
      }
    }
    if (!fits) break;
    current.push_back(f);
    factorizations(s / f, parts - 1, f, current, emit);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::size_t> grid_shape(std::size_t s, std::span<const double> side_lengths) {
  const std::size_t m = side_lengths.size();
  if (m == 0) throw std::invalid_argument("grid_shape: no dimensions");
  if (s == 0) throw std::invalid_argument("grid_shape: s must be >= 1");

  std::vector<std::size_t> best;
  std::vector<std::size_t> current;
  factorizations(s, m, 1, current, [&](const std::vector<std::size_t>& f) {
    if (best.empty()) {
      best = f;
      return;
    }
    // factors are sorted ascending: compare max/min ratios by cross-multiplication
    const std::size_t lhs = f.back() * best.front();
    const std::size_t rhs = best.back() * f.front();
    if (lhs < rhs || (lhs == rhs && f.back() < best.back())) best = f;
  });

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return side_lengths[a] > side_lengths[b];
  });
  std::vector<std::size_t> shape(m);
  for (std::size_t r = 0; r < m; ++r) shape[order[r]] = best[m - 1 - r];
  return shape;
}

}  // namespace ukm

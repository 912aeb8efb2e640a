#include "ukmeans/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "ukmeans/random.hpp"

namespace ukm {

namespace {

constexpr std::string_view kDatasetMagic = "ukmeans-dataset";
constexpr std::size_t kDatasetVersion = 1;

void check_gen_args(double l, std::size_t s) {
  if (!(l > 0.0)) throw std::invalid_argument("side length bound l must be > 0");
  if (l > kWorkspaceExtent)
    throw std::invalid_argument("side length bound l must not exceed the workspace extent");
  if (s < 1) throw std::invalid_argument("samples per object s must be >= 1");
}

// Object i draws from its own substream so generation can be split by index.
UncertainObject make_object(std::size_t id, std::span<const double> center, double l,
                            std::size_t s, Rng& rng) {
  const std::size_t m = center.size();
  Point lo(m);
  Point hi(m);
  Point sides(m);
  for (std::size_t t = 0; t < m; ++t) {
    const double side = l * rng.uniform01_open_low();
    double low = center[t] - 0.5 * side;
    if (low < 0.0) low = 0.0;
    if (low + side > kWorkspaceExtent) low = kWorkspaceExtent - side;
    lo[t] = low;
    hi[t] = std::min(low + side, kWorkspaceExtent);
    sides[t] = hi[t] - lo[t];
  }
  std::vector<std::size_t> grid = grid_shape(s, sides);
  std::vector<double> masses(s);
  double total = 0.0;
  for (double& w : masses) {
    w = rng.uniform01_open_low();
    total += w;
  }
  for (double& w : masses) w /= total;
  return UncertainObject(id, DiscretePdf(Mbr(std::move(lo), std::move(hi)), std::move(grid),
                                         std::move(masses)));
}

}  // namespace

std::vector<UncertainObject> generate(const Params& params) {
  check_gen_args(params.l, params.s);
  if (params.n < 1) throw std::invalid_argument("object count n must be >= 1");
  if (params.d < 1) throw std::invalid_argument("dimensionality d must be >= 1");
  std::vector<UncertainObject> objects;
  objects.reserve(params.n);
  Point center(params.d);
  for (std::size_t i = 0; i < params.n; ++i) {
    Rng rng(params.seed, kStreamDataset, i);
    for (double& c : center) c = rng.uniform(0.0, kWorkspaceExtent);
    objects.push_back(make_object(i, center, params.l, params.s, rng));
  }
  return objects;
}

std::vector<UncertainObject> uncertainize(std::span<const Point> points, double l, std::size_t s,
                                          std::uint64_t seed) {
  check_gen_args(l, s);
  if (points.empty()) throw std::invalid_argument("uncertainize: no points");
  const std::size_t m = points.front().size();
  if (m == 0) throw std::invalid_argument("uncertainize: points have no coordinates");
  std::vector<UncertainObject> objects;
  objects.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    if (p.size() != m) throw std::invalid_argument("uncertainize: mixed point dimensionality");
    for (double x : p) {
      if (!(x >= 0.0 && x <= kWorkspaceExtent))
        throw std::invalid_argument("uncertainize: point " + std::to_string(i) +
                                    " lies outside the workspace; rescale first");
    }
    Rng rng(seed, kStreamDataset, i);
    objects.push_back(make_object(i, p, l, s, rng));
  }
  return objects;
}

std::vector<Point> read_csv_points(std::istream& in, const CsvOptions& options) {
  if (options.columns.empty()) throw std::invalid_argument("read_csv_points: no columns selected");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<Point> points;
  std::size_t line_start = 0;
  bool first = true;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string_view line(text.data() + line_start, line_end - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool skip = (first && options.header) ||
                      line.find_first_not_of(" \t") == std::string_view::npos;
    first = false;
    if (!skip) {
      std::vector<std::pair<std::size_t, std::string_view>> fields;  // (offset in line, text)
      std::size_t pos = 0;
      for (;;) {
        const std::size_t cut = line.find(options.delimiter, pos);
        const std::size_t end = cut == std::string_view::npos ? line.size() : cut;
        fields.emplace_back(pos, line.substr(pos, end - pos));
        if (cut == std::string_view::npos) break;
        pos = cut + 1;
      }
      Point p;
      p.reserve(options.columns.size());
      for (std::size_t col : options.columns) {
        if (col >= fields.size())
          throw ParseError(line_start, "row has " + std::to_string(fields.size()) +
                                           " fields, column " + std::to_string(col) +
                                           " requested");
        auto [off, field] = fields[col];
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) {
          field.remove_prefix(1);
          ++off;
        }
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
          field.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
          throw ParseError(line_start + off, "not a number: '" + std::string(field) + "'");
        p.push_back(v);
      }
      points.push_back(std::move(p));
    }
    line_start = line_end + 1;
  }
  return points;
}

void rescale(std::vector<Point>& points, double lo, double hi) {
  if (points.empty()) return;
  const std::size_t m = points.front().size();
  for (std::size_t t = 0; t < m; ++t) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      mn = std::min(mn, p[t]);
      mx = std::max(mx, p[t]);
    }
    for (auto& p : points) {
      p[t] = mx > mn ? lo + (p[t] - mn) / (mx - mn) * (hi - lo) : 0.5 * (lo + hi);
      p[t] = std::clamp(p[t], lo, hi);
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void save_dataset(std::ostream& out, std::span<const UncertainObject> objects) {
  if (objects.empty()) throw std::invalid_argument("save_dataset: empty dataset");
  const std::size_t m = objects.front().dims();
  const std::size_t s = objects.front().pdf.size();
  out << kDatasetMagic << ' ' << kDatasetVersion << ' ' << m << ' ' << objects.size() << ' ' << s
      << '\n';
  for (const auto& o : objects) {
    if (o.dims() != m || o.pdf.size() != s)
      throw std::invalid_argument("save_dataset: objects must share dimensionality and s");
    out << o.id;
    for (double v : o.mbr.lo()) out << ' ' << format_double(v);
    for (double v : o.mbr.hi()) out << ' ' << format_double(v);
    for (std::size_t g : o.pdf.grid_dims()) out << ' ' << g;
    for (double w : o.pdf.masses()) out << ' ' << format_double(w);
    out << '\n';
  }
}

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(std::string text) : text_(std::move(text)) {}

  std::size_t offset() const { return pos_; }

  std::string_view next(const char* what) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size())
      throw ParseError(pos_, std::string("unexpected end of input, expected ") + what);
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    token_start_ = start;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  template <typename T>
  T number(const char* what) {
    const std::string_view tok = next(what);
    T v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(token_start_, std::string("expected ") + what + ", got '" +
                                         std::string(tok) + "'");
    return v;
  }

  bool at_end() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ >= text_.size();
  }

  std::size_t token_start() const { return token_start_; }

 private:
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

}  // namespace

std::vector<UncertainObject> load_dataset(std::istream& in) {
  Tokenizer tok(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
  if (tok.next("dataset header") != kDatasetMagic)
    throw ParseError(tok.token_start(), "not a ukmeans dataset file");
  if (tok.number<std::size_t>("format version") != kDatasetVersion)
    throw ParseError(tok.token_start(), "unsupported format version");
  const auto m = tok.number<std::size_t>("dimensionality m");
  const auto n = tok.number<std::size_t>("object count n");
  const auto s = tok.number<std::size_t>("samples per object s");
  if (m == 0 || s == 0) throw ParseError(tok.token_start(), "m and s must be >= 1");

  std::vector<UncertainObject> objects;
  objects.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = tok.number<std::size_t>("object id");
    const std::size_t record = tok.token_start();
    Point lo(m);
    Point hi(m);
    std::vector<std::size_t> grid(m);
    std::vector<double> masses(s);
    for (double& v : lo) v = tok.number<double>("box lower bound");
    for (double& v : hi) v = tok.number<double>("box upper bound");
    for (std::size_t& g : grid) g = tok.number<std::size_t>("grid dimension");
    for (double& w : masses) w = tok.number<double>("probability mass");
    try {
      objects.emplace_back(id, DiscretePdf(Mbr(std::move(lo), std::move(hi)), std::move(grid),
                                           std::move(masses)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(record, std::string("invalid object record: ") + e.what());
    }
  }
  if (!tok.at_end()) throw ParseError(tok.offset(), "trailing data after the last object");
  return objects;
}

void save_dataset(const std::filesystem::path& path, std::span<const UncertainObject> objects) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  save_dataset(out, objects);
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

std::vector<UncertainObject> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return load_dataset(in);
}

void save_assignments(std::ostream& out, std::span<const UncertainObject> objects,
                      std::span<const std::size_t> assignment) {
  out << "object_id,cluster\n";
  for (std::size_t i = 0; i < objects.size(); ++i)
    out << objects[i].id << ',' << assignment[i] << '\n';
}

}  // namespace ukm

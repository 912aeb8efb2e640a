#include "ukmeans/uncertain_object.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace ukm {

UncertainObject::UncertainObject(std::size_t id_, DiscretePdf pdf_)
    : id(id_), mbr(pdf_.owner_mbr()), pdf(std::move(pdf_)), centroid(object_centroid(pdf)) {}

UncertainObject::UncertainObject(std::size_t id_, DiscretePdf pdf_, Point centroid_)
    : id(id_), mbr(pdf_.owner_mbr()), pdf(std::move(pdf_)), centroid(std::move(centroid_)) {}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_object(const UncertainObject& o, std::size_t dataset_dims,
                  std::vector<Diagnostic>& out) {
  auto report = [&](std::string msg) { out.push_back({o.id, std::move(msg)}); };

  const std::size_t m = o.mbr.dims();
  if (m == 0) {
    report("empty bounding box");
    return;
  }
  if (m != dataset_dims)
    report("dimensionality " + std::to_string(m) + " differs from dataset dimensionality " +
           std::to_string(dataset_dims));
  if (!(o.pdf.owner_mbr() == o.mbr)) report("pdf grid box differs from object box");
  if (o.pdf.dims() != m) return;

  std::size_t cells = 1;
  for (std::size_t g : o.pdf.grid_dims()) cells *= g;
  if (cells != o.pdf.size())
    report("grid product " + std::to_string(cells) + " != mass count " +
           std::to_string(o.pdf.size()));

  bool masses_ok = true;
  for (std::size_t c = 0; c < o.pdf.size(); ++c) {
    const double w = o.pdf.masses()[c];
    if (!std::isfinite(w) || w < 0.0) {
      report("mass " + fmt(w) + " at cell " + std::to_string(c) + " is negative or not finite");
      masses_ok = false;
    }
  }
  const double sum = o.pdf.mass_sum();
  if (masses_ok && std::abs(sum - 1.0) > kMassTolerance)
    report("mass sum " + fmt(sum) + " != 1");

  if (o.centroid.size() != m) {
    report("centroid has " + std::to_string(o.centroid.size()) + " coordinates, expected " +
           std::to_string(m));
    return;
  }
  if (!o.mbr.contains(o.centroid)) report("centroid lies outside the bounding box");
  if (masses_ok) {
    const Point expected = object_centroid(o.pdf);
    for (std::size_t t = 0; t < m; ++t) {
      if (std::abs(expected[t] - o.centroid[t]) > kMassTolerance) {
        report("centroid coordinate " + std::to_string(t) + " is " + fmt(o.centroid[t]) +
               ", pdf gives " + fmt(expected[t]));
        break;
      }
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate_dataset(std::span<const UncertainObject> objects) {
  std::vector<Diagnostic> out;
  if (objects.empty()) return out;
  const std::size_t dataset_dims = objects.front().mbr.dims();
  std::unordered_set<std::size_t> seen;
  for (const auto& o : objects) {
    if (!seen.insert(o.id).second) out.push_back({o.id, "duplicate object id"});
    check_object(o, dataset_dims, out);
  }
  return out;
}

}  // namespace ukm

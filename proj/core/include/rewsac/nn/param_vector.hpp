#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rewsac::nn {

/// One named block inside a ParamVector.
struct Segment {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Flat double storage with a named-segment layout. Networks keep all their
/// parameters in one of these so optimizers, checkpoints and the meta-gradient
/// can treat them as plain vectors.
class ParamVector {
 public:
  ParamVector() = default;

  /// Appends a zero-initialized segment and returns its index.
  std::size_t add_segment(std::string name, std::vector<std::size_t> shape);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  const std::vector<Segment>& segments() const { return segments_; }

  std::span<double> segment(std::size_t idx);
  std::span<const double> segment(std::size_t idx) const;

  /// Throws if no segment has the given name.
  std::size_t segment_index(const std::string& name) const;
  std::span<double> segment(const std::string& name) {
    return segment(segment_index(name));
  }
  std::span<const double> segment(const std::string& name) const {
    return segment(segment_index(name));
  }

  /// Same layout, all values zero.
  static ParamVector zeros_like(const ParamVector& other);

  void set_zero();
  void scale(double a);
  /// this += a * x; layouts must agree in total size.
  void axpy(double a, const ParamVector& x);
  double dot(const ParamVector& other) const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::vector<double> values_;
  std::vector<Segment> segments_;
};

}  // namespace rewsac::nn

#include "rewsac/nn/param_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace rewsac::nn {

std::size_t ParamVector::add_segment(std::string name,
                                     std::vector<std::size_t> shape) {
  Segment seg;
  seg.name = std::move(name);
  seg.size = 1;
  for (std::size_t d : shape) seg.size *= d;
  seg.shape = std::move(shape);
  seg.offset = values_.size();
  values_.resize(values_.size() + seg.size, 0.0);
  segments_.push_back(std::move(seg));
  return segments_.size() - 1;
}

std::span<double> ParamVector::segment(std::size_t idx) {
  const Segment& s = segments_.at(idx);
  return {values_.data() + s.offset, s.size};
}

std::span<const double> ParamVector::segment(std::size_t idx) const {
  const Segment& s = segments_.at(idx);
  return {values_.data() + s.offset, s.size};
}

std::size_t ParamVector::segment_index(const std::string& name) const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].name == name) return i;
  }
  throw std::out_of_range("ParamVector: no segment named " + name);
}

ParamVector ParamVector::zeros_like(const ParamVector& other) {
  ParamVector out;
  out.segments_ = other.segments_;
  out.values_.assign(other.values_.size(), 0.0);
  return out;
}

void ParamVector::set_zero() {
  for (double& v : values_) v = 0.0;
}

void ParamVector::scale(double a) {
  for (double& v : values_) v *= a;
}

void ParamVector::axpy(double a, const ParamVector& x) {
  if (x.size() != size()) {
    throw std::invalid_argument("ParamVector::axpy: size mismatch");
  }
  const double* xs = x.data();
  double* ys = values_.data();
  for (std::size_t i = 0; i < values_.size(); ++i) ys[i] += a * xs[i];
}

double ParamVector::dot(const ParamVector& other) const {
  if (other.size() != size()) {
    throw std::invalid_argument("ParamVector::dot: size mismatch");
  }
  double acc = 0.0;
  const double* a = values_.data();
  const double* b = other.data();
  for (std::size_t i = 0; i < values_.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double ParamVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ParamVector::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace rewsac::nn

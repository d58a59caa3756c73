#include "hcnet/tensor.hpp"

#include <cmath>

namespace hcnet {

bool FeatureMap::all_finite() const {
  for (double x : data)
    if (!std::isfinite(x)) return false;
  return true;
}

std::size_t ParamSet::add(const std::string& name, std::vector<std::size_t> shape) {
  if (index_.count(name)) throw NnError(NnErrc::ShapeMismatch, "duplicate tensor '" + name + "'");
  index_[name] = tensors_.size();
  names_.push_back(name);
  tensors_.emplace_back(std::move(shape));
  ++generation_;
  return tensors_.size() - 1;
}

std::size_t ParamSet::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw NnError(NnErrc::UnknownTensor, "no tensor named '" + name + "'");
  return it->second;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (std::size_t i = 0; i < tensors_.size(); ++i) out.add(names_[i], tensors_[i].shape);
  return out;
}

void ParamSet::accumulate(const ParamSet& other, double scale) {
  if (other.size() != size()) throw NnError(NnErrc::ShapeMismatch, "parameter sets differ");
  ++generation_;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    auto& a = tensors_[i].data;
    const auto& b = other.tensors_[i].data;
    if (a.size() != b.size()) throw NnError(NnErrc::ShapeMismatch, "tensor '" + names_[i] + "' differs in size");
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += scale * b[k];
  }
}

void ParamSet::scale(double s) {
  ++generation_;
  for (auto& t : tensors_)
    for (auto& x : t.data) x *= s;
}

}  // namespace hcnet

#ifndef HCNET_TENSOR_HPP
#define HCNET_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hcnet {

enum class NnErrc { ShapeMismatch, DimensionTooSmall, QueryArityMismatch, StaleTrace, UnknownTensor, NonFinite };

class NnError : public std::runtime_error {
 public:
  NnError(NnErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  NnErrc code() const noexcept { return code_; }

 private:
  NnErrc code_;
};

/// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), data(count(shape), 0.0) {}

  static std::size_t count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (auto x : s) n *= x;
    return n;
  }
  std::size_t size() const noexcept { return data.size(); }
  double* ptr() noexcept { return data.data(); }
  const double* ptr() const noexcept { return data.data(); }
};

/// |V| x d node features.
struct FeatureMap {
  std::size_t n = 0, d = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t rows, std::size_t cols, double fill = 0.0)
      : n(rows), d(cols), data(rows * cols, fill) {}
  double* row(std::size_t v) noexcept { return data.data() + v * d; }
  const double* row(std::size_t v) const noexcept { return data.data() + v * d; }
  bool all_finite() const;
};

/// Named tensors in insertion order. Every mutable access bumps the
/// generation so traces recorded earlier can be detected as stale.
class ParamSet {
 public:
  std::size_t add(const std::string& name, std::vector<std::size_t> shape);
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  std::size_t index(const std::string& name) const;

  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const Tensor& get(const std::string& name) const { return tensors_[index(name)]; }
  Tensor& mut(std::size_t i) {
    ++generation_;
    return tensors_[i];
  }
  Tensor& mut(const std::string& name) { return mut(index(name)); }

  std::size_t size() const noexcept { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::uint64_t generation() const noexcept { return generation_; }
  std::size_t scalar_count() const;

  /// Same names and shapes, all zeros.
  ParamSet zeros_like() const;
  /// this += other, tensor by tensor in index order.
  void accumulate(const ParamSet& other, double scale = 1.0);
  void scale(double s);

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t generation_ = 0;
};

}  // namespace hcnet

#endif  // HCNET_TENSOR_HPP

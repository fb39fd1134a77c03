#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcl {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

enum class Model { scalar, box, circle };

const char* model_name(Model m) noexcept;

// Opinions on a line; length N.
using ScalarState = std::vector<double>;

// Angles in [0, 2pi); length N.
using AngularState = std::vector<double>;

// N points in R^D, row-major.
class VectorState {
 public:
  VectorState() = default;
  VectorState(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}
  VectorState(std::size_t n, std::size_t dim, std::vector<double> data);

  std::size_t agents() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
  double& at(std::size_t i, std::size_t d) noexcept { return data_[i * dim_ + d]; }
  double at(std::size_t i, std::size_t d) const noexcept { return data_[i * dim_ + d]; }

  std::vector<double> column(std::size_t d) const;
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const VectorState&, const VectorState&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct IntervalDomain {
  double a = 0.0;
  double b = 1.0;
};

struct BoxDomain {
  double a = 0.0;
  double b = 1.0;
  std::size_t dim = 1;
};

// Throws InvalidArgument unless N >= 2.
void require_agents(std::size_t n);
void validate(const IntervalDomain& d);
void validate(const BoxDomain& d);

}  // namespace pcl

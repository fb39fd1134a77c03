#include "pcl/stopping.hpp"

#include <cmath>
#include <sstream>

#include "pcl/errors.hpp"

namespace pcl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double need(const std::optional<double>& v, const char* what) {
  if (!v) throw ConfigError("stopping", std::string("frame does not carry ") + what);
  return *v;
}

void positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite and > 0");
}

}  // namespace

std::string describe(const StoppingPolicy& p) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const RangeThreshold& r) { os << "range<=" << r.eps; },
                 [&](const LyapunovThreshold& l) { os << "lyapunov<=" << l.tau; },
                 [&](const VectorLyapunovThreshold& v) {
                   os << (v.per_dimension ? "lyapunov_d<=" : "lyapunov_total<=") << v.tau;
                 },
                 [&](const HalfDisk&) { os << "half_disk"; },
                 [&](const CircleArc& c) { os << "gamma_max>=2pi-" << c.eps; },
                 [&](const MaxSteps& m) { os << "max_steps=" << m.cap; },
             },
             p);
  return os.str();
}

void validate(const StoppingPolicy& p, Model model) {
  auto mismatch = [&](const char* name) {
    throw ConfigError("stopping", std::string(name) + " policy does not apply to model " + model_name(model));
  };
  std::visit(overloaded{
                 [&](const RangeThreshold& r) { positive(r.eps, "range threshold eps"); },
                 [&](const LyapunovThreshold& l) {
                   positive(l.tau, "lyapunov threshold tau");
                   if (model != Model::scalar) mismatch("LyapunovThreshold");
                 },
                 [&](const VectorLyapunovThreshold& v) {
                   positive(v.tau, "vector lyapunov threshold tau");
                   if (model != Model::box) mismatch("VectorLyapunovThreshold");
                 },
                 [&](const HalfDisk&) {
                   if (model != Model::circle) mismatch("HalfDisk");
                 },
                 [&](const CircleArc& c) {
                   positive(c.eps, "circle arc eps");
                   if (!(c.eps < 2.0 * kPi / 3.0)) throw InvalidArgument("CircleArc requires eps < 2pi/3");
                   if (model != Model::circle) mismatch("CircleArc");
                 },
                 [&](const MaxSteps& m) {
                   if (m.cap < 1) throw InvalidArgument("MaxSteps cap must be >= 1");
                 },
             },
             p);
}

bool check(const StoppingPolicy& p, const ObservableFrame& f) {
  return std::visit(overloaded{
                        [&](const RangeThreshold& r) { return need(f.range, "range") <= r.eps; },
                        [&](const LyapunovThreshold& l) { return need(f.lyapunov, "lyapunov") <= l.tau; },
                        [&](const VectorLyapunovThreshold& v) {
                          if (!v.per_dimension) return need(f.lyapunov_total, "total lyapunov") <= v.tau;
                          if (f.lyapunov_per_dim.empty())
                            throw ConfigError("stopping", "frame does not carry per-dimension lyapunov");
                          for (double l : f.lyapunov_per_dim)
                            if (l > v.tau) return false;
                          return true;
                        },
                        [&](const HalfDisk&) { return need(f.gamma_max, "gamma_max") > kPi; },
                        [&](const CircleArc& c) { return need(f.gamma_max, "gamma_max") >= kTwoPi - c.eps; },
                        [&](const MaxSteps& m) { return f.step >= m.cap; },
                    },
                    p);
}

bool StoppingRecord::all_fired() const {
  for (const auto& h : first_hit)
    if (!h) return false;
  return true;
}

}  // namespace pcl

#include "lvmrs/simplex_maps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "lvmrs/kernels.hpp"

namespace lvmrs::simplex {

namespace {

void check_logits(std::span<const double> z) {
  if (z.empty()) throw std::domain_error("simplex map: empty logit vector");
  for (double v : z) {
    if (!std::isfinite(v))
      throw std::domain_error("simplex map: non-finite logit");
  }
}

void check_params(double t, double r) {
  if (!(t > 0.0)) throw std::domain_error("simplex map: temperature <= 0");
  if (!(r > 0.0)) throw std::domain_error("simplex map: mass <= 0");
}

void hardmax_into(std::span<const double> z, double r, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  out[kernels::argmax(z.data(), z.size())] = r;
}

void softmax_into(std::span<const double> z, double t, double r,
                  std::span<double> out) {
  const double zmax = kernels::reduce_max(z.data(), z.size());
  const double sum =
      kernels::exp_shift_scale(z.data(), z.size(), zmax, 1.0 / t, out.data());
  kernels::scale(out.data(), out.size(), r / sum);
}

// Sort-and-threshold projection of z/t onto the mass-r simplex:
//   kappa = max{ k : r + k * s_k > sum_{j<=k} s_j }   (s sorted descending)
//   rho   = (sum_{j<=kappa} s_j - r) / kappa
//   out_i = max(s_i - rho, 0)
void sparsemax_into(std::span<const double> z, double t, double r,
                    std::span<double> out, MapWorkspace& ws) {
  const std::size_t c = z.size();
  const double inv_t = 1.0 / t;
  ws.sorted.resize(c);
  for (std::size_t i = 0; i < c; ++i) ws.sorted[i] = z[i] * inv_t;
  std::sort(ws.sorted.begin(), ws.sorted.end(), std::greater<double>());

  double cumsum = 0.0;
  double support_sum = ws.sorted[0];
  std::size_t kappa = 1;
  for (std::size_t k = 1; k <= c; ++k) {
    cumsum += ws.sorted[k - 1];
    if (r + static_cast<double>(k) * ws.sorted[k - 1] > cumsum) {
      kappa = k;
      support_sum = cumsum;
    }
  }
  const double rho = (support_sum - r) / static_cast<double>(kappa);
  kernels::scaled_threshold(z.data(), c, inv_t, rho, out.data());
}

}  // namespace

const char* map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::hardmax:
      return "hardmax";
    case MapKind::softmax:
      return "softmax";
    case MapKind::sparsemax:
      return "sparsemax";
  }
  return "?";
}

MapKind map_kind_from_name(const std::string& name) {
  if (name == "hardmax") return MapKind::hardmax;
  if (name == "softmax") return MapKind::softmax;
  if (name == "sparsemax") return MapKind::sparsemax;
  throw std::domain_error("unknown simplex map: " + name);
}

bool is_valid(const SimplexVector& p, double tol_scale) {
  if (p.values.empty() || !(p.mass > 0.0)) return false;
  double sum = 0.0;
  for (double v : p.values) {
    if (!(v >= 0.0)) return false;
    sum += v;
  }
  return std::abs(sum - p.mass) <= tol_scale * p.mass;
}

void apply_map_into(const MapSpec& spec, std::span<const double> z,
                    std::span<double> out, MapWorkspace& ws) {
  switch (spec.kind) {
    case MapKind::hardmax:
      hardmax_into(z, spec.mass, out);
      return;
    case MapKind::softmax:
      softmax_into(z, spec.temperature, spec.mass, out);
      return;
    case MapKind::sparsemax:
      sparsemax_into(z, spec.temperature, spec.mass, out, ws);
      return;
  }
}

SimplexVector hardmax(std::span<const double> z, double r) {
  check_logits(z);
  check_params(1.0, r);
  SimplexVector p{std::vector<double>(z.size()), r};
  hardmax_into(z, r, p.values);
  return p;
}

SimplexVector softmax(std::span<const double> z, double t, double r) {
  check_logits(z);
  check_params(t, r);
  SimplexVector p{std::vector<double>(z.size()), r};
  softmax_into(z, t, r, p.values);
  return p;
}

SimplexVector generalized_sparsemax(std::span<const double> z, double t,
                                    double r) {
  check_logits(z);
  check_params(t, r);
  SimplexVector p{std::vector<double>(z.size()), r};
  MapWorkspace ws;
  sparsemax_into(z, t, r, p.values, ws);
  return p;
}

SimplexVector apply_map(const MapSpec& spec, std::span<const double> z) {
  check_logits(z);
  check_params(spec.temperature, spec.mass);
  SimplexVector p{std::vector<double>(z.size()), spec.mass};
  MapWorkspace ws;
  apply_map_into(spec, z, p.values, ws);
  return p;
}

}  // namespace lvmrs::simplex

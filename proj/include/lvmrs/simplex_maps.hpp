#pragma once
// Maps from logit vectors onto the mass-r simplex: hardmax, tempered softmax,
// and the generalized sparsemax (Euclidean projection of z/t onto the
// simplex of mass r). All maps break argmax ties toward the lowest index.

#include <span>
#include <string>
#include <vector>

namespace lvmrs::simplex {

enum class MapKind { hardmax, softmax, sparsemax };

const char* map_kind_name(MapKind kind);
MapKind map_kind_from_name(const std::string& name);  // throws on unknown

struct MapSpec {
  MapKind kind = MapKind::softmax;
  double temperature = 1.0;  // > 0; applied as z / t before mapping
  double mass = 1.0;         // > 0; coordinate sum of the output
};

struct SimplexVector {
  std::vector<double> values;
  double mass = 1.0;
};

// Nonnegative coordinates summing to mass within 1e-9 * mass.
bool is_valid(const SimplexVector& p, double tol_scale = 1e-9);

// Scratch space reused across rows to keep the hot path allocation-free.
struct MapWorkspace {
  std::vector<double> sorted;
};

SimplexVector hardmax(std::span<const double> z, double r);
SimplexVector softmax(std::span<const double> z, double t, double r);
SimplexVector generalized_sparsemax(std::span<const double> z, double t,
                                    double r);
SimplexVector apply_map(const MapSpec& spec, std::span<const double> z);

// Row form used by the estimation loop; the caller guarantees z is finite
// and out has the same length as z.
void apply_map_into(const MapSpec& spec, std::span<const double> z,
                    std::span<double> out, MapWorkspace& ws);

}  // namespace lvmrs::simplex
